use rand::Rng;

use crate::geometry::{Sphere, Vec3};
use crate::tasks::{
    EventKind, SelectionLayout, SelectionOutcome, SelectionRun, TaskKind, TrialEvent, TrialLog,
    RING_DIAMETER,
};
use crate::technique::Technique;

use super::acquire::simulate_portal_opening;
use super::noise::{sample_hover_hit, sample_ray_hit};
use super::{time_noise, AgentError, AgentParams, TechniqueSetup, TORSO_HEIGHT};

const MAX_CLICKS_PER_TARGET: u32 = 10_000;

/// One simulated layout repetition: a log per presented target, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSet {
    pub logs: Vec<TrialLog>,
    pub portal_attempts: u32,
    pub end_time: f64,
}

pub(crate) enum Pointer {
    Ray { origin: Vec3, sigma: f64 },
    Cursor { sigma: f64 },
}

impl Pointer {
    pub(crate) fn for_technique(setup: &TechniqueSetup, params: &AgentParams) -> Result<Self, AgentError> {
        let torso = Vec3::new(0.0, TORSO_HEIGHT, 0.0);
        Ok(match setup.technique {
            Technique::Homer => Pointer::Ray {
                origin: torso + Vec3::new(0.0, 0.0, -params.controller_distance),
                sigma: params.angular_jitter_sigma,
            },
            Technique::Portal | Technique::VirtualHand => Pointer::Cursor {
                sigma: params.hand_tremor_sigma,
            },
            Technique::LinearOffset => Pointer::Cursor {
                sigma: params.hand_tremor_sigma * setup.lo_gain(),
            },
            Technique::Teleport => return Err(AgentError::UnsupportedTechnique(setup.technique)),
        })
    }

    pub(crate) fn click<R: Rng + ?Sized>(&self, rng: &mut R, aim: Vec3, spheres: &[Sphere]) -> Option<usize> {
        match *self {
            Pointer::Ray { origin, sigma } => sample_ray_hit(rng, origin, aim, sigma, spheres),
            Pointer::Cursor { sigma } => sample_hover_hit(rng, aim, sigma, spheres),
        }
    }
}

/// Simulates one repetition of the tapping layout: the center, then the
/// ring in visit order. PORTAL opens its portal before the center.
pub fn simulate_selection_trial<R: Rng + ?Sized>(
    setup: &TechniqueSetup,
    layout: &SelectionLayout,
    params: &AgentParams,
    participant: u32,
    trial: u32,
    rng: &mut R,
) -> Result<SelectionSet, AgentError> {
    let pointer = Pointer::for_technique(setup, params)?;
    let spheres: Vec<Sphere> = (0..layout.sphere_count())
        .map(|id| *layout.sphere(id).expect("valid id"))
        .collect();
    let sequence = layout.sequence();
    let mut run = SelectionRun::start(layout.clone(), 0.0);
    let mut logs = Vec::with_capacity(sequence.len());
    let mut t = 0.0;
    let mut portal_attempts = 0;

    for (position, &target) in sequence.iter().enumerate() {
        let mut log = TrialLog::new(participant, setup.technique, layout.distance, TaskKind::Selection, trial);
        log.target = Some(target as u32);
        log.scored = layout.is_scored(position);
        log.push(TrialEvent::new(t, EventKind::TrialStart));
        let start = t;
        if position == 0 && setup.technique == Technique::Portal {
            let opening = simulate_portal_opening(params, layout.distance, rng);
            for a in &opening.log {
                let kind = if a.success { EventKind::PortalOpen } else { EventKind::PortalOpenFailed };
                log.push(TrialEvent::new(start + a.end, kind));
            }
            portal_attempts = opening.attempts;
            t += opening.open_time;
        }
        let amplitude = if position == 0 {
            RING_DIAMETER / 2.0
        } else {
            layout.amplitude(position)
        };
        let width = 2.0 * spheres[target].radius;
        let id = setup.effective_id(params, amplitude, width, layout.distance)?;
        t += params.movement_time(id) * time_noise(rng, params.time_cv);
        let aim = spheres[target].center;
        loop {
            let hit = pointer.click(rng, aim, &spheres);
            log.push(TrialEvent::click(t, hit.map(|h| h as u32)));
            match run.advance_selection(hit, t) {
                SelectionOutcome::Hit { clicks, .. } => {
                    log.clicks = clicks;
                    log.success = true;
                    break;
                }
                SelectionOutcome::Miss { clicks_so_far, .. } if clicks_so_far >= MAX_CLICKS_PER_TARGET => {
                    log.clicks = clicks_so_far;
                    break;
                }
                SelectionOutcome::Miss { .. } => {
                    t += params.retry_time() * time_noise(rng, params.time_cv);
                }
                SelectionOutcome::Complete => unreachable!("sequence not yet complete"),
            }
        }
        if log.success {
            log.selection_time_s = Some(t - start);
        }
        log.push(TrialEvent::new(t, EventKind::TrialEnd));
        logs.push(log);
    }
    Ok(SelectionSet {
        logs,
        portal_attempts,
        end_time: t,
    })
}
