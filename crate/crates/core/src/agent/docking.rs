use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{Pose, Rotation, Sphere, Vec3};
use crate::portal::CAMERA_OFFSET_FRACTION;
use crate::tasks::{docking_error, is_docked, DockingTrial, EventKind, TaskKind, TrialEvent, TrialLog, DOCKING_EDGE};
use crate::technique::Technique;

use super::acquire::{simulate_portal_opening, simulate_teleport_approach, TELEPORT_STANDOFF};
use super::selection::Pointer;
use super::{time_noise, AgentError, AgentParams, TechniqueSetup, TORSO_HEIGHT};

/// Duration of one align-and-check step, seconds.
pub const DOCKING_STEP: f64 = 0.5;
pub const MAX_DOCKING_STEPS: u32 = 10_000;
const DECAY: f64 = 0.5;
const MAX_GRAB_CLICKS: u32 = 10_000;
/// Residual below which a noiseless agent counts as settled.
const SETTLE_FLOOR: f64 = 1e-12;
/// Hand travel from rest to a remote object's proxy, meters.
const ACQUIRE_AMPLITUDE: f64 = 0.3;

fn gaussian3<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Vec3 {
    let mut s = || -> f64 { StandardNormal.sample(rng) };
    Vec3::new(s(), s(), s()) * sigma
}

/// Distance from the eye to the object while aligning it.
fn view_distance(setup: &TechniqueSetup, object_distance: f64) -> f64 {
    match setup.technique {
        Technique::Portal => CAMERA_OFFSET_FRACTION * setup.reach.meters(),
        Technique::Teleport => TELEPORT_STANDOFF,
        Technique::VirtualHand => setup.reach.meters(),
        Technique::Homer | Technique::LinearOffset => object_distance,
    }
}

/// Simulates one docking trial: reach the object, grab it, then settle it
/// onto the target in steps that halve the remaining offset and add
/// holding noise, until docked and settled.
pub fn simulate_docking_trial<R: Rng + ?Sized>(
    setup: &TechniqueSetup,
    trial: &DockingTrial,
    params: &AgentParams,
    participant: u32,
    trial_index: u32,
    rng: &mut R,
) -> Result<TrialLog, AgentError> {
    let torso = Vec3::new(0.0, TORSO_HEIGHT, 0.0);
    let object_distance = torso.distance(trial.dock_pose.position);
    let mut log = TrialLog::new(participant, setup.technique, object_distance, TaskKind::Docking, trial_index);
    log.push(TrialEvent::new(0.0, EventKind::TrialStart));
    let mut t = 0.0;

    let grab_radius = DOCKING_EDGE / (2.0 * 6f64.sqrt());
    let grab_sphere = Sphere {
        center: trial.dock_pose.position,
        radius: grab_radius,
    };
    let hand_id = (0.5 * setup.reach.meters() / (2.0 * grab_radius) + 1.0).log2();
    let (pointer, reach_id, cd_distance) = match setup.technique {
        Technique::Portal => {
            let opening = simulate_portal_opening(params, object_distance, rng);
            for a in &opening.log {
                let kind = if a.success { EventKind::PortalOpen } else { EventKind::PortalOpenFailed };
                log.push(TrialEvent::new(a.end, kind));
            }
            t += opening.open_time;
            (Pointer::Cursor { sigma: params.hand_tremor_sigma }, hand_id, object_distance)
        }
        Technique::Teleport => {
            let approach = simulate_teleport_approach(params, object_distance, rng);
            for &(start, arrive) in &approach.hops {
                log.push(TrialEvent::new(start, EventKind::TeleportStart));
                log.push(TrialEvent::new(arrive, EventKind::TeleportArrive));
            }
            t += approach.time;
            (Pointer::Cursor { sigma: params.hand_tremor_sigma }, hand_id, TELEPORT_STANDOFF)
        }
        _ => {
            let pointer = Pointer::for_technique(setup, params)?;
            let id = setup.effective_id(params, ACQUIRE_AMPLITUDE, 2.0 * grab_radius, object_distance)?;
            (pointer, id, object_distance)
        }
    };
    t += params.movement_time(reach_id) * time_noise(rng, params.time_cv);
    let mut clicks = 0;
    loop {
        clicks += 1;
        let hit = pointer.click(rng, grab_sphere.center, &[grab_sphere]);
        log.push(TrialEvent::click(t, hit.map(|_| 0)));
        if hit.is_some() || clicks >= MAX_GRAB_CLICKS {
            break;
        }
        t += params.retry_time() * time_noise(rng, params.time_cv);
    }
    log.push(TrialEvent::new(t, EventKind::Grab));
    log.selection_time_s = Some(t);
    let grab_time = t;

    let cd = match setup.technique {
        Technique::Teleport => 1.0,
        _ => setup.cd_ratio(params, cd_distance)?.value(),
    };
    let view = view_distance(setup, object_distance);
    let sigma_t = ((params.hand_tremor_sigma * params.hold_tremor_fraction / cd).powi(2)
        + (params.visual_angle_sigma * view).powi(2))
    .sqrt();
    let sigma_r = params.angular_jitter_sigma;

    let target = &trial.target_pose;
    let mut err_t = trial.dock_pose.position - target.position;
    let mut err_r = (trial.dock_pose.orientation * target.orientation.inverse()).to_scaled_axis();
    let (init_t, init_r) = (err_t.norm(), err_r.norm());
    let dock_pose = |et: Vec3, er: Vec3| Pose::new(target.position + et, Rotation::from_scaled_axis(er) * target.orientation);

    let mut steps = 0u32;
    let mut docked = false;
    let mut dock = trial.dock;
    while steps < MAX_DOCKING_STEPS {
        steps += 1;
        err_t = err_t * DECAY + gaussian3(rng, sigma_t);
        err_r = err_r * DECAY + gaussian3(rng, sigma_r);
        dock = trial.dock_at(&dock_pose(err_t, err_r));
        docked = is_docked(&dock, &trial.target, trial.tolerance).expect("matching labels");
        let decay = DECAY.powi(steps as i32);
        let settled = init_t * decay <= sigma_t.max(SETTLE_FLOOR) && init_r * decay <= sigma_r.max(SETTLE_FLOOR);
        if docked && settled {
            break;
        }
    }
    t += f64::from(steps) * DOCKING_STEP;
    let error = docking_error(&dock, &trial.target).expect("matching labels");
    log.error_distance_m = Some(error);
    if docked {
        log.push(TrialEvent::new(t, EventKind::Docked).with_value(error));
        t += params.reaction_time;
        clicks += 1;
        log.push(TrialEvent::click(t, None));
        log.docking_time_s = Some(t - grab_time);
        log.success = true;
    }
    log.push(TrialEvent::new(t, EventKind::Release));
    log.push(TrialEvent::new(t, EventKind::TrialEnd));
    log.clicks = clicks;
    Ok(log)
}
