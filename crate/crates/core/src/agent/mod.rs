//! Simulated participants: Fitts-law timing, click-time pointing noise and
//! a settling model for docking.

mod acquire;
mod docking;
mod noise;
mod selection;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::portal::ArmReach;
use crate::technique::{effective_cd_ratio, CdConfig, CdRatio, Technique, TechniqueError};

pub use acquire::{
    simulate_portal_opening, simulate_teleport_approach, OpeningAttempt, PortalOpening,
    TeleportApproach, PORTAL_AIM_RADIUS, PORTAL_AIM_SWING, TELEPORT_ARC_SPEED,
    TELEPORT_LANDING_TOLERANCE, TELEPORT_STANDOFF,
};
pub use docking::{simulate_docking_trial, DOCKING_STEP, MAX_DOCKING_STEPS};
pub use noise::{hover_miss_probability, ray_miss_probability, sample_hover_hit, sample_ray_hit};
pub use selection::{simulate_selection_trial, SelectionSet};

/// Height of the body anchor the user's reach is measured from, meters.
pub const TORSO_HEIGHT: f64 = 1.4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("agent parameter `{name}` = {value} must be non-negative and finite")]
    Negative { name: &'static str, value: f64 },
    #[error("agent noise `{name}` = {value} must be below 0.1")]
    NoiseTooLarge { name: &'static str, value: f64 },
    #[error("technique {0} cannot perform this task")]
    UnsupportedTechnique(Technique),
    #[error(transparent)]
    Technique(#[from] TechniqueError),
}

/// Motor and perceptual constants of one simulated participant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentParams {
    /// Fitts intercept, seconds.
    pub fitts_a: f64,
    /// Fitts slope, seconds per bit.
    pub fitts_b: f64,
    pub reaction_time: f64,
    /// Ray direction error at the click, radians per axis.
    pub angular_jitter_sigma: f64,
    /// Hand position error at the click, meters per axis.
    pub hand_tremor_sigma: f64,
    /// Share of the click tremor left while holding an object still.
    pub hold_tremor_fraction: f64,
    /// Angular resolution of visual alignment, radians.
    pub visual_angle_sigma: f64,
    /// Coefficient of variation of movement times.
    pub time_cv: f64,
    /// Aim error when framing a target with a new portal, radians.
    pub portal_aim_sigma: f64,
    /// Torso-to-controller distance while pointing, meters.
    pub controller_distance: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            fitts_a: 0.2,
            fitts_b: 0.3,
            reaction_time: 0.2,
            angular_jitter_sigma: 0.0035,
            hand_tremor_sigma: 0.0012,
            hold_tremor_fraction: 0.25,
            visual_angle_sigma: 0.001,
            time_cv: 0.1,
            portal_aim_sigma: 0.0518,
            controller_distance: 0.5,
        }
    }
}

impl AgentParams {
    /// A participant with no pointing, holding or timing noise.
    pub fn noiseless() -> Self {
        Self {
            angular_jitter_sigma: 0.0,
            hand_tremor_sigma: 0.0,
            visual_angle_sigma: 0.0,
            time_cv: 0.0,
            portal_aim_sigma: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let all = [
            ("fitts_a", self.fitts_a),
            ("fitts_b", self.fitts_b),
            ("reaction_time", self.reaction_time),
            ("angular_jitter_sigma", self.angular_jitter_sigma),
            ("hand_tremor_sigma", self.hand_tremor_sigma),
            ("hold_tremor_fraction", self.hold_tremor_fraction),
            ("visual_angle_sigma", self.visual_angle_sigma),
            ("time_cv", self.time_cv),
            ("portal_aim_sigma", self.portal_aim_sigma),
            ("controller_distance", self.controller_distance),
        ];
        for (name, value) in all {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(AgentError::Negative { name, value });
            }
        }
        let sigmas = [
            ("angular_jitter_sigma", self.angular_jitter_sigma),
            ("hand_tremor_sigma", self.hand_tremor_sigma),
            ("visual_angle_sigma", self.visual_angle_sigma),
            ("portal_aim_sigma", self.portal_aim_sigma),
        ];
        for (name, value) in sigmas {
            if value >= 0.1 {
                return Err(AgentError::NoiseTooLarge { name, value });
            }
        }
        if self.controller_distance <= 0.0 {
            return Err(AgentError::Negative {
                name: "controller_distance",
                value: self.controller_distance,
            });
        }
        Ok(())
    }

    /// Fitts movement time including reaction, before timing noise.
    pub fn movement_time(&self, id_bits: f64) -> f64 {
        self.reaction_time + self.fitts_a + self.fitts_b * id_bits
    }

    /// Cost of a corrective re-aim after a missed click.
    pub fn retry_time(&self) -> f64 {
        self.movement_time(1.0)
    }
}

/// How a technique is configured for one participant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechniqueSetup {
    pub technique: Technique,
    pub reach: ArmReach,
    pub room_half_extent: f64,
}

impl TechniqueSetup {
    pub fn new(technique: Technique, reach: ArmReach, room_half_extent: f64) -> Self {
        Self {
            technique,
            reach,
            room_half_extent,
        }
    }

    pub fn lo_gain(&self) -> f64 {
        self.room_half_extent / self.reach.meters()
    }

    /// CD ratio while acting on a target `distance` from the torso.
    pub fn cd_ratio(&self, params: &AgentParams, distance: f64) -> Result<CdRatio, AgentError> {
        let config = CdConfig {
            lo_gain: Some(self.lo_gain()),
            homer_controller_distance: Some(params.controller_distance),
        };
        Ok(effective_cd_ratio(self.technique, &config, distance)?)
    }

    /// Index of difficulty in motor space: target width shrinks by the CD
    /// ratio, amplitude is the displayed one.
    pub fn effective_id(
        &self,
        params: &AgentParams,
        amplitude: f64,
        width: f64,
        distance: f64,
    ) -> Result<f64, AgentError> {
        let cd = self.cd_ratio(params, distance)?.value();
        Ok((amplitude / (width * cd) + 1.0).log2())
    }
}

/// Identifies the task of a random stream so different tasks of the same
/// participant never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub task: u64,
    pub technique: u64,
    pub distance_index: u64,
    pub trial: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent reproducible stream for (master seed, participant, trial).
pub fn stream_rng(master_seed: u64, participant: u64, key: StreamKey) -> ChaCha8Rng {
    let mut h = splitmix64(master_seed);
    for part in [participant, key.task, key.technique, key.distance_index, key.trial] {
        h = splitmix64(h ^ part);
    }
    let mut seed = [0u8; 32];
    let mut x = h;
    for chunk in seed.chunks_mut(8) {
        x = splitmix64(x);
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Mean-one lognormal factor with coefficient of variation `cv`.
pub(crate) fn time_noise<R: rand::Rng + ?Sized>(rng: &mut R, cv: f64) -> f64 {
    if cv <= 0.0 {
        return 1.0;
    }
    let s = (1.0 + cv * cv).ln().sqrt();
    let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
    (s * z - 0.5 * s * s).exp()
}
