//! Interaction techniques: control-display ratio vocabulary and the
//! per-technique state machines.

mod homer;
mod linear_offset;
mod teleport;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use homer::{HomerGrab, HomerPhase, HomerState};
pub use linear_offset::{LinearOffsetCalibration, LinearOffsetState};
pub use teleport::{TeleportPhase, TeleportPlan, TeleportState, DEFAULT_FADE_DURATION};

use crate::geometry::{Pose, Vec3};

/// Default chest height for the body anchor used by arm-extension
/// techniques, meters above the floor.
pub const DEFAULT_CHEST_HEIGHT: f64 = 1.4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TechniqueError {
    #[error("nothing selected")]
    NothingSelected,
    #[error("technique is not aiming")]
    NotAiming,
    #[error("technique is not grabbing")]
    NotGrabbing,
    #[error("no floor hit")]
    NoFloorHit,
    #[error("controller coincides with the body anchor; grab scale undefined")]
    DegenerateGrab,
    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),
    #[error("control-display ratio undefined for {0}: {1}")]
    UndefinedCdRatio(Technique, &'static str),
    #[error("control-display ratio must be positive and finite, got {0}")]
    InvalidCdRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    VirtualHand,
    Portal,
    Homer,
    #[serde(rename = "lo")]
    LinearOffset,
    Teleport,
}

impl Technique {
    pub const ALL: [Technique; 5] = [
        Technique::VirtualHand,
        Technique::Portal,
        Technique::Homer,
        Technique::LinearOffset,
        Technique::Teleport,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::VirtualHand => "virtual_hand",
            Technique::Portal => "portal",
            Technique::Homer => "homer",
            Technique::LinearOffset => "lo",
            Technique::Teleport => "teleport",
        }
    }

    /// Whether selection is done by casting a ray from the controller.
    pub fn selects_by_ray(self) -> bool {
        matches!(self, Technique::Homer)
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Technique::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown technique `{s}`"))
    }
}

/// Control-display ratio: controller displacement over displayed
/// displacement. Values below 1 amplify hand motion.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CdRatio(f64);

impl CdRatio {
    pub const UNIT: CdRatio = CdRatio(1.0);

    pub fn new(value: f64) -> Result<Self, TechniqueError> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(TechniqueError::InvalidCdRatio(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Multiplier from hand motion to displayed motion.
    pub fn gain(self) -> f64 {
        1.0 / self.0
    }
}

/// Technique parameters needed to state a CD ratio without a live state
/// machine.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CdConfig {
    /// Linear Offset gain `k`.
    pub lo_gain: Option<f64>,
    /// Body-to-controller distance at the moment of a HOMER grab.
    pub homer_controller_distance: Option<f64>,
}

/// The CD ratio a technique applies while manipulating a target at
/// `distance_to_target` from the body anchor.
pub fn effective_cd_ratio(
    technique: Technique,
    config: &CdConfig,
    distance_to_target: f64,
) -> Result<CdRatio, TechniqueError> {
    match technique {
        Technique::VirtualHand | Technique::Portal | Technique::Teleport => Ok(CdRatio::UNIT),
        Technique::LinearOffset => {
            let k = config
                .lo_gain
                .ok_or(TechniqueError::UndefinedCdRatio(technique, "uncalibrated"))?;
            CdRatio::new(1.0 / k)
        }
        Technique::Homer => {
            let c = config
                .homer_controller_distance
                .ok_or(TechniqueError::UndefinedCdRatio(technique, "no grab"))?;
            if !(distance_to_target > 0.0) {
                return Err(TechniqueError::UndefinedCdRatio(technique, "target at the body"));
            }
            CdRatio::new(c / distance_to_target)
        }
    }
}

/// Body anchor for arm-extension techniques: the head dropped to chest
/// height, keeping its heading.
pub fn torso_from_head(head: &Pose, chest_height: f64) -> Pose {
    Pose::new(
        Vec3::new(head.position.x, chest_height, head.position.z),
        head.orientation,
    )
}
