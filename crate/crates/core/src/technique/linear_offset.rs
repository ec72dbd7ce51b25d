use crate::geometry::Pose;
use crate::portal::ArmReach;

use super::{CdRatio, TechniqueError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearOffsetCalibration {
    /// Distance from the room center to its walls, meters.
    pub room_half_extent: f64,
    pub reach: ArmReach,
}

/// Linear Offset: a fixed gain `k` from body-to-controller offset to
/// body-to-cursor offset, calibrated so a fully extended arm reaches the
/// room walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearOffsetState {
    k: f64,
    calibration: LinearOffsetCalibration,
}

impl LinearOffsetState {
    pub fn calibrate(room_half_extent: f64, reach: ArmReach) -> Result<Self, TechniqueError> {
        if !(room_half_extent > 0.0 && room_half_extent.is_finite()) {
            return Err(TechniqueError::InvalidCalibration(format!(
                "room half extent {room_half_extent} m"
            )));
        }
        Ok(Self {
            k: room_half_extent / reach.meters(),
            calibration: LinearOffsetCalibration {
                room_half_extent,
                reach,
            },
        })
    }

    pub fn gain(&self) -> f64 {
        self.k
    }

    pub fn calibration(&self) -> &LinearOffsetCalibration {
        &self.calibration
    }

    pub fn cd_ratio(&self) -> CdRatio {
        CdRatio::new(1.0 / self.k).expect("calibrated gain is positive")
    }

    pub fn map(&self, user: &Pose, controller: &Pose) -> Pose {
        let offset = controller.position - user.position;
        Pose::new(user.position + offset * self.k, controller.orientation)
    }

    /// Controller position that puts the cursor at `cursor`.
    pub fn controller_for(&self, user: &Pose, cursor: crate::geometry::Vec3) -> crate::geometry::Vec3 {
        user.position + (cursor - user.position) / self.k
    }
}
