use crate::geometry::{Pose, Vec3};

use super::TechniqueError;

/// Total fade duration, seconds; the move happens at the midpoint.
pub const DEFAULT_FADE_DURATION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeleportPhase {
    Idle,
    Aiming,
    FadingOut,
    FadingIn,
}

/// Timetable and endpoints of one teleport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportPlan {
    pub fade_out_start: f64,
    pub switch_time: f64,
    pub fade_in_end: f64,
    pub from: Pose,
    pub to: Pose,
}

impl TeleportPlan {
    /// User pose at time `t`.
    pub fn pose_at(&self, t: f64) -> Pose {
        if t < self.switch_time {
            self.from
        } else {
            self.to
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportState {
    phase: TeleportPhase,
    fade_duration: f64,
    pending: Option<TeleportPlan>,
}

impl Default for TeleportState {
    fn default() -> Self {
        Self::new(DEFAULT_FADE_DURATION)
    }
}

impl TeleportState {
    pub fn new(fade_duration: f64) -> Self {
        Self {
            phase: TeleportPhase::Idle,
            fade_duration: fade_duration.max(0.0),
            pending: None,
        }
    }

    pub fn phase(&self) -> TeleportPhase {
        self.phase
    }

    pub fn fade_duration(&self) -> f64 {
        self.fade_duration
    }

    pub fn pending(&self) -> Option<&TeleportPlan> {
        self.pending.as_ref()
    }

    pub fn begin_aiming(&mut self) {
        if self.phase == TeleportPhase::Idle {
            self.phase = TeleportPhase::Aiming;
        }
    }

    /// Trigger on a floor hit: schedules fade out, the move, and fade in.
    /// Only the horizontal position changes.
    pub fn execute(
        &mut self,
        user: &Pose,
        landing: Option<Vec3>,
        now: f64,
    ) -> Result<TeleportPlan, TechniqueError> {
        if self.phase != TeleportPhase::Aiming {
            return Err(TechniqueError::NotAiming);
        }
        let landing = landing.ok_or(TechniqueError::NoFloorHit)?;
        let to = Pose::new(
            Vec3::new(landing.x, user.position.y, landing.z),
            user.orientation,
        );
        let plan = TeleportPlan {
            fade_out_start: now,
            switch_time: now + 0.5 * self.fade_duration,
            fade_in_end: now + self.fade_duration,
            from: *user,
            to,
        };
        self.pending = Some(plan);
        self.phase = TeleportPhase::FadingOut;
        Ok(plan)
    }

    /// Advances the fade phases to time `t`; returns the user pose then.
    pub fn advance(&mut self, t: f64) -> Option<Pose> {
        let plan = self.pending?;
        if t >= plan.fade_in_end {
            self.phase = TeleportPhase::Idle;
            self.pending = None;
        } else if t >= plan.switch_time {
            self.phase = TeleportPhase::FadingIn;
        }
        Some(plan.pose_at(t))
    }
}
