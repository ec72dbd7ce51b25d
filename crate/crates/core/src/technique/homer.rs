use crate::geometry::{Pose, Vec3};

use super::{CdRatio, TechniqueError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomerPhase {
    Idle,
    Aiming,
    Grabbing,
}

/// Anchors captured at the moment of a grab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomerGrab {
    /// `dist(user, object) / dist(user, controller)` at grab time.
    pub scale: f64,
    pub user: Pose,
    pub controller: Pose,
    /// Virtual hand pose at grab: on the object, oriented with the controller.
    pub hand: Pose,
}

/// Direct HOMER: ray selection, then the virtual hand jumps to the object
/// and follows controller displacement scaled by the grab-time distance
/// ratio. Rotation is tracked one-to-one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomerState {
    phase: HomerPhase,
    grab: Option<HomerGrab>,
}

impl Default for HomerState {
    fn default() -> Self {
        Self::new()
    }
}

impl HomerState {
    pub fn new() -> Self {
        Self {
            phase: HomerPhase::Idle,
            grab: None,
        }
    }

    pub fn phase(&self) -> HomerPhase {
        self.phase
    }

    pub fn grab_anchor(&self) -> Option<&HomerGrab> {
        self.grab.as_ref()
    }

    /// Trackpad press: the selection ray appears.
    pub fn begin_aiming(&mut self) {
        if self.phase == HomerPhase::Idle {
            self.phase = HomerPhase::Aiming;
        }
    }

    /// Trigger on a ray hit. Returns the virtual hand pose, which sits
    /// exactly on the hit object.
    pub fn grab(
        &mut self,
        user: &Pose,
        controller: &Pose,
        ray_hit_object_center: Option<Vec3>,
    ) -> Result<Pose, TechniqueError> {
        if self.phase != HomerPhase::Aiming {
            return Err(TechniqueError::NotAiming);
        }
        let object = ray_hit_object_center.ok_or(TechniqueError::NothingSelected)?;
        let reach = user.position.distance(controller.position);
        if reach < 1e-9 {
            return Err(TechniqueError::DegenerateGrab);
        }
        let scale = user.position.distance(object) / reach;
        let hand = Pose::new(object, controller.orientation);
        self.grab = Some(HomerGrab {
            scale,
            user: *user,
            controller: *controller,
            hand,
        });
        self.phase = HomerPhase::Grabbing;
        Ok(hand)
    }

    /// Virtual hand pose for the current body and controller poses.
    pub fn track(&self, user: &Pose, controller: &Pose) -> Result<Pose, TechniqueError> {
        let g = self.grab.as_ref().filter(|_| self.phase == HomerPhase::Grabbing);
        let g = g.ok_or(TechniqueError::NotGrabbing)?;
        let reach_now = controller.position - user.position;
        let reach_then = g.controller.position - g.user.position;
        let position = g.hand.position + (reach_now - reach_then) * g.scale;
        Ok(Pose::new(position, controller.orientation))
    }

    /// Pose of an object rigidly attached to the hand at grab time.
    pub fn carried_object(&self, hand_now: &Pose, object_at_grab: &Pose) -> Result<Pose, TechniqueError> {
        let g = self.grab.as_ref().ok_or(TechniqueError::NotGrabbing)?;
        Ok(hand_now.compose(&g.hand.inverse().compose(object_at_grab)))
    }

    /// Ends the interaction; the hand returns to the controller.
    pub fn release(&mut self, controller: &Pose) -> Pose {
        self.phase = HomerPhase::Idle;
        self.grab = None;
        *controller
    }

    pub fn cd_ratio(&self) -> Result<CdRatio, TechniqueError> {
        match (&self.grab, self.phase) {
            (Some(g), HomerPhase::Grabbing) => CdRatio::new(1.0 / g.scale),
            _ => Err(TechniqueError::NotGrabbing),
        }
    }
}
