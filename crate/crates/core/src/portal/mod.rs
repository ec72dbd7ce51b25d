//! The portal widget: a visible primary disc near the user linked to an
//! invisible secondary disc in front of a remote target.
//!
//! Both discs carry an oriented frame (camera convention, local `-z` along
//! the creation ray). The rigid map `secondary ∘ primary⁻¹` carries anything
//! that crosses the primary disc to the remote side with a control-display
//! ratio of exactly 1.
//!
//! The portal camera follows the head through the same map. It is stored as
//! `camera = map ∘ head ∘ eye_offset`; `eye_offset` is identity in position
//! at creation and absorbs relocations and retargets so the camera stays
//! rigidly coupled to the head afterwards.

mod projection;

use crate::geometry::{
    transform_between_frames, transform_point_between_frames, Disc, Pose, Ray, Rotation, Vec3,
};

pub use projection::{Frustum, StereoProjection};

/// Radius of both portal discs, meters.
pub const PORTAL_RADIUS: f64 = 0.6;
/// Primary disc distance from the user, as a fraction of arm reach.
pub const PRIMARY_OFFSET_FRACTION: f64 = 0.5;
/// Secondary disc distance in front of the target, as a fraction of arm reach.
pub const SECONDARY_OFFSET_FRACTION: f64 = 0.25;
/// Portal camera distance in front of the target, as a fraction of arm reach.
pub const CAMERA_OFFSET_FRACTION: f64 = 0.75;
/// Default virtual hand length used for the primary-disc grab band.
pub const DEFAULT_HAND_LENGTH: f64 = 0.18;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PortalError {
    #[error("arm reach {0} m outside [0.3, 1.2] m")]
    InvalidReach(f64),
    #[error("target already within reach ({distance:.3} m < {minimum:.3} m)")]
    TargetWithinReach { distance: f64, minimum: f64 },
    #[error("portal not open")]
    NotOpen,
    #[error("viewer behind portal")]
    ViewerBehindPortal,
    #[error("portal relocation is disabled for this experiment")]
    RelocationDisabled,
    #[error("invalid projection parameters: {0}")]
    InvalidProjection(String),
}

/// The user's arm reach `R`, meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct ArmReach(f64);

impl ArmReach {
    pub const MIN: f64 = 0.3;
    pub const MAX: f64 = 1.2;

    pub fn new(meters: f64) -> Result<Self, PortalError> {
        if (Self::MIN..=Self::MAX).contains(&meters) {
            Ok(Self(meters))
        } else {
            Err(PortalError::InvalidReach(meters))
        }
    }

    pub fn meters(self) -> f64 {
        self.0
    }
}

/// Per-experiment switches for the optional portal functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortalFeatures {
    pub relocation: bool,
    pub passthrough: bool,
}

impl Default for PortalFeatures {
    fn default() -> Self {
        Self {
            relocation: true,
            passthrough: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortalPair {
    primary_frame: Pose,
    secondary_frame: Pose,
    portal_camera: Pose,
    head: Pose,
    eye_offset: Pose,
    target_point: Vec3,
    creation_ray: Ray,
    arm_reach: ArmReach,
    open: bool,
    features: PortalFeatures,
}

/// A hand tested against the primary disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemoteHand {
    pub local_hand: Pose,
    /// Remote copy of the hand; present only for hands through the disc.
    pub remote_pose: Option<Pose>,
    /// Signed distance past the primary disc plane, positive = through.
    pub penetration_depth: f64,
    /// Whether the hand is laterally within the disc radius.
    pub inside_aperture: bool,
}

impl RemoteHand {
    /// The "halfway through" band that arms a grab of the primary disc.
    pub fn can_grab_primary(&self, hand_length: f64) -> bool {
        self.inside_aperture
            && (0.4 * hand_length..=0.6 * hand_length).contains(&self.penetration_depth)
    }
}

/// The two independently computed sides of the depth identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceivedDistance {
    /// Distance from the viewer's eye to the target's image behind the
    /// primary disc.
    pub through_portal: f64,
    /// Distance from the portal camera to the real target.
    pub camera_to_target: f64,
}

fn portal_orientation(direction: Vec3) -> Rotation {
    Rotation::look_rotation(direction, Vec3::UP)
}

/// Opens a portal pair from a ray hit on a remote target.
///
/// `user` is the head pose at the moment of the trigger click.
pub fn place_portal(
    user: &Pose,
    hand_ray: &Ray,
    target_hit: Vec3,
    reach: ArmReach,
) -> Result<PortalPair, PortalError> {
    let r = reach.meters();
    let distance = user.position.distance(target_hit);
    let minimum = CAMERA_OFFSET_FRACTION * r;
    if distance < minimum {
        return Err(PortalError::TargetWithinReach { distance, minimum });
    }
    let d = hand_ray.direction();
    let orientation = portal_orientation(d);
    let primary_frame = Pose::new(user.position + d * (PRIMARY_OFFSET_FRACTION * r), orientation);
    let secondary_frame = Pose::new(target_hit - d * (SECONDARY_OFFSET_FRACTION * r), orientation);
    let portal_camera = Pose::new(target_hit - d * (CAMERA_OFFSET_FRACTION * r), orientation);

    let mut pair = PortalPair {
        primary_frame,
        secondary_frame,
        portal_camera,
        head: *user,
        eye_offset: Pose::IDENTITY,
        target_point: target_hit,
        creation_ray: *hand_ray,
        arm_reach: reach,
        open: true,
        features: PortalFeatures::default(),
    };
    pair.eye_offset = pair.eye_offset_for(&portal_camera);
    Ok(pair)
}

impl PortalPair {
    pub fn with_features(mut self, features: PortalFeatures) -> Self {
        self.features = features;
        self
    }

    pub fn features(&self) -> PortalFeatures {
        self.features
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn primary_frame(&self) -> &Pose {
        &self.primary_frame
    }

    pub fn secondary_frame(&self) -> &Pose {
        &self.secondary_frame
    }

    pub fn primary_disc(&self) -> Disc {
        frame_disc(&self.primary_frame)
    }

    /// The invisible remote disc.
    pub fn secondary_disc(&self) -> Disc {
        frame_disc(&self.secondary_frame)
    }

    pub fn portal_camera(&self) -> &Pose {
        &self.portal_camera
    }

    pub fn target_point(&self) -> Vec3 {
        self.target_point
    }

    pub fn creation_ray(&self) -> &Ray {
        &self.creation_ray
    }

    pub fn arm_reach(&self) -> ArmReach {
        self.arm_reach
    }

    /// Last head pose the camera was coupled to.
    pub fn head(&self) -> &Pose {
        &self.head
    }

    /// The rigid map from the user's side of the portal to the remote side.
    pub fn local_to_remote(&self) -> Pose {
        self.secondary_frame.compose(&self.primary_frame.inverse())
    }

    fn eye_offset_for(&self, camera: &Pose) -> Pose {
        let on_user_side = transform_between_frames(camera, &self.secondary_frame, &self.primary_frame);
        self.head.inverse().compose(&on_user_side)
    }

    fn ensure_open(&self) -> Result<(), PortalError> {
        if self.open {
            Ok(())
        } else {
            Err(PortalError::NotOpen)
        }
    }

    fn camera_for_head(&self, head: &Pose) -> Pose {
        transform_between_frames(
            &head.compose(&self.eye_offset),
            &self.primary_frame,
            &self.secondary_frame,
        )
    }

    /// The viewer's effective eye on the user's side: the head, displaced by
    /// whatever relocations have accumulated.
    pub fn virtual_eye(&self, head: &Pose) -> Pose {
        head.compose(&self.eye_offset)
    }

    /// Moves the portal camera rigidly with the head.
    pub fn update_portal_camera(&self, head: &Pose) -> Result<PortalPair, PortalError> {
        self.ensure_open()?;
        let mut next = self.clone();
        next.head = *head;
        next.portal_camera = self.camera_for_head(head);
        Ok(next)
    }

    /// Returns both sides of the depth identity for the given head pose.
    pub fn perceived_target_distance(&self, head: &Pose) -> Result<PerceivedDistance, PortalError> {
        self.ensure_open()?;
        let camera = self.camera_for_head(head);
        let image = transform_point_between_frames(
            self.target_point,
            &self.secondary_frame,
            &self.primary_frame,
        );
        Ok(PerceivedDistance {
            through_portal: self.virtual_eye(head).position.distance(image),
            camera_to_target: camera.position.distance(self.target_point),
        })
    }

    /// Tests a hand against the primary disc and, if it is through the
    /// aperture, places its remote copy.
    pub fn map_hand_through_portal(&self, hand: &Pose) -> Result<RemoteHand, PortalError> {
        self.ensure_open()?;
        let local = self.primary_frame.inverse_transform_point(hand.position);
        // Local +z faces the user, so crossing the disc means negative z.
        let penetration_depth = -local.z;
        let lateral = (local.x * local.x + local.y * local.y).sqrt();
        let inside_aperture = lateral <= PORTAL_RADIUS;
        let remote_pose = (penetration_depth > 0.0 && inside_aperture).then(|| {
            transform_between_frames(hand, &self.primary_frame, &self.secondary_frame)
        });
        Ok(RemoteHand {
            local_hand: *hand,
            remote_pose,
            penetration_depth,
            inside_aperture,
        })
    }

    /// Moves the primary disc by the world-space rigid motion `grab_delta`.
    ///
    /// The secondary disc and portal camera receive the same motion carried
    /// through the portal map, so the map itself is unchanged and hands keep
    /// landing where they did. The camera, being attached to the secondary
    /// disc, swings with it and the view through the portal changes.
    pub fn relocate_portal(&self, grab_delta: &Pose) -> Result<PortalPair, PortalError> {
        self.ensure_open()?;
        if !self.features.relocation {
            return Err(PortalError::RelocationDisabled);
        }
        let map = self.local_to_remote();
        let remote_delta = map.compose(grab_delta).compose(&map.inverse());

        let mut next = self.clone();
        next.primary_frame = grab_delta.compose(&self.primary_frame);
        next.secondary_frame = remote_delta.compose(&self.secondary_frame);
        next.portal_camera = remote_delta.compose(&self.camera_for_head(&self.head));
        next.eye_offset = next.eye_offset_for(&next.portal_camera);
        Ok(next)
    }

    /// Whether a ray aimed by the user passes through the primary disc.
    pub fn aims_through_portal(&self, ray: &Ray) -> bool {
        crate::geometry::ray_disc_intersect(ray, &self.primary_disc()).is_some()
    }

    /// Repeats the portal operation. Aimed inside the portal view at a new
    /// object it moves only the secondary disc and camera to the new target;
    /// anything else closes the portal.
    pub fn retarget_or_close(
        &self,
        scene_hit: Option<Vec3>,
        hit_was_inside_portal_view: bool,
    ) -> PortalPair {
        let mut next = self.clone();
        let new_target = match (self.open, scene_hit, hit_was_inside_portal_view) {
            (true, Some(t), true) => t,
            _ => {
                next.open = false;
                return next;
            }
        };
        let r = self.arm_reach.meters();
        let forward = self.secondary_frame.orientation.forward();
        let orientation = self.secondary_frame.orientation;
        next.target_point = new_target;
        next.secondary_frame = Pose::new(new_target - forward * (SECONDARY_OFFSET_FRACTION * r), orientation);
        next.portal_camera = Pose::new(new_target - forward * (CAMERA_OFFSET_FRACTION * r), orientation);
        next.eye_offset = next.eye_offset_for(&next.portal_camera);
        next
    }

    /// Off-axis stereo frusta for the portal camera's two eyes, bounded by
    /// the remote image of the primary disc.
    pub fn stereo_projection_for_portal(
        &self,
        head: &Pose,
        ipd: f64,
        near: f64,
        far: f64,
    ) -> Result<StereoProjection, PortalError> {
        self.ensure_open()?;
        projection::portal_stereo(self, head, ipd, near, far)
    }
}

fn frame_disc(frame: &Pose) -> Disc {
    Disc::new(frame.position, frame.orientation.rotate(Vec3::Z), PORTAL_RADIUS)
        .expect("portal radius is positive")
}
