use crate::geometry::{transform_between_frames, Pose, Vec3};

use super::{PortalError, PortalPair, PORTAL_RADIUS};

/// Off-axis frustum bounds at the near plane, in the eye frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frustum {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
    pub near: f64,
    pub far: f64,
}

impl Frustum {
    /// Bounds of the square that circumscribes a disc of `radius`, seen from
    /// `eye_local` (eye position in the disc frame, local `+z` toward the
    /// viewer) with the near plane parallel to the disc.
    pub fn bounding_disc(eye_local: Vec3, radius: f64, near: f64, far: f64) -> Option<Frustum> {
        let dist = eye_local.z;
        if dist <= 0.0 {
            return None;
        }
        let s = near / dist;
        Some(Frustum {
            left: (-radius - eye_local.x) * s,
            right: (radius - eye_local.x) * s,
            bottom: (-radius - eye_local.y) * s,
            top: (radius - eye_local.y) * s,
            near,
            far,
        })
    }

    /// OpenGL-style projection matrix, row-major.
    pub fn projection_matrix(&self) -> [[f64; 4]; 4] {
        let (l, r, b, t, n, f) = (self.left, self.right, self.bottom, self.top, self.near, self.far);
        [
            [2.0 * n / (r - l), 0.0, (r + l) / (r - l), 0.0],
            [0.0, 2.0 * n / (t - b), (t + b) / (t - b), 0.0],
            [0.0, 0.0, -(f + n) / (f - n), -2.0 * f * n / (f - n)],
            [0.0, 0.0, -1.0, 0.0],
        ]
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.right - self.left)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoProjection {
    pub left: Frustum,
    pub right: Frustum,
    /// Portal-camera eye poses, oriented with the secondary disc so the near
    /// plane is parallel to it.
    pub left_eye: Pose,
    pub right_eye: Pose,
    /// Half the interpupillary distance.
    pub eye_offset: f64,
}

/// Main-view eye poses for a head: `head ∘ (±ipd/2 along x) ∘ eye_offset`.
pub(super) fn main_view_eyes(pair: &PortalPair, head: &Pose, ipd: f64) -> [Pose; 2] {
    let half = 0.5 * ipd;
    [-half, half].map(|dx| {
        head.compose(&Pose::from_position(Vec3::new(dx, 0.0, 0.0)))
            .compose(&pair.eye_offset)
    })
}

pub(super) fn portal_stereo(
    pair: &PortalPair,
    head: &Pose,
    ipd: f64,
    near: f64,
    far: f64,
) -> Result<StereoProjection, PortalError> {
    if !(0.0..=0.08).contains(&ipd) {
        return Err(PortalError::InvalidProjection(format!("ipd {ipd} m outside [0, 0.08]")));
    }
    if !(near > 0.0 && far > near && far.is_finite()) {
        return Err(PortalError::InvalidProjection(format!("near {near}, far {far}")));
    }
    let secondary = pair.secondary_frame;
    let [left_main, right_main] = main_view_eyes(pair, head, ipd);
    let frustum_for = |main_eye: &Pose| -> Result<(Frustum, Pose), PortalError> {
        let remote_eye = transform_between_frames(main_eye, &pair.primary_frame, &secondary);
        let local = secondary.inverse_transform_point(remote_eye.position);
        let frustum = Frustum::bounding_disc(local, PORTAL_RADIUS, near, far)
            .ok_or(PortalError::ViewerBehindPortal)?;
        Ok((frustum, Pose::new(remote_eye.position, secondary.orientation)))
    };
    let (left, left_eye) = frustum_for(&left_main)?;
    let (right, right_eye) = frustum_for(&right_main)?;
    Ok(StereoProjection {
        left,
        right,
        left_eye,
        right_eye,
        eye_offset: 0.5 * ipd,
    })
}
