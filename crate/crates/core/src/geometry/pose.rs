use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::{Rotation, Vec3};

/// Rigid transform: rotate, then translate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Rotation,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        position: Vec3::ZERO,
        orientation: Rotation::IDENTITY,
    };

    pub const fn new(position: Vec3, orientation: Rotation) -> Self {
        Self {
            position,
            orientation,
        }
    }

    pub const fn from_position(position: Vec3) -> Self {
        Self::new(position, Rotation::IDENTITY)
    }

    pub const fn from_rotation(orientation: Rotation) -> Self {
        Self::new(Vec3::ZERO, orientation)
    }

    /// Rotation by `rotation` about the world-space `pivot`.
    pub fn rotation_about(pivot: Vec3, rotation: Rotation) -> Self {
        Self::new(pivot - rotation.rotate(pivot), rotation)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            position: self.position + self.orientation.rotate(other.position),
            orientation: self.orientation * other.orientation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.inverse();
        Pose {
            position: -inv.rotate(self.position),
            orientation: inv,
        }
    }

    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        self.position + self.orientation.rotate(p)
    }

    pub fn transform_vector(&self, v: Vec3) -> Vec3 {
        self.orientation.rotate(v)
    }

    /// Maps a world point into this frame's local coordinates.
    pub fn inverse_transform_point(&self, p: Vec3) -> Vec3 {
        self.orientation.inverse().rotate(p - self.position)
    }

    pub fn translated(&self, delta: Vec3) -> Pose {
        Pose::new(self.position + delta, self.orientation)
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, o: Pose) -> Pose {
        self.compose(&o)
    }
}

/// Re-expresses `p` by carrying it rigidly from `from_frame` to `to_frame`:
/// `to_frame ∘ from_frame⁻¹ ∘ p`.
pub fn transform_between_frames(p: &Pose, from_frame: &Pose, to_frame: &Pose) -> Pose {
    to_frame.compose(&from_frame.inverse()).compose(p)
}

/// Point version of [`transform_between_frames`].
pub fn transform_point_between_frames(p: Vec3, from_frame: &Pose, to_frame: &Pose) -> Vec3 {
    to_frame.transform_point(from_frame.inverse_transform_point(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn same_frames_leave_pose_unchanged() {
        let p = Pose::new(
            Vec3::new(1.0, 2.0, 3.0),
            Rotation::from_axis_angle(Vec3::X, 0.4),
        );
        let f = Pose::new(Vec3::new(-3.0, 0.5, 2.0), Rotation::from_axis_angle(Vec3::Y, 1.1));
        let q = transform_between_frames(&p, &f, &f);
        assert!(q.position.distance(p.position) < 1e-12);
        assert!(q.orientation.angle_to(p.orientation) < 1e-9);
    }

    #[test]
    fn translated_target_frame_shifts_position() {
        let p = Pose::new(Vec3::new(0.2, 1.0, -0.4), Rotation::from_axis_angle(Vec3::Z, 0.3));
        let to = Pose::from_position(Vec3::new(0.0, 0.0, 6.0));
        let q = transform_between_frames(&p, &Pose::IDENTITY, &to);
        assert!(q.position.distance(Vec3::new(0.2, 1.0, 5.6)) < 1e-12);
        assert!(q.orientation.angle_to(p.orientation) < 1e-9);
    }

    #[test]
    fn rotated_source_frame_undoes_its_rotation() {
        // p = (1,0,0) seen from a frame rotated +90° about y lands at the
        // frame-local coordinates, i.e. rotated by -90°: (1,0,0) -> (0,0,1).
        let from = Pose::from_rotation(Rotation::from_axis_angle(Vec3::Y, FRAC_PI_2));
        let p = Pose::from_position(Vec3::new(1.0, 0.0, 0.0));
        let q = transform_between_frames(&p, &from, &Pose::IDENTITY);
        assert!(q.position.distance(Vec3::new(0.0, 0.0, 1.0)) < 1e-12);
        let expected = Rotation::from_axis_angle(Vec3::Y, -FRAC_PI_2);
        assert!(q.orientation.angle_to(expected) < 1e-9);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let p = Pose::new(Vec3::new(4.0, -1.0, 2.5), Rotation::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 2.0));
        let id = p.compose(&p.inverse());
        assert!(id.position.norm() < 1e-12);
        assert!(id.orientation.angle() < 1e-9);
    }

    #[test]
    fn rotation_about_pivot_fixes_pivot() {
        let pivot = Vec3::new(1.0, 2.0, 3.0);
        let m = Pose::rotation_about(pivot, Rotation::from_axis_angle(Vec3::Y, 0.7));
        assert!(m.transform_point(pivot).distance(pivot) < 1e-12);
    }
}
