use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::Vec3;

/// Unit quaternion, canonicalized to `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Default for Rotation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Normalizes and canonicalizes an arbitrary quaternion. Returns `None`
    /// for a zero or non-finite input.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && n > 1e-300) {
            return None;
        }
        let s = if w < 0.0 { -1.0 / n } else { 1.0 / n };
        Some(Self {
            w: w * s,
            x: x * s,
            y: y * s,
            z: z * s,
        })
    }

    fn renormalized(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self::from_quaternion(w, x, y, z).unwrap_or(Self::IDENTITY)
    }

    pub fn wxyz(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Right-handed rotation by `angle` radians about `axis`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let Some(a) = axis.try_normalize() else {
            return Self::IDENTITY;
        };
        let (s, c) = (angle * 0.5).sin_cos();
        Self::renormalized(c, a.x * s, a.y * s, a.z * s)
    }

    /// Exponential map: rotation by `|v|` radians about `v`.
    pub fn from_scaled_axis(v: Vec3) -> Self {
        let angle = v.norm();
        if angle < 1e-300 {
            return Self::IDENTITY;
        }
        Self::from_axis_angle(v / angle, angle)
    }

    /// Inverse of [`Rotation::from_scaled_axis`], angle in `[0, pi]`.
    pub fn to_scaled_axis(self) -> Vec3 {
        let v = Vec3::new(self.x, self.y, self.z);
        let s = v.norm();
        if s < 1e-300 {
            return Vec3::ZERO;
        }
        let angle = 2.0 * s.atan2(self.w);
        v * (angle / s)
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(self) -> f64 {
        let v = Vec3::new(self.x, self.y, self.z).norm();
        2.0 * v.atan2(self.w)
    }

    /// Angle of the relative rotation between `self` and `other`.
    pub fn angle_to(self, other: Rotation) -> f64 {
        (self.inverse() * other).angle()
    }

    /// From an orthonormal right-handed basis given as matrix columns.
    pub fn from_basis(x_axis: Vec3, y_axis: Vec3, z_axis: Vec3) -> Self {
        let (m00, m10, m20) = (x_axis.x, x_axis.y, x_axis.z);
        let (m01, m11, m21) = (y_axis.x, y_axis.y, y_axis.z);
        let (m02, m12, m22) = (z_axis.x, z_axis.y, z_axis.z);
        let trace = m00 + m11 + m22;
        if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Self::renormalized(0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s)
        } else if m00 > m11 && m00 > m22 {
            let s = (1.0 + m00 - m11 - m22).sqrt() * 2.0;
            Self::renormalized((m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s)
        } else if m11 > m22 {
            let s = (1.0 + m11 - m00 - m22).sqrt() * 2.0;
            Self::renormalized((m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s)
        } else {
            let s = (1.0 + m22 - m00 - m11).sqrt() * 2.0;
            Self::renormalized((m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s)
        }
    }

    /// Camera-style orientation whose local `-z` points along `forward` and
    /// whose local `+y` is as close to `up` as possible. Falls back to another
    /// up vector when `forward` is parallel to `up`.
    pub fn look_rotation(forward: Vec3, up: Vec3) -> Self {
        let Some(f) = forward.try_normalize() else {
            return Self::IDENTITY;
        };
        let back = -f;
        let right = up
            .cross(back)
            .try_normalize()
            .or_else(|| Vec3::Z.cross(back).try_normalize())
            .unwrap_or_else(|| Vec3::X.cross(back).try_normalize().unwrap_or(Vec3::X));
        let true_up = back.cross(right);
        Self::from_basis(right, true_up, back)
    }

    pub fn inverse(self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    pub fn right(self) -> Vec3 {
        self.rotate(Vec3::X)
    }

    pub fn up(self) -> Vec3 {
        self.rotate(Vec3::Y)
    }

    /// Local `-z`.
    pub fn forward(self) -> Vec3 {
        self.rotate(-Vec3::Z)
    }

    /// Spherical interpolation along the shortest arc.
    pub fn slerp(self, other: Rotation, t: f64) -> Rotation {
        let delta = (self.inverse() * other).to_scaled_axis();
        self * Rotation::from_scaled_axis(delta * t)
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, o: Rotation) -> Rotation {
        Rotation::renormalized(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<Vec3> for Rotation {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        self.rotate(v)
    }
}
