use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitBall};

use crate::geometry::{Pose, Rotation, Tetrahedron, Vec3, VertexColor};

use super::TaskError;

pub const DOCKING_EDGE: f64 = 0.5;
/// Per-vertex alignment tolerance, meters.
pub const DOCKING_TOLERANCE: f64 = 0.045;
/// Target centroids spawn within this distance of the dock, meters.
pub const SPAWN_RADIUS: f64 = 0.5;

/// Uniformly distributed rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        if let Some(r) = Rotation::from_quaternion(q[0], q[1], q[2], q[3]) {
            return r;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DockingTrial {
    pub dock: Tetrahedron,
    pub target: Tetrahedron,
    pub dock_pose: Pose,
    pub target_pose: Pose,
    pub tolerance: f64,
}

impl DockingTrial {
    /// Dock at `dock_pose`; the target is placed uniformly within
    /// `SPAWN_RADIUS` of it with a uniformly random orientation.
    pub fn spawn<R: Rng + ?Sized>(dock_pose: &Pose, rng: &mut R) -> Self {
        let offset: [f64; 3] = UnitBall.sample(rng);
        let target_pose = Pose::new(
            dock_pose.position + Vec3::from_array(offset) * SPAWN_RADIUS,
            random_rotation(rng),
        );
        Self {
            dock: Tetrahedron::regular(dock_pose, DOCKING_EDGE).expect("positive edge"),
            target: Tetrahedron::regular(&target_pose, DOCKING_EDGE).expect("positive edge"),
            dock_pose: *dock_pose,
            target_pose,
            tolerance: DOCKING_TOLERANCE,
        }
    }

    /// The dock after being moved to `pose`.
    pub fn dock_at(&self, pose: &Pose) -> Tetrahedron {
        Tetrahedron::regular(pose, DOCKING_EDGE).expect("positive edge")
    }
}

/// Distances between label-matched vertices, in `VertexColor::ALL` order.
pub fn vertex_errors(dock: &Tetrahedron, target: &Tetrahedron) -> Result<[f64; 4], TaskError> {
    let mut out = [0.0; 4];
    for (slot, label) in out.iter_mut().zip(VertexColor::ALL) {
        let a = dock.vertex(label).ok_or(TaskError::MismatchedLabels)?;
        let b = target.vertex(label).ok_or(TaskError::MismatchedLabels)?;
        *slot = a.distance(b);
    }
    Ok(out)
}

/// Sum of the four label-matched vertex distances.
pub fn docking_error(dock: &Tetrahedron, target: &Tetrahedron) -> Result<f64, TaskError> {
    Ok(vertex_errors(dock, target)?.iter().sum())
}

/// Every label-matched vertex pair within `tolerance`.
pub fn is_docked(dock: &Tetrahedron, target: &Tetrahedron, tolerance: f64) -> Result<bool, TaskError> {
    Ok(vertex_errors(dock, target)?.iter().all(|&d| d <= tolerance))
}
