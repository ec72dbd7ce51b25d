//! Vectors, rotations, rigid poses, primitive shapes and the intersection
//! tests shared by every technique and task.
//!
//! Conventions: right-handed, `+y` up, meters. Oriented frames follow the
//! camera convention: local `-z` is forward, `+x` right, `+y` up.

mod intersect;
mod pose;
mod rotation;
mod shapes;
mod vec3;

pub use intersect::{ray_disc_intersect, ray_sphere_intersect, teleport_arc_ground_hit, GRAVITY};
pub use pose::{transform_between_frames, transform_point_between_frames, Pose};
pub use rotation::Rotation;
pub use shapes::{third_turn_about_first_vertex, Disc, Ray, Sphere, Tetrahedron, VertexColor};
pub use vec3::Vec3;

/// Tolerance for exact algebra.
pub const EXACT_TOL: f64 = 1e-9;
/// Tolerance for constructed geometry.
pub const CONSTRUCTED_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("direction vector has zero length")]
    ZeroDirection,
    #[error("radius or length must be positive and finite, got {0}")]
    NonPositiveRadius(f64),
    #[error("{0} is not finite")]
    NonFinite(&'static str),
}
