//! Headless simulation of remote 3D selection and manipulation techniques
//! (portal clutching, direct HOMER, Linear Offset, virtual hand,
//! teleportation), the pointing and docking tasks used to compare them,
//! simulated participants, repeated-measures statistics and a batch harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod geometry;
pub mod harness;
pub mod portal;
pub mod stats;
pub mod tasks;
pub mod technique;

pub use geometry::{Disc, Pose, Ray, Rotation, Sphere, Tetrahedron, Vec3};
pub use portal::{place_portal, ArmReach, PortalError, PortalPair};
