use serde::{Deserialize, Serialize};

use super::{GeometryError, Pose, Rotation, Vec3};

/// Half-line with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    origin: Vec3,
    direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self, GeometryError> {
        if !origin.is_finite() {
            return Err(GeometryError::NonFinite("ray origin"));
        }
        let direction = direction
            .try_normalize()
            .ok_or(GeometryError::ZeroDirection)?;
        Ok(Self { origin, direction })
    }

    pub fn through(origin: Vec3, point: Vec3) -> Result<Self, GeometryError> {
        Self::new(origin, point - origin)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Vec3,
    normal: Vec3,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Vec3, normal: Vec3, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        let normal = normal.try_normalize().ok_or(GeometryError::ZeroDirection)?;
        Ok(Self {
            center,
            normal,
            radius,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    /// Signed distance of `p` from the disc plane, positive on the normal side.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.center).dot(self.normal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.distance(self.center) <= self.radius
    }
}

/// Color label carried by each tetrahedron vertex; vertex correspondence
/// between two tetrahedra is established by label, not by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexColor {
    Red,
    Green,
    Blue,
    Yellow,
}

impl VertexColor {
    pub const ALL: [VertexColor; 4] = [
        VertexColor::Red,
        VertexColor::Green,
        VertexColor::Blue,
        VertexColor::Yellow,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrahedron {
    vertices: [Vec3; 4],
    labels: [VertexColor; 4],
}

impl Tetrahedron {
    /// Unit-circumradius reference vertices, centroid at the origin.
    fn reference_vertices() -> [Vec3; 4] {
        let s = 1.0 / 3f64.sqrt();
        [
            Vec3::new(1.0, 1.0, 1.0) * s,
            Vec3::new(1.0, -1.0, -1.0) * s,
            Vec3::new(-1.0, 1.0, -1.0) * s,
            Vec3::new(-1.0, -1.0, 1.0) * s,
        ]
    }

    /// Regular tetrahedron with the given edge length placed at `pose`
    /// (pose position is the centroid).
    pub fn regular(pose: &Pose, edge: f64) -> Result<Self, GeometryError> {
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(GeometryError::NonPositiveRadius(edge));
        }
        let circumradius = edge * (3.0f64 / 8.0).sqrt();
        let vertices = Self::reference_vertices().map(|v| pose.transform_point(v * circumradius));
        Ok(Self {
            vertices,
            labels: VertexColor::ALL,
        })
    }

    pub fn from_vertices(vertices: [Vec3; 4], labels: [VertexColor; 4]) -> Self {
        Self { vertices, labels }
    }

    pub fn vertices(&self) -> &[Vec3; 4] {
        &self.vertices
    }

    pub fn labels(&self) -> &[VertexColor; 4] {
        &self.labels
    }

    pub fn vertex(&self, label: VertexColor) -> Option<Vec3> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.vertices[i])
    }

    pub fn centroid(&self) -> Vec3 {
        self.vertices.iter().fold(Vec3::ZERO, |a, &v| a + v) / 4.0
    }

    pub fn edge_lengths(&self) -> [f64; 6] {
        let v = &self.vertices;
        [
            v[0].distance(v[1]),
            v[0].distance(v[2]),
            v[0].distance(v[3]),
            v[1].distance(v[2]),
            v[1].distance(v[3]),
            v[2].distance(v[3]),
        ]
    }

    pub fn volume(&self) -> f64 {
        let v = &self.vertices;
        ((v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0])) / 6.0).abs()
    }

    pub fn is_regular(&self, tol: f64) -> bool {
        let e = self.edge_lengths();
        e.iter().all(|&l| (l - e[0]).abs() <= tol) && self.volume() > 0.0
    }

    /// Applies a rigid transform to every vertex.
    pub fn transformed(&self, pose: &Pose) -> Tetrahedron {
        Tetrahedron {
            vertices: self.vertices.map(|v| pose.transform_point(v)),
            labels: self.labels,
        }
    }
}

/// Rotation that carries the reference tetrahedron frame onto itself while
/// permuting three vertices: a third of a turn about the axis through the
/// first vertex.
pub fn third_turn_about_first_vertex(t: &Tetrahedron) -> Pose {
    let c = t.centroid();
    let axis = t.vertices()[0] - c;
    Pose::rotation_about(c, Rotation::from_axis_angle(axis, 2.0 * std::f64::consts::PI / 3.0))
}
