use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erf;

use crate::geometry::{ray_sphere_intersect, Ray, Rotation, Sphere, Vec3};

/// Miss probability of a ray aimed at the center of a sphere of `radius`
/// at `distance`, with Gaussian direction error `sigma` per axis. The hit
/// cone has half-angle `asin(radius / distance)`.
pub fn ray_miss_probability(sigma: f64, radius: f64, distance: f64) -> f64 {
    if distance <= radius {
        return 0.0;
    }
    if sigma <= 0.0 {
        return 0.0;
    }
    let alpha = (radius / distance).asin();
    (-alpha * alpha / (2.0 * sigma * sigma)).exp()
}

/// Miss probability of a point placed at a sphere's center with isotropic
/// Gaussian error `sigma` per axis.
pub fn hover_miss_probability(sigma: f64, radius: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let x = radius / sigma;
    let inside = erf(x / std::f64::consts::SQRT_2)
        - (2.0 / std::f64::consts::PI).sqrt() * x * (-0.5 * x * x).exp();
    (1.0 - inside).clamp(0.0, 1.0)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Casts a jittered ray from `origin` toward `aim_point` and returns the
/// nearest sphere hit, as an index into `spheres`.
pub fn sample_ray_hit<R: Rng + ?Sized>(
    rng: &mut R,
    origin: Vec3,
    aim_point: Vec3,
    sigma: f64,
    spheres: &[Sphere],
) -> Option<usize> {
    let dir = (aim_point - origin).try_normalize()?;
    let u = dir.any_perpendicular();
    let v = dir.cross(u);
    let (a, b) = (normal(rng) * sigma, normal(rng) * sigma);
    let tilt = Rotation::from_scaled_axis(u * a + v * b);
    let ray = Ray::new(origin, tilt.rotate(dir)).ok()?;
    spheres
        .iter()
        .enumerate()
        .filter_map(|(i, s)| ray_sphere_intersect(&ray, s).map(|t| (i, t)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(i, _)| i)
}

/// Places a cursor at `aim_point` with Gaussian error and returns the
/// sphere containing it, nearest center first.
pub fn sample_hover_hit<R: Rng + ?Sized>(
    rng: &mut R,
    aim_point: Vec3,
    sigma: f64,
    spheres: &[Sphere],
) -> Option<usize> {
    let p = aim_point + Vec3::new(normal(rng), normal(rng), normal(rng)) * sigma;
    spheres
        .iter()
        .enumerate()
        .filter(|(_, s)| s.contains(p))
        .min_by(|x, y| x.1.center.distance(p).total_cmp(&y.1.center.distance(p)))
        .map(|(i, _)| i)
}
