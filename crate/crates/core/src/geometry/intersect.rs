use super::{Disc, Ray, Sphere, Vec3};

/// Standard gravity used for the teleport arc, m/s².
pub const GRAVITY: f64 = 9.81;

/// Smallest non-negative ray parameter at which the ray meets the sphere
/// surface. A ray starting inside the sphere reports its exit point.
pub fn ray_sphere_intersect(ray: &Ray, sphere: &Sphere) -> Option<f64> {
    let oc = ray.origin() - sphere.center;
    let b = oc.dot(ray.direction());
    let c = oc.norm_squared() - sphere.radius * sphere.radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    // Numerically stable pair of roots.
    let q = if b > 0.0 { -b - root } else { -b + root };
    let (mut t0, mut t1) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q, c / q)
    };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    if t1 < 0.0 {
        None
    } else if t0 >= 0.0 {
        Some(t0)
    } else {
        Some(t1)
    }
}

/// Point where the ray crosses the disc, if the crossing is ahead of the
/// origin and within the disc radius.
pub fn ray_disc_intersect(ray: &Ray, disc: &Disc) -> Option<Vec3> {
    let n = disc.normal();
    let denom = ray.direction().dot(n);
    let offset = (disc.center - ray.origin()).dot(n);
    if denom.abs() < 1e-12 {
        // Parallel: only a ray lying in the plane can touch the disc, and
        // then its origin is the first contact.
        if offset.abs() < 1e-12 && ray.origin().distance(disc.center) <= disc.radius {
            return Some(ray.origin());
        }
        return None;
    }
    let t = offset / denom;
    if t < 0.0 {
        return None;
    }
    let hit = ray.at(t);
    (hit.distance(disc.center) <= disc.radius).then_some(hit)
}

/// Landing point of a ballistic teleport arc launched from `origin` along
/// `aim_direction` at `arc_strength` m/s, on the horizontal plane
/// `y = floor_height`.
///
/// Returns `None` when the floor is above the origin or when the aim is
/// straight up (the arc never travels anywhere).
pub fn teleport_arc_ground_hit(
    origin: Vec3,
    aim_direction: Vec3,
    arc_strength: f64,
    floor_height: f64,
) -> Option<Vec3> {
    let dir = aim_direction.try_normalize()?;
    let drop = origin.y - floor_height;
    if drop < 0.0 || !(arc_strength >= 0.0) {
        return None;
    }
    let v = dir * arc_strength;
    let horizontal = (v.x * v.x + v.z * v.z).sqrt();
    if horizontal < 1e-9 && v.y > 0.0 {
        return None;
    }
    // floor = oy + vy t - g t²/2 ; positive root.
    let t = (v.y + (v.y * v.y + 2.0 * GRAVITY * drop).sqrt()) / GRAVITY;
    Some(Vec3::new(origin.x + v.x * t, floor_height, origin.z + v.z * t))
}
