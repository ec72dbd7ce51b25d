use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{teleport_arc_ground_hit, Rotation, Vec3};
use crate::technique::DEFAULT_FADE_DURATION;

use super::{time_noise, AgentParams, TORSO_HEIGHT};

/// Radius of the region a new portal must frame, meters: the target ring
/// plus one target radius.
pub const PORTAL_AIM_RADIUS: f64 = 0.335;
/// Angular swing of the opening gesture from rest, radians.
pub const PORTAL_AIM_SWING: f64 = std::f64::consts::FRAC_PI_6;
/// Launch speed of the teleport arc, m/s.
pub const TELEPORT_ARC_SPEED: f64 = 10.0;
/// Accepted landing distance from the intended spot, meters.
pub const TELEPORT_LANDING_TOLERANCE: f64 = 0.5;
/// Distance the user stands from an object after teleporting to it.
pub const TELEPORT_STANDOFF: f64 = 0.7;
const MAX_ATTEMPTS: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpeningAttempt {
    pub start: f64,
    pub end: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortalOpening {
    pub attempts: u32,
    pub open_time: f64,
    pub log: Vec<OpeningAttempt>,
}

impl PortalOpening {
    pub fn failures(&self) -> u32 {
        self.attempts.saturating_sub(1)
    }
}

/// Opens a portal onto a target `target_distance` away. Each attempt is a
/// ray aim with Gaussian error; it succeeds when the error stays inside
/// the angular radius of the region to frame. A failed portal costs an
/// extra reaction time to close.
pub fn simulate_portal_opening<R: Rng + ?Sized>(
    params: &AgentParams,
    target_distance: f64,
    rng: &mut R,
) -> PortalOpening {
    let alpha = (PORTAL_AIM_RADIUS / target_distance.max(PORTAL_AIM_RADIUS)).asin();
    let id = (PORTAL_AIM_SWING / (2.0 * alpha) + 1.0).log2();
    let mut t = 0.0;
    let mut log = Vec::new();
    loop {
        let start = t;
        t += params.movement_time(id) * time_noise(rng, params.time_cv);
        let ex: f64 = StandardNormal.sample(rng);
        let ey: f64 = StandardNormal.sample(rng);
        let error = params.portal_aim_sigma * ex.hypot(ey);
        let success = error <= alpha || log.len() as u32 + 1 >= MAX_ATTEMPTS;
        log.push(OpeningAttempt { start, end: t, success });
        if success {
            break;
        }
        t += params.reaction_time;
    }
    PortalOpening {
        attempts: log.len() as u32,
        open_time: t,
        log,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportApproach {
    pub teleports: u32,
    pub time: f64,
    pub final_position: Vec3,
    /// (trigger time, arrival time) per teleport.
    pub hops: Vec<(f64, f64)>,
}

fn controller_origin(user: Vec3) -> Vec3 {
    user + Vec3::new(0.0, -0.1, -0.3)
}

fn horizontal(v: Vec3) -> Vec3 {
    Vec3::new(v.x, 0.0, v.z)
}

/// Pitch that lands the arc `range` meters away on the floor, or the
/// longest-range pitch when out of reach.
fn pitch_for_range(height: f64, range: f64) -> f64 {
    let reach = |pitch: f64| {
        let dir = Vec3::new(0.0, pitch.sin(), -pitch.cos());
        teleport_arc_ground_hit(Vec3::new(0.0, height, 0.0), dir, TELEPORT_ARC_SPEED, 0.0)
            .map_or(0.0, |p| -p.z)
    };
    let (mut lo, mut hi) = (-1.4, FRAC_PI_4);
    if reach(hi) <= range {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if reach(mid) < range {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Teleports from the origin toward a standing spot `TELEPORT_STANDOFF`
/// in front of an object `target_distance` ahead, re-aiming until the
/// landing is within tolerance.
pub fn simulate_teleport_approach<R: Rng + ?Sized>(
    params: &AgentParams,
    target_distance: f64,
    rng: &mut R,
) -> TeleportApproach {
    let goal = Vec3::new(0.0, 0.0, -(target_distance - TELEPORT_STANDOFF).max(0.0));
    let mut user = Vec3::new(0.0, TORSO_HEIGHT, 0.0);
    let mut t = 0.0;
    let mut hops = Vec::new();
    if horizontal(user).distance(goal) <= TELEPORT_LANDING_TOLERANCE {
        return TeleportApproach { teleports: 0, time: 0.0, final_position: user, hops };
    }
    while hops.len() < MAX_ATTEMPTS as usize {
        let origin = controller_origin(user);
        let to_goal = goal - horizontal(origin);
        let range = to_goal.norm();
        let heading = to_goal.try_normalize().unwrap_or(-Vec3::Z);
        let pitch = pitch_for_range(origin.y, range);
        let yaw_axis = Vec3::Y;
        let pitch_axis = heading.cross(Vec3::Y);
        let jitter_yaw: f64 = StandardNormal.sample(rng);
        let jitter_pitch: f64 = StandardNormal.sample(rng);
        let base = heading * pitch.cos() + Vec3::Y * pitch.sin();
        let noisy = Rotation::from_scaled_axis(
            yaw_axis * (jitter_yaw * params.angular_jitter_sigma)
                + pitch_axis * (jitter_pitch * params.angular_jitter_sigma),
        )
        .rotate(base);
        let id = (range / (2.0 * TELEPORT_LANDING_TOLERANCE) + 1.0).log2();
        let trigger = t + params.movement_time(id) * time_noise(rng, params.time_cv);
        let arrive = trigger + DEFAULT_FADE_DURATION;
        hops.push((trigger, arrive));
        t = arrive;
        if let Some(landing) = teleport_arc_ground_hit(origin, noisy, TELEPORT_ARC_SPEED, 0.0) {
            user = Vec3::new(landing.x, user.y, landing.z);
        }
        if horizontal(user).distance(goal) <= TELEPORT_LANDING_TOLERANCE {
            break;
        }
    }
    TeleportApproach {
        teleports: hops.len() as u32,
        time: t,
        final_position: user,
        hops,
    }
}
