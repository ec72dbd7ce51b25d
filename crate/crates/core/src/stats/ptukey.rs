use statrs::function::gamma::ln_gamma;

use super::quad::{integrate, integrate_rel};
use super::{normal_cdf, normal_pdf};

const TOL: f64 = 1e-11;
const REL_TOL: f64 = 1e-11;

/// Range CDF for `k` standard normal samples: P(max - min <= w).
fn normal_range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let inner = |z: f64| normal_pdf(z) * (normal_cdf(z) - normal_cdf(z - w)).powi(km1);
    let value = k as f64 * integrate(inner, -8.5, 8.5, 8, TOL);
    value.clamp(0.0, 1.0)
}

/// P(max - min > w) for `k` standard normal samples, integrated directly
/// so small tails keep their relative precision.
fn normal_range_sf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 1.0;
    }
    let m = k - 1;
    // Phi(z)^m - (Phi(z) - Phi(z - w))^m, factored to avoid cancellation.
    let inner = |z: f64| {
        let a = normal_cdf(z);
        let b = normal_cdf(z - w);
        let c = (a - b).max(0.0);
        let sum: f64 = (0..m).map(|i| a.powi(i as i32) * c.powi((m - 1 - i) as i32)).sum();
        normal_pdf(z) * b * sum
    };
    let value = k as f64 * integrate_rel(inner, -8.5, 8.5, 8, REL_TOL);
    value.clamp(0.0, 1.0)
}

/// CDF of the studentized range `q` for `k` means and `df` error degrees
/// of freedom. `df = inf` gives the normal range distribution.
pub fn ptukey(q: f64, k: usize, df: f64) -> f64 {
    if !(q > 0.0) || k < 2 {
        return 0.0;
    }
    if q.is_infinite() {
        return 1.0;
    }
    if df.is_infinite() || df > 25_000.0 {
        return normal_range_cdf(q, k);
    }
    let (log_norm, half) = chi_log_norm(df);
    let density = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (log_norm + (df - 1.0) * s.ln() - half * s * s).exp()
    };
    let (lo, hi) = chi_range(df);
    let value = integrate(|s| density(s) * normal_range_cdf(q * s, k), lo, hi, 16, TOL);
    value.clamp(0.0, 1.0)
}

/// Upper tail P(Q > q), computed without subtracting from one.
pub fn studentized_range_sf(q: f64, k: usize, df: f64) -> f64 {
    if !(q > 0.0) || k < 2 {
        return 1.0;
    }
    if q.is_infinite() {
        return 0.0;
    }
    if df.is_infinite() || df > 25_000.0 {
        return normal_range_sf(q, k);
    }
    let (log_norm, half) = chi_log_norm(df);
    let density = move |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (log_norm + (df - 1.0) * s.ln() - half * s * s).exp()
    };
    let (lo, hi) = chi_range(df);
    let value = integrate_rel(|s| density(s) * normal_range_sf(q * s, k), lo, hi, 16, REL_TOL);
    value.clamp(0.0, 1.0)
}

fn chi_log_norm(df: f64) -> (f64, f64) {
    let half = 0.5 * df;
    (half * df.ln() - ln_gamma(half) - (half - 1.0) * std::f64::consts::LN_2, half)
}

fn chi_range(df: f64) -> (f64, f64) {
    let spread = 1.0 / df.sqrt();
    ((1.0 - 12.0 * spread).max(0.0), 1.0 + 14.0 * spread.max(0.3))
}
