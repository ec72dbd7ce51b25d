//! Independent reference computations used by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use itertools::Itertools;
use statrs::function::erf::erf;
use statrs::function::gamma::ln_gamma;

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn big_phi(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// P(F > f) for an F(d1, d2) variable by direct quadrature of the beta
/// density.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    let x = d2 / (d2 + d1 * f);
    let (a, b) = (0.5 * d2, 0.5 * d1);
    let ln_b = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    // Substitute t = x u^2 to smooth the origin.
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let t = x * u * u;
        ((a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - ln_b).exp() * 2.0 * x * u
    };
    simpson(g, 0.0, 1.0, 40_000)
}

/// Simpson's rule restricted to where `f` is non-negligible on `[a, b]`,
/// located on a coarse grid first.
fn simpson_on_support<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let coarse = 400;
    let h = (b - a) / coarse as f64;
    let values: Vec<f64> = (0..=coarse).map(|i| f(a + h * i as f64)).collect();
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let keep = |v: &f64| *v > peak * 1e-20;
    let first = values.iter().position(keep).unwrap().saturating_sub(1);
    let last = (values.iter().rposition(keep).unwrap() + 1).min(coarse);
    simpson(f, a + h * first as f64, a + h * last as f64, n)
}

fn big_phi_c(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)
}

/// Upper tail of the studentized range by nested composite Simpson rules
/// over P(range > w) = k * integral of phi(z) [Phi(z)^(k-1) - (Phi(z) - Phi(z - w))^(k-1)].
pub fn ptukey_sf(q: f64, k: usize, df: f64) -> f64 {
    let m = k as i32 - 1;
    let range_sf = |w: f64| {
        k as f64
            * simpson_on_support(
                |z| {
                    let a = 1.0 - big_phi_c(z);
                    let b = big_phi_c(w - z);
                    let c = a - b;
                    let diff: f64 = (0..m).map(|i| a.powi(i) * c.powi(m - 1 - i)).sum();
                    phi(z) * b * diff
                },
                -9.0,
                9.0,
                2000,
            )
    };
    let h = 0.5 * df;
    let ln_c = h * df.ln() - ln_gamma(h) - (h - 1.0) * 2f64.ln();
    let dens = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            (ln_c + (df - 1.0) * s.ln() - h * s * s).exp()
        }
    };
    simpson_on_support(|s| dens(s) * range_sf(q * s), 0.0, 6.0, 2000)
}

/// Studentized range CDF by nested composite Simpson rules.
pub fn ptukey(q: f64, k: usize, df: f64) -> f64 {
    let range = |w: f64| {
        k as f64
            * simpson(
                |z| phi(z) * (big_phi(z) - big_phi(z - w)).powi(k as i32 - 1),
                -9.0,
                9.0,
                1200,
            )
    };
    let h = 0.5 * df;
    let ln_c = h * df.ln() - ln_gamma(h) - (h - 1.0) * 2f64.ln();
    let dens = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            (ln_c + (df - 1.0) * s.ln() - h * s * s).exp()
        }
    };
    simpson(|s| dens(s) * range(q * s), 0.0, 4.0, 2400)
}

#[derive(Debug, Clone, Copy)]
pub struct OracleRow {
    pub ss: f64,
    pub ss_err: f64,
    pub df1: f64,
    pub df2: f64,
    pub f: f64,
    pub eta_p2: f64,
    pub eps: f64,
    pub p: f64,
}

fn trace(m: &[Vec<f64>]) -> f64 {
    (0..m.len()).map(|i| m[i][i]).sum()
}

fn trace_sq(m: &[Vec<f64>]) -> f64 {
    m.iter().flat_map(|r| r.iter()).map(|x| x * x).sum()
}

/// Sample covariance of the rows of `obs`, projected with the matrix `c`.
fn projected_cov(obs: &[Vec<f64>], c: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = obs.len();
    let m = obs[0].len();
    let projected: Vec<Vec<f64>> = obs
        .iter()
        .map(|y| (0..m).map(|i| (0..m).map(|j| c[i][j] * y[j]).sum()).collect())
        .collect();
    let mean: Vec<f64> = (0..m).map(|i| projected.iter().map(|y| y[i]).sum::<f64>() / n as f64).collect();
    let mut s = vec![vec![0.0; m]; m];
    for y in &projected {
        for i in 0..m {
            for j in 0..m {
                s[i][j] += (y[i] - mean[i]) * (y[j] - mean[j]) / (n - 1) as f64;
            }
        }
    }
    s
}

fn centering(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| (0..m).map(|j| f64::from(i == j) - 1.0 / m as f64).collect())
        .collect()
}

fn kron(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (p, q) = (x.len(), y.len());
    (0..p * q)
        .map(|r| (0..p * q).map(|c| x[r / q][c / q] * y[r % q][c % q]).collect())
        .collect()
}

fn gg(obs: &[Vec<f64>], c: &[Vec<f64>], df: f64) -> f64 {
    let s = projected_cov(obs, c);
    let e = trace(&s).powi(2) / (df * trace_sq(&s));
    e.clamp(1.0 / df, 1.0)
}

/// Two-way repeated-measures ANOVA from textbook sums of squares over
/// `data[participant][a][b]`, with Greenhouse-Geisser epsilons from the
/// double-centred covariance matrices. Rows are A, B, AxB.
pub fn rm_anova(data: &[Vec<Vec<f64>>]) -> [OracleRow; 3] {
    let n = data.len();
    let a = data[0].len();
    let b = data[0][0].len();
    let (nf, af, bf) = (n as f64, a as f64, b as f64);
    let grand: f64 = data.iter().flatten().flatten().sum::<f64>() / (nf * af * bf);
    let m_p: Vec<f64> = data.iter().map(|p| p.iter().flatten().sum::<f64>() / (af * bf)).collect();
    let m_a: Vec<f64> = (0..a).map(|i| data.iter().map(|p| p[i].iter().sum::<f64>()).sum::<f64>() / (nf * bf)).collect();
    let m_b: Vec<f64> = (0..b).map(|j| data.iter().map(|p| (0..a).map(|i| p[i][j]).sum::<f64>()).sum::<f64>() / (nf * af)).collect();
    let m_pa = |p: usize, i: usize| data[p][i].iter().sum::<f64>() / bf;
    let m_pb = |p: usize, j: usize| (0..a).map(|i| data[p][i][j]).sum::<f64>() / af;
    let m_ab = |i: usize, j: usize| data.iter().map(|p| p[i][j]).sum::<f64>() / nf;

    let ss_a = nf * bf * m_a.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_b = nf * af * m_b.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let mut ss_as = 0.0;
    let mut ss_bs = 0.0;
    let mut ss_ab = 0.0;
    let mut ss_abs = 0.0;
    for p in 0..n {
        for i in 0..a {
            ss_as += bf * (m_pa(p, i) - m_p[p] - m_a[i] + grand).powi(2);
        }
        for j in 0..b {
            ss_bs += af * (m_pb(p, j) - m_p[p] - m_b[j] + grand).powi(2);
        }
        for i in 0..a {
            for j in 0..b {
                let r = data[p][i][j] - m_pa(p, i) - m_pb(p, j) - m_ab(i, j) + m_p[p] + m_a[i] + m_b[j] - grand;
                ss_abs += r * r;
            }
        }
    }
    for i in 0..a {
        for j in 0..b {
            ss_ab += nf * (m_ab(i, j) - m_a[i] - m_b[j] + grand).powi(2);
        }
    }

    let obs_a: Vec<Vec<f64>> = (0..n).map(|p| (0..a).map(|i| m_pa(p, i)).collect()).collect();
    let obs_b: Vec<Vec<f64>> = (0..n).map(|p| (0..b).map(|j| m_pb(p, j)).collect()).collect();
    let obs_ab: Vec<Vec<f64>> = data.iter().map(|p| p.iter().flatten().copied().collect()).collect();
    let eps = [
        gg(&obs_a, &centering(a), af - 1.0),
        gg(&obs_b, &centering(b), bf - 1.0),
        gg(&obs_ab, &kron(&centering(a), &centering(b)), (af - 1.0) * (bf - 1.0)),
    ];
    let parts = [
        (ss_a, ss_as, af - 1.0),
        (ss_b, ss_bs, bf - 1.0),
        (ss_ab, ss_abs, (af - 1.0) * (bf - 1.0)),
    ];
    let mut out = [OracleRow { ss: 0.0, ss_err: 0.0, df1: 0.0, df2: 0.0, f: 0.0, eta_p2: 0.0, eps: 0.0, p: 0.0 }; 3];
    for (k, &(ss, ss_err, df1)) in parts.iter().enumerate() {
        let df2 = df1 * (nf - 1.0);
        let f = (ss / df1) / (ss_err / df2);
        out[k] = OracleRow {
            ss,
            ss_err,
            df1,
            df2,
            f,
            eta_p2: ss / (ss + ss_err),
            eps: eps[k],
            p: f_sf(f, df1 * eps[k], df2 * eps[k]),
        };
    }
    out
}

fn kw_h(values: &[f64], sizes: &[usize]) -> f64 {
    let n = values.len() as f64;
    let rank = |x: f64| {
        let less = values.iter().filter(|&&y| y < x).count() as f64;
        let equal = values.iter().filter(|&&y| y == x).count() as f64;
        less + (equal + 1.0) / 2.0
    };
    let mut h = 0.0;
    let mut start = 0;
    for &s in sizes {
        let r: f64 = values[start..start + s].iter().map(|&x| rank(x)).sum();
        h += r * r / s as f64;
        start += s;
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    let mut ties = 0.0;
    for (_, g) in &values.iter().sorted_by(|a, b| a.total_cmp(b)).chunk_by(|x| x.to_bits()) {
        let t = g.count() as f64;
        ties += t * t * t - t;
    }
    h / (1.0 - ties / (n * n * n - n))
}

/// Kruskal-Wallis H and its exact p by visiting all N! orderings of the
/// pooled sample.
pub fn kruskal_wallis_exact(groups: &[Vec<f64>]) -> (f64, f64) {
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let observed = kw_h(&pooled, &sizes);
    let mut total = 0u64;
    let mut extreme = 0u64;
    for perm in pooled.iter().copied().permutations(pooled.len()) {
        total += 1;
        if kw_h(&perm, &sizes) >= observed - 1e-9 {
            extreme += 1;
        }
    }
    (observed, extreme as f64 / total as f64)
}
