use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::StatsError;

/// Fully crossed within-subjects design: one value per participant and
/// cell, stored participant-major, then factor A, then factor B.
#[derive(Debug, Clone, PartialEq)]
pub struct RmDesign {
    n: usize,
    a: usize,
    b: usize,
    values: Vec<f64>,
}

impl RmDesign {
    pub fn new(n: usize, a: usize, b: usize, values: Vec<f64>) -> Result<Self, StatsError> {
        if values.len() != n * a * b {
            return Err(StatsError::Unbalanced {
                expected: n * a * b,
                got: values.len(),
            });
        }
        for (idx, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(StatsError::MissingCell {
                    participant: idx / (a * b),
                    a: (idx / b) % a,
                    b: idx % b,
                });
            }
        }
        Ok(Self { n, a, b, values })
    }

    /// From `data[participant][a][b]`.
    pub fn from_nested(data: &[Vec<Vec<f64>>]) -> Result<Self, StatsError> {
        let n = data.len();
        let a = data.first().map_or(0, |p| p.len());
        let b = data.first().and_then(|p| p.first()).map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(n * a * b);
        for p in data {
            if p.len() != a || p.iter().any(|r| r.len() != b) {
                return Err(StatsError::Unbalanced {
                    expected: a * b,
                    got: p.iter().map(Vec::len).sum(),
                });
            }
            values.extend(p.iter().flatten().copied());
        }
        Self::new(n, a, b, values)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.a, self.b)
    }

    pub fn get(&self, participant: usize, a: usize, b: usize) -> f64 {
        self.values[(participant * self.a + a) * self.b + b]
    }

    pub fn participant(&self, i: usize) -> &[f64] {
        &self.values[i * self.a * self.b..(i + 1) * self.a * self.b]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaRow {
    pub factor: String,
    /// Sphericity-corrected degrees of freedom.
    pub dof1: f64,
    pub dof2: f64,
    pub dof1_uncorrected: f64,
    pub dof2_uncorrected: f64,
    pub ss_effect: f64,
    pub ss_error: f64,
    pub ms_error: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub p: f64,
    pub gg_epsilon: f64,
    pub eta_p2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaResult {
    pub rows: Vec<AnovaRow>,
}

impl AnovaResult {
    pub fn row(&self, factor: &str) -> Option<&AnovaRow> {
        self.rows.iter().find(|r| r.factor == factor)
    }
}

/// Orthonormal Helmert contrasts: `(k - 1)` rows, each orthogonal to the
/// constant vector.
fn helmert(k: usize) -> Vec<Vec<f64>> {
    (1..k)
        .map(|j| {
            let norm = ((j * (j + 1)) as f64).sqrt();
            (0..k)
                .map(|i| match i.cmp(&j) {
                    std::cmp::Ordering::Less => 1.0 / norm,
                    std::cmp::Ordering::Equal => -(j as f64) / norm,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect()
}

fn kron(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for rx in x {
        for ry in y {
            out.push(rx.iter().flat_map(|u| ry.iter().map(move |v| u * v)).collect());
        }
    }
    out
}

fn apply(c: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    c.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn effect_row(factor: &str, scores: &[Vec<f64>]) -> AnovaRow {
    let n = scores.len();
    let d = scores[0].len();
    let nf = n as f64;
    let mean: Vec<f64> = (0..d).map(|j| scores.iter().map(|z| z[j]).sum::<f64>() / nf).collect();
    let ss_effect = nf * mean.iter().map(|m| m * m).sum::<f64>();
    let mut cov = vec![vec![0.0; d]; d];
    for z in scores {
        for r in 0..d {
            for c in 0..d {
                cov[r][c] += (z[r] - mean[r]) * (z[c] - mean[c]);
            }
        }
    }
    let ss_error: f64 = (0..d).map(|r| cov[r][r]).sum();
    let trace = ss_error;
    let trace_sq: f64 = cov.iter().flatten().map(|v| v * v).sum();
    let gg_epsilon = if d == 1 || trace_sq <= 0.0 {
        1.0
    } else {
        (trace * trace / (d as f64 * trace_sq)).clamp(1.0 / d as f64, 1.0)
    };
    let df1 = d as f64;
    let df2 = (d * (n - 1)) as f64;
    let scale = ss_effect.abs().max(ss_error.abs()).max(f64::MIN_POSITIVE);
    let ss_effect = if ss_effect / scale < 1e-13 { 0.0 } else { ss_effect };
    let (f, p) = if ss_effect == 0.0 {
        (0.0, 1.0)
    } else if ss_error / scale < 1e-13 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (ss_effect / df1) / (ss_error / df2);
        let dist = FisherSnedecor::new(gg_epsilon * df1, gg_epsilon * df2).expect("positive dof");
        (f, dist.sf(f))
    };
    let total = ss_effect + ss_error;
    AnovaRow {
        factor: factor.to_string(),
        dof1: gg_epsilon * df1,
        dof2: gg_epsilon * df2,
        dof1_uncorrected: df1,
        dof2_uncorrected: df2,
        ss_effect,
        ss_error,
        ms_error: ss_error / df2,
        f,
        p,
        gg_epsilon,
        eta_p2: if total > 0.0 { ss_effect / total } else { 0.0 },
    }
}

/// Two-way repeated-measures ANOVA with Greenhouse-Geisser corrected
/// p-values. Rows: `factor_a`, `factor_b`, then `factor_a:factor_b`.
pub fn rm_anova_two_way(design: &RmDesign, factor_a: &str, factor_b: &str) -> Result<AnovaResult, StatsError> {
    let (n, a, b) = design.dims();
    if n < 3 {
        return Err(StatsError::TooSmall { what: "participants", needed: 3, got: n });
    }
    if a < 2 {
        return Err(StatsError::TooSmall { what: "levels of factor A", needed: 2, got: a });
    }
    if b < 2 {
        return Err(StatsError::TooSmall { what: "levels of factor B", needed: 2, got: b });
    }
    let ca = helmert(a);
    let cb = helmert(b);
    let cab = kron(&ca, &cb);
    let (sa, sb) = ((b as f64).sqrt(), (a as f64).sqrt());
    let mut za = Vec::with_capacity(n);
    let mut zb = Vec::with_capacity(n);
    let mut zab = Vec::with_capacity(n);
    for i in 0..n {
        let cells = design.participant(i);
        let mean_a: Vec<f64> = (0..a).map(|x| cells[x * b..(x + 1) * b].iter().sum::<f64>() / b as f64).collect();
        let mean_b: Vec<f64> = (0..b).map(|y| (0..a).map(|x| cells[x * b + y]).sum::<f64>() / a as f64).collect();
        za.push(apply(&ca, &mean_a).into_iter().map(|v| v * sa).collect::<Vec<_>>());
        zb.push(apply(&cb, &mean_b).into_iter().map(|v| v * sb).collect::<Vec<_>>());
        zab.push(apply(&cab, cells));
    }
    Ok(AnovaResult {
        rows: vec![
            effect_row(factor_a, &za),
            effect_row(factor_b, &zb),
            effect_row(&format!("{factor_a}:{factor_b}"), &zab),
        ],
    })
}
