use serde::Serialize;

use super::ptukey::studentized_range_sf;
use super::{StatsError, ALPHA};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TukeyPair {
    pub i: usize,
    pub j: usize,
    pub diff: f64,
    pub q: f64,
    pub p: f64,
    pub significant: bool,
}

/// Pairwise Tukey HSD comparisons of `cell_means`, each the mean of
/// `n_per_cell` observations, given the ANOVA error term.
pub fn tukey_hsd(
    cell_means: &[f64],
    ms_error: f64,
    df_error: f64,
    n_per_cell: f64,
) -> Result<Vec<TukeyPair>, StatsError> {
    if !(df_error >= 1.0) {
        return Err(StatsError::DfError(df_error));
    }
    let k = cell_means.len();
    if k < 2 {
        return Err(StatsError::TooSmall { what: "means", needed: 2, got: k });
    }
    let se = (ms_error / n_per_cell).sqrt();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let diff = cell_means[i] - cell_means[j];
            let q = if diff == 0.0 {
                0.0
            } else if se > 0.0 {
                diff.abs() / se
            } else {
                f64::INFINITY
            };
            let p = if q == 0.0 { 1.0 } else { studentized_range_sf(q, k, df_error) };
            out.push(TukeyPair {
                i,
                j,
                diff,
                q,
                p,
                significant: p < ALPHA,
            });
        }
    }
    Ok(out)
}
