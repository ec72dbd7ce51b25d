use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{normal_cdf, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DunnPair {
    pub i: usize,
    pub j: usize,
    pub z: f64,
    pub p: f64,
    pub p_bonferroni: f64,
}

/// Average ranks (1-based) of `xs`, ties sharing the mean rank.
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && xs[idx[end]] == xs[idx[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn tie_sum(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        total += t * t * t - t;
        start = end;
    }
    total
}

fn check_groups(groups: &[Vec<f64>]) -> Result<(), StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooSmall { what: "groups", needed: 2, got: groups.len() });
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(StatsError::Empty);
    }
    Ok(())
}

fn h_statistic(pooled: &[f64], sizes: &[usize], ranks: &[f64], correction: f64) -> f64 {
    let n = pooled.len() as f64;
    let mut offset = 0;
    let mut sum = 0.0;
    for &size in sizes {
        let r: f64 = ranks[offset..offset + size].iter().sum();
        sum += r * r / size as f64;
        offset += size;
    }
    let h = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
    (h / correction).max(0.0)
}

fn pool(groups: &[Vec<f64>]) -> (Vec<f64>, Vec<usize>) {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let sizes = groups.iter().map(Vec::len).collect();
    (pooled, sizes)
}

fn correction(pooled: &[f64]) -> f64 {
    let n = pooled.len() as f64;
    1.0 - tie_sum(pooled) / (n * n * n - n)
}

/// Kruskal-Wallis H with tie correction and its chi-square p-value.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis, StatsError> {
    check_groups(groups)?;
    let (pooled, sizes) = pool(groups);
    let df = (groups.len() - 1) as f64;
    let c = correction(&pooled);
    if c <= 0.0 {
        return Ok(KruskalWallis { h: 0.0, df, p: 1.0 });
    }
    let h = h_statistic(&pooled, &sizes, &midranks(&pooled), c);
    let p = ChiSquared::new(df).expect("positive df").sf(h);
    Ok(KruskalWallis { h, df, p })
}

fn multinomial(sizes: &[usize]) -> u128 {
    let mut total: u128 = 1;
    let mut placed = 0u128;
    for &s in sizes {
        for k in 1..=s as u128 {
            placed += 1;
            total = total * placed / k;
        }
    }
    total
}

/// Kruskal-Wallis with the p-value from the exact permutation
/// distribution of H, enumerating every split of the pooled ranks into
/// groups of the observed sizes.
pub fn kruskal_wallis_exact(groups: &[Vec<f64>], max_assignments: u128) -> Result<KruskalWallis, StatsError> {
    let asymptotic = kruskal_wallis(groups)?;
    let (pooled, sizes) = pool(groups);
    let c = correction(&pooled);
    if c <= 0.0 {
        return Ok(asymptotic);
    }
    let count = multinomial(&sizes);
    if count > max_assignments {
        return Err(StatsError::TooManyAssignments(count));
    }
    let ranks = midranks(&pooled);
    let n = pooled.len() as f64;
    let observed = asymptotic.h;
    // H depends on the assignment only through sum of R_g^2 / n_g.
    let threshold = (observed * c + 3.0 * (n + 1.0)) * n * (n + 1.0) / 12.0;
    let tol = 1e-9 * threshold.abs().max(1.0);
    let mut label = vec![usize::MAX; ranks.len()];
    let mut remaining = sizes.clone();
    let mut hits = 0u128;
    let mut total = 0u128;
    enumerate(&ranks, &sizes, &mut remaining, &mut label, 0, &mut |label| {
        let mut sums = vec![0.0; sizes.len()];
        for (r, &g) in ranks.iter().zip(label) {
            sums[g] += r;
        }
        let stat: f64 = sums.iter().zip(&sizes).map(|(s, &k)| s * s / k as f64).sum();
        total += 1;
        if stat >= threshold - tol {
            hits += 1;
        }
    });
    Ok(KruskalWallis {
        p: hits as f64 / total as f64,
        ..asymptotic
    })
}

fn enumerate(
    ranks: &[f64],
    sizes: &[usize],
    remaining: &mut [usize],
    label: &mut [usize],
    pos: usize,
    visit: &mut dyn FnMut(&[usize]),
) {
    if pos == ranks.len() {
        visit(label);
        return;
    }
    for g in 0..sizes.len() {
        if remaining[g] == 0 {
            continue;
        }
        remaining[g] -= 1;
        label[pos] = g;
        enumerate(ranks, sizes, remaining, label, pos + 1, visit);
        remaining[g] += 1;
    }
}

/// Dunn's pairwise z-tests on mean ranks with the tie-corrected variance;
/// two-sided p-values, raw and Bonferroni-adjusted.
pub fn dunn_posthoc(groups: &[Vec<f64>]) -> Result<Vec<DunnPair>, StatsError> {
    check_groups(groups)?;
    let (pooled, sizes) = pool(groups);
    let ranks = midranks(&pooled);
    let n = pooled.len() as f64;
    let mut mean_ranks = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for &s in &sizes {
        mean_ranks.push(ranks[offset..offset + s].iter().sum::<f64>() / s as f64);
        offset += s;
    }
    let variance = n * (n + 1.0) / 12.0 - tie_sum(&pooled) / (12.0 * (n - 1.0));
    let comparisons = (sizes.len() * (sizes.len() - 1) / 2) as f64;
    let mut out = Vec::new();
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            let se = (variance * (1.0 / sizes[i] as f64 + 1.0 / sizes[j] as f64)).sqrt();
            let diff = mean_ranks[i] - mean_ranks[j];
            let z = if diff == 0.0 { 0.0 } else if se > 0.0 { diff / se } else { f64::INFINITY };
            let p = (2.0 * (1.0 - normal_cdf(z.abs()))).clamp(0.0, 1.0);
            out.push(DunnPair {
                i,
                j,
                z,
                p,
                p_bonferroni: (p * comparisons).min(1.0),
            });
        }
    }
    Ok(out)
}
