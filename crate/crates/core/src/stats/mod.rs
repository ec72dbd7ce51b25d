//! Dependent measures and the repeated-measures and rank-based tests used
//! to compare techniques.

mod anova;
mod descriptive;
mod nonparametric;
mod ptukey;
mod quad;
mod tukey;
mod vrsq;

pub use anova::{rm_anova_two_way, AnovaResult, AnovaRow, RmDesign};
pub use descriptive::{
    ci95_half_width, error_rate, error_rate_from_counts, mean, sample_sd, summarize, t_critical_95,
    throughput, throughput_per_participant, ConditionSummary, Summary,
};
pub use nonparametric::{
    dunn_posthoc, kruskal_wallis, kruskal_wallis_exact, midranks, DunnPair, KruskalWallis,
};
pub use ptukey::{ptukey, studentized_range_sf};
pub use quad::integrate;
pub use tukey::{tukey_hsd, TukeyPair};
pub use vrsq::{vrsq_score, VrsqResponse};

/// Conventional significance level.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("times must be positive and finite")]
    NonPositiveTime,
    #[error("no successful selections")]
    NoSuccesses,
    #[error("design needs at least {needed} {what}, got {got}")]
    TooSmall {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("unbalanced design: expected {expected} values, got {got}")]
    Unbalanced { expected: usize, got: usize },
    #[error("missing or non-finite cell value at participant {participant}, a={a}, b={b}")]
    MissingCell { participant: usize, a: usize, b: usize },
    #[error("error degrees of freedom must be at least 1, got {0}")]
    DfError(f64),
    #[error("VRSQ item {item} out of range: {value}")]
    VrsqItem { item: usize, value: u8 },
    #[error("exact enumeration too large: {0} assignments")]
    TooManyAssignments(u128),
}

pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub(crate) fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
