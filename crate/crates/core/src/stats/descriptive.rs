use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::tasks::TrialLog;

use super::StatsError;

pub fn mean(xs: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation; 0 for a single value.
pub fn sample_sd(xs: &[f64]) -> Result<f64, StatsError> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Ok(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Ok((ss / (xs.len() - 1) as f64).sqrt())
}

/// Two-sided 95% Student t critical value for `df` degrees of freedom.
pub fn t_critical_95(df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive df")
        .inverse_cdf(0.975)
}

pub fn ci95_half_width(xs: &[f64]) -> Result<f64, StatsError> {
    let sd = sample_sd(xs)?;
    if xs.len() < 2 {
        return Ok(0.0);
    }
    let n = xs.len() as f64;
    Ok(t_critical_95(n - 1.0) * sd / n.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub ci95: f64,
}

pub fn summarize(xs: &[f64]) -> Result<Summary, StatsError> {
    Ok(Summary {
        n: xs.len(),
        mean: mean(xs)?,
        sd: sample_sd(xs)?,
        ci95: ci95_half_width(xs)?,
    })
}

/// Per technique and distance summary of one dependent measure across
/// participants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub technique: String,
    pub distance_m: f64,
    pub measure: String,
    pub n: usize,
    pub mean: f64,
    pub ci95: f64,
}

/// Index of difficulty over mean movement time, bits per second.
pub fn throughput(trial_times: &[f64], id: f64) -> Result<f64, StatsError> {
    if trial_times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(StatsError::NonPositiveTime);
    }
    Ok(id / mean(trial_times)?)
}

/// Throughput computed per participant, then averaged.
pub fn throughput_per_participant(per_participant: &[Vec<f64>], id: f64) -> Result<f64, StatsError> {
    let tps = per_participant
        .iter()
        .map(|t| throughput(t, id))
        .collect::<Result<Vec<_>, _>>()?;
    mean(&tps)
}

pub fn error_rate_from_counts(clicks: u64, successes: u64) -> Result<f64, StatsError> {
    if successes == 0 {
        return Err(StatsError::NoSuccesses);
    }
    Ok(clicks as f64 / successes as f64)
}

/// Clicks per successful selection over the given logs.
pub fn error_rate<'a, I>(logs: I) -> Result<f64, StatsError>
where
    I: IntoIterator<Item = &'a TrialLog>,
{
    let (clicks, successes) = logs.into_iter().fold((0u64, 0u64), |(c, s), log| {
        (c + u64::from(log.clicks), s + u64::from(log.success))
    });
    error_rate_from_counts(clicks, successes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::TaskKind;
    use crate::technique::Technique;

    #[test]
    fn throughput_examples() {
        assert!((throughput(&[1.0; 16], 3.26).unwrap() - 3.26).abs() < 1e-15);
        assert!((throughput(&[1.0, 2.0], 3.26).unwrap() - 3.26 / 1.5).abs() < 1e-15);
        assert_eq!(throughput(&[1.0], 1.0).unwrap(), 1.0);
        assert!(throughput(&[], 1.0).is_err());
        assert!(throughput(&[0.0], 1.0).is_err());
    }

    #[test]
    fn error_rate_examples() {
        assert_eq!(error_rate_from_counts(16, 16).unwrap(), 1.0);
        assert_eq!(error_rate_from_counts(24, 16).unwrap(), 1.5);
        assert!(error_rate_from_counts(3, 0).is_err());
        let mut log = TrialLog::new(0, Technique::Homer, 9.0, TaskKind::Selection, 0);
        log.clicks = 3;
        log.success = true;
        assert_eq!(error_rate([&log, &log]).unwrap(), 3.0);
    }

    #[test]
    fn ci_uses_t() {
        let xs = [1.0, 2.0, 3.0];
        let ci = ci95_half_width(&xs).unwrap();
        assert!((ci - 4.302_652_729_911_275 * 1.0 / 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(ci95_half_width(&[5.0]).unwrap(), 0.0);
    }
}
