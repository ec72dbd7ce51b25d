use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::stats::{
    mean, rm_anova_two_way, summarize, throughput, tukey_hsd, AnovaResult, ConditionSummary, RmDesign, TukeyPair,
};
use crate::tasks::{compute_id, TaskKind, TrialLog, RING_DIAMETER, TARGET_WIDTH};
use crate::technique::Technique;

use super::batch::SessionRecord;
use super::HarnessError;

pub const ANOVA_COLUMNS: [&str; 7] = ["factor", "dof1", "dof2", "F", "p", "eta_p2", "gg_epsilon"];
pub const CONDITION_COLUMNS: [&str; 7] = ["task", "technique", "distance_m", "measure", "n", "mean", "ci95"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Measure {
    SelectionTime,
    ErrorRate,
    Throughput,
    DockingTime,
    ErrorDistance,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::SelectionTime => "selection_time_s",
            Measure::ErrorRate => "error_rate",
            Measure::Throughput => "throughput_bps",
            Measure::DockingTime => "docking_time_s",
            Measure::ErrorDistance => "error_distance_m",
        }
    }

    pub fn for_task(task: TaskKind) -> &'static [Measure] {
        match task {
            TaskKind::Selection => &[Measure::SelectionTime, Measure::ErrorRate, Measure::Throughput],
            TaskKind::Docking => &[Measure::SelectionTime, Measure::DockingTime, Measure::ErrorDistance],
        }
    }
}

/// Index of difficulty of the tapping layout.
pub fn layout_id() -> f64 {
    compute_id(RING_DIAMETER, TARGET_WIDTH).expect("positive constants")
}

type CellKey = (Technique, u64);

fn included(log: &TrialLog, task: TaskKind) -> bool {
    log.task == task && log.scored
}

/// Value of `measure` for one participant in one cell, from its logs.
pub fn cell_value(logs: &[&TrialLog], measure: Measure) -> Option<f64> {
    let successes: Vec<&&TrialLog> = logs.iter().filter(|l| l.success).collect();
    match measure {
        Measure::SelectionTime => {
            let t: Vec<f64> = successes.iter().filter_map(|l| l.selection_time_s).collect();
            mean(&t).ok()
        }
        Measure::ErrorRate => {
            let clicks: u64 = logs.iter().map(|l| u64::from(l.clicks)).sum();
            crate::stats::error_rate_from_counts(clicks, successes.len() as u64).ok()
        }
        Measure::Throughput => {
            let t: Vec<f64> = successes.iter().filter_map(|l| l.selection_time_s).collect();
            throughput(&t, layout_id()).ok()
        }
        Measure::DockingTime => {
            let t: Vec<f64> = successes.iter().filter_map(|l| l.docking_time_s).collect();
            mean(&t).ok()
        }
        Measure::ErrorDistance => {
            let e: Vec<f64> = successes.iter().filter_map(|l| l.error_distance_m).collect();
            mean(&e).ok()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TukeyTable {
    pub measure: Measure,
    pub factor: String,
    pub labels: Vec<String>,
    pub pairs: Vec<TukeyPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub task: TaskKind,
    pub participants: usize,
    pub techniques: Vec<Technique>,
    pub distances: Vec<f64>,
    pub conditions: Vec<ConditionSummary>,
    pub anovas: Vec<(Measure, AnovaResult)>,
    pub tukey: Vec<TukeyTable>,
    pub notes: Vec<String>,
    pub trials: usize,
    pub failures: usize,
}

impl Analysis {
    pub fn condition(&self, technique: Technique, distance: f64, measure: Measure) -> Option<&ConditionSummary> {
        self.conditions
            .iter()
            .find(|c| c.technique == technique.as_str() && c.distance_m == distance && c.measure == measure.name())
    }

    pub fn anova(&self, measure: Measure) -> Option<&AnovaResult> {
        self.anovas.iter().find(|(m, _)| *m == measure).map(|(_, a)| a)
    }
}

/// Participant-level cell values, condition summaries, ANOVAs and Tukey
/// comparisons for one task.
pub fn analyze(sessions: &[SessionRecord], task: TaskKind) -> Result<Analysis, HarnessError> {
    let mut per_cell: BTreeMap<(u32, CellKey), Vec<&TrialLog>> = BTreeMap::new();
    let mut trials = 0;
    let mut failures = 0;
    for s in sessions {
        for log in s.logs.iter().filter(|l| included(l, task)) {
            trials += 1;
            failures += usize::from(!log.success);
            per_cell
                .entry((log.participant, (log.technique, log.distance_m.to_bits())))
                .or_default()
                .push(log);
        }
    }
    let mut techniques: Vec<Technique> = per_cell.keys().map(|(_, (t, _))| *t).collect();
    techniques.sort();
    techniques.dedup();
    let mut distances: Vec<f64> = per_cell.keys().map(|(_, (_, d))| f64::from_bits(*d)).collect();
    distances.sort_by(f64::total_cmp);
    distances.dedup();
    let mut participants: Vec<u32> = per_cell.keys().map(|(p, _)| *p).collect();
    participants.dedup();

    let mut conditions = Vec::new();
    let mut anovas = Vec::new();
    let mut tukey = Vec::new();
    let mut notes = Vec::new();
    for &measure in Measure::for_task(task) {
        let values: BTreeMap<(u32, CellKey), f64> = per_cell
            .iter()
            .filter_map(|(k, logs)| cell_value(logs, measure).map(|v| (*k, v)))
            .collect();
        for &t in &techniques {
            for &d in &distances {
                let xs: Vec<f64> = participants
                    .iter()
                    .filter_map(|p| values.get(&(*p, (t, d.to_bits()))).copied())
                    .collect();
                if let Ok(s) = summarize(&xs) {
                    conditions.push(ConditionSummary {
                        technique: t.as_str().to_string(),
                        distance_m: d,
                        measure: measure.name().to_string(),
                        n: s.n,
                        mean: s.mean,
                        ci95: s.ci95,
                    });
                }
            }
        }
        let complete: Vec<u32> = participants
            .iter()
            .copied()
            .filter(|p| {
                techniques
                    .iter()
                    .all(|t| distances.iter().all(|d| values.contains_key(&(*p, (*t, d.to_bits())))))
            })
            .collect();
        if complete.len() < participants.len() {
            notes.push(format!(
                "{}: {} participant(s) with empty cells left out of the ANOVA",
                measure.name(),
                participants.len() - complete.len()
            ));
        }
        if techniques.len() < 2 || distances.len() < 2 || complete.len() < 3 {
            notes.push(format!(
                "{}: ANOVA needs 2+ techniques, 2+ distances and 3+ complete participants",
                measure.name()
            ));
            continue;
        }
        let mut flat = Vec::with_capacity(complete.len() * techniques.len() * distances.len());
        for p in &complete {
            for t in &techniques {
                for d in &distances {
                    flat.push(values[&(*p, (*t, d.to_bits()))]);
                }
            }
        }
        let design = RmDesign::new(complete.len(), techniques.len(), distances.len(), flat)?;
        let result = rm_anova_two_way(&design, "technique", "distance")?;
        let n = complete.len() as f64;
        let (a, b) = (techniques.len(), distances.len());
        let tech_means: Vec<f64> = (0..a)
            .map(|i| (0..complete.len()).flat_map(|p| (0..b).map(move |j| (p, j))).map(|(p, j)| design.get(p, i, j)).sum::<f64>() / (n * b as f64))
            .collect();
        let dist_means: Vec<f64> = (0..b)
            .map(|j| (0..complete.len()).flat_map(|p| (0..a).map(move |i| (p, i))).map(|(p, i)| design.get(p, i, j)).sum::<f64>() / (n * a as f64))
            .collect();
        let tech_row = result.row("technique").expect("row present");
        let dist_row = result.row("distance").expect("row present");
        tukey.push(TukeyTable {
            measure,
            factor: "technique".into(),
            labels: techniques.iter().map(|t| t.to_string()).collect(),
            pairs: tukey_hsd(&tech_means, tech_row.ms_error, tech_row.dof2_uncorrected, n * b as f64)?,
        });
        tukey.push(TukeyTable {
            measure,
            factor: "distance".into(),
            labels: distances.iter().map(|d| format!("{d}m")).collect(),
            pairs: tukey_hsd(&dist_means, dist_row.ms_error, dist_row.dof2_uncorrected, n * a as f64)?,
        });
        anovas.push((measure, result));
    }
    Ok(Analysis {
        task,
        participants: participants.len(),
        techniques,
        distances,
        conditions,
        anovas,
        tukey,
        notes,
        trials,
        failures,
    })
}

fn csv_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Csv(e.to_string())
}

pub fn write_condition_summary_csv<W: Write>(a: &Analysis, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONDITION_COLUMNS).map_err(csv_err)?;
    for c in &a.conditions {
        w.write_record([
            a.task.to_string(),
            c.technique.clone(),
            c.distance_m.to_string(),
            c.measure.clone(),
            c.n.to_string(),
            c.mean.to_string(),
            c.ci95.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn write_anova_csv<W: Write>(result: &AnovaResult, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ANOVA_COLUMNS).map_err(csv_err)?;
    for r in &result.rows {
        w.write_record([
            r.factor.clone(),
            r.dof1.to_string(),
            r.dof2.to_string(),
            r.f.to_string(),
            r.p.to_string(),
            r.eta_p2.to_string(),
            r.gg_epsilon.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

fn format_p(p: f64) -> String {
    if p < 0.001 {
        "<.001".to_string()
    } else {
        format!("{p:.3}")
    }
}

/// Plain-text report of an analysis.
pub fn render_report(a: &Analysis, header: &[(String, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} report", a.task);
    for (k, v) in header {
        let _ = writeln!(s, "{k}: {v}");
    }
    let _ = writeln!(s, "participants: {}", a.participants);
    let _ = writeln!(s, "scored trials: {} ({} failed)", a.trials, a.failures);
    if a.task == TaskKind::Selection {
        let _ = writeln!(s, "index of difficulty: {:.4} bits", layout_id());
    }
    for &measure in Measure::for_task(a.task) {
        let _ = writeln!(s, "\n## {}", measure.name());
        let _ = writeln!(s, "{:<14}{:>10}{:>6}{:>14}{:>12}", "technique", "distance", "n", "mean", "ci95");
        for c in a.conditions.iter().filter(|c| c.measure == measure.name()) {
            let _ = writeln!(
                s,
                "{:<14}{:>10}{:>6}{:>14.4}{:>12.4}",
                c.technique,
                format!("{}m", c.distance_m),
                c.n,
                c.mean,
                c.ci95
            );
        }
        if let Some(r) = a.anova(measure) {
            let _ = writeln!(s, "\n{:<22}{:>8}{:>9}{:>12}{:>8}{:>8}{:>8}", "factor", "dof1", "dof2", "F", "p", "eta_p2", "eps");
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "{:<22}{:>8.3}{:>9.3}{:>12.3}{:>8}{:>8.3}{:>8.3}",
                    row.factor,
                    row.dof1,
                    row.dof2,
                    row.f,
                    format_p(row.p),
                    row.eta_p2,
                    row.gg_epsilon
                );
            }
        }
        for t in a.tukey.iter().filter(|t| t.measure == measure) {
            let _ = writeln!(s, "\nTukey HSD ({})", t.factor);
            for pair in &t.pairs {
                let _ = writeln!(
                    s,
                    "  {} vs {}: diff {:.4}, q {:.3}, p {}{}",
                    t.labels[pair.i],
                    t.labels[pair.j],
                    pair.diff,
                    pair.q,
                    format_p(pair.p),
                    if pair.significant { " *" } else { "" }
                );
            }
        }
    }
    if !a.notes.is_empty() {
        let _ = writeln!(s, "\n## notes");
        for n in &a.notes {
            let _ = writeln!(s, "- {n}");
        }
    }
    s
}
