//! Configuration, counterbalancing, batch simulation, persistence and
//! reporting.

mod analysis;
mod batch;
mod config;
mod csvio;
mod latin;

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub use analysis::{
    analyze, cell_value, layout_id, render_report, write_anova_csv, write_condition_summary_csv, Analysis,
    Measure, TukeyTable, ANOVA_COLUMNS, CONDITION_COLUMNS,
};
pub use batch::{condition_orders, run_batch, Condition, SessionRecord};
pub use config::{
    ExperimentConfig, FeatureFlags, Preset, ReachConfig, RoomConfig, CONFIG_SCHEMA_VERSION, STUDY1_REACH,
    STUDY2_REACH,
};
pub use csvio::{
    import_human_logs, read_trial_log_csv, sessions_from_logs, write_trial_log_csv, write_trial_summary_csv,
    LOG_SCHEMA_VERSION, TRIAL_LOG_COLUMNS, TRIAL_SUMMARY_COLUMNS,
};
pub use latin::latin_square_orders;

use crate::tasks::{TaskKind, TrialLog};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("import error at row {row}: {message}")]
    Import { row: u64, message: String },
    #[error(transparent)]
    Task(#[from] crate::tasks::TaskError),
    #[error(transparent)]
    Agent(#[from] crate::agent::AgentError),
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

pub const TRIAL_LOG_FILE: &str = "trial_log.csv";
pub const TRIAL_SUMMARY_FILE: &str = "trial_summary.csv";
pub const CONDITION_SUMMARY_FILE: &str = "condition_summary.csv";
pub const SESSIONS_FILE: &str = "sessions.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

fn all_logs(sessions: &[SessionRecord]) -> Vec<TrialLog> {
    sessions.iter().flat_map(|s| s.logs.iter().cloned()).collect()
}

fn tasks_present(sessions: &[SessionRecord]) -> Vec<TaskKind> {
    let mut tasks: Vec<TaskKind> = sessions.iter().flat_map(|s| s.logs.iter().map(|l| l.task)).collect();
    tasks.sort();
    tasks.dedup();
    tasks
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], written: &mut Vec<(String, String)>) -> Result<(), HarnessError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| HarnessError::io(&path, e))?;
    written.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
    Ok(())
}

/// Analyses and report text for every task found in the sessions.
pub fn analyze_sessions(sessions: &[SessionRecord]) -> Result<Vec<Analysis>, HarnessError> {
    tasks_present(sessions).into_iter().map(|t| analyze(sessions, t)).collect()
}

fn report_text(analyses: &[Analysis], header: &[(String, String)]) -> String {
    analyses
        .iter()
        .map(|a| render_report(a, header))
        .collect::<Vec<_>>()
        .join("\n")
}

fn write_analysis_files(
    dir: &Path,
    sessions: &[SessionRecord],
    header: &[(String, String)],
    written: &mut Vec<(String, String)>,
) -> Result<Vec<Analysis>, HarnessError> {
    let logs = all_logs(sessions);
    let mut buf = Vec::new();
    write_trial_summary_csv(&logs, &mut buf)?;
    write_file(dir, TRIAL_SUMMARY_FILE, &buf, written)?;
    let analyses = analyze_sessions(sessions)?;
    let multi = analyses.len() > 1;
    let mut cond = Vec::new();
    for (i, a) in analyses.iter().enumerate() {
        let mut part = Vec::new();
        write_condition_summary_csv(a, &mut part)?;
        if i > 0 {
            let skip = part.iter().position(|&b| b == b'\n').map_or(part.len(), |p| p + 1);
            part.drain(..skip);
        }
        cond.extend(part);
        for (measure, result) in &a.anovas {
            let mut buf = Vec::new();
            write_anova_csv(result, &mut buf)?;
            let name = if multi {
                format!("anova_{}_{}.csv", a.task, measure.name())
            } else {
                format!("anova_{}.csv", measure.name())
            };
            write_file(dir, &name, &buf, written)?;
        }
    }
    write_file(dir, CONDITION_SUMMARY_FILE, &cond, written)?;
    write_file(dir, REPORT_FILE, report_text(&analyses, header).as_bytes(), written)?;
    Ok(analyses)
}

/// Writes every artifact of a simulated batch into `dir`.
pub fn write_outputs(dir: &Path, config: &ExperimentConfig, sessions: &[SessionRecord]) -> Result<Vec<Analysis>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    let hash = config.hash();
    write_file(dir, CONFIG_FILE, config.to_toml_string().as_bytes(), &mut written)?;
    let mut buf = Vec::new();
    write_trial_log_csv(&all_logs(sessions), &mut buf)?;
    write_file(dir, TRIAL_LOG_FILE, &buf, &mut written)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["participant", "config_hash", "position", "technique", "distance_m"])
        .map_err(|e| HarnessError::Csv(e.to_string()))?;
    for s in sessions {
        for (i, c) in s.conditions.iter().enumerate() {
            w.write_record([
                s.participant.to_string(),
                s.config_hash.clone(),
                i.to_string(),
                c.technique.to_string(),
                c.distance_m.to_string(),
            ])
            .map_err(|e| HarnessError::Csv(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.to_string()))?;
    write_file(dir, SESSIONS_FILE, &bytes, &mut written)?;

    let header = vec![
        ("preset".to_string(), config.preset.to_string()),
        ("master_seed".to_string(), config.master_seed.to_string()),
        ("config_sha256".to_string(), hash.clone()),
    ];
    let analyses = write_analysis_files(dir, sessions, &header, &mut written)?;

    let manifest = serde_json::json!({
        "log_schema_version": LOG_SCHEMA_VERSION,
        "config_schema_version": config.schema_version,
        "config_sha256": hash,
        "preset": config.preset.as_str(),
        "master_seed": config.master_seed,
        "participants": sessions.len(),
        "files": written.iter().map(|(n, h)| serde_json::json!({"name": n, "sha256": h})).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("json") + "\n";
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(analyses)
}

/// Re-analyses the trial log in `dir`; returns the report text.
pub fn report_from_dir(dir: &Path) -> Result<String, HarnessError> {
    let sessions = import_human_logs(&dir.join(TRIAL_LOG_FILE))?;
    let analyses = analyze_sessions(&sessions)?;
    let header = vec![("source".to_string(), dir.join(TRIAL_LOG_FILE).display().to_string())];
    Ok(report_text(&analyses, &header))
}

/// Imports an external log and, if `out` is given, writes the analysis
/// files there. Returns the sessions and the report text.
pub fn import_and_analyze(logs: &Path, out: Option<&Path>) -> Result<(Vec<SessionRecord>, String), HarnessError> {
    let sessions = import_human_logs(logs)?;
    let header = vec![("source".to_string(), logs.display().to_string())];
    let report = match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
            let mut written = Vec::new();
            let analyses = write_analysis_files(dir, &sessions, &header, &mut written)?;
            report_text(&analyses, &header)
        }
        None => report_text(&analyze_sessions(&sessions)?, &header),
    };
    Ok((sessions, report))
}
