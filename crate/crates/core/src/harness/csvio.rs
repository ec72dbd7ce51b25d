use std::io::{Read, Write};

use crate::tasks::{EventKind, TaskKind, TrialEvent, TrialLog};
use crate::technique::Technique;

use super::batch::{Condition, SessionRecord};
use super::HarnessError;

/// Version of the trial-log CSV layout.
pub const LOG_SCHEMA_VERSION: u32 = 1;

pub const TRIAL_LOG_COLUMNS: [&str; 18] = [
    "schema_version",
    "record",
    "participant",
    "technique",
    "distance_m",
    "task",
    "trial",
    "target",
    "scored",
    "t_s",
    "event",
    "sphere",
    "value",
    "selection_time_s",
    "docking_time_s",
    "clicks",
    "error_distance_m",
    "success",
];

pub const TRIAL_SUMMARY_COLUMNS: [&str; 12] = [
    "participant",
    "technique",
    "distance_m",
    "trial",
    "selection_time_s",
    "docking_time_s",
    "clicks",
    "error_distance_m",
    "success",
    "task",
    "target",
    "scored",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Csv(e.to_string())
}

/// One row per event, then one summary row, for every trial.
pub fn write_trial_log_csv<W: Write>(logs: &[TrialLog], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_LOG_COLUMNS).map_err(csv_err)?;
    let version = LOG_SCHEMA_VERSION.to_string();
    for log in logs {
        let head = [
            log.participant.to_string(),
            log.technique.to_string(),
            log.distance_m.to_string(),
            log.task.to_string(),
            log.trial.to_string(),
            opt(log.target),
            log.scored.to_string(),
        ];
        for e in &log.events {
            let mut row = vec![version.clone(), "event".to_string()];
            row.extend(head.iter().cloned());
            row.extend([e.t.to_string(), e.kind.to_string(), opt(e.sphere), opt(e.value)]);
            row.extend(std::iter::repeat_n(String::new(), 5));
            w.write_record(&row).map_err(csv_err)?;
        }
        let mut row = vec![version.clone(), "summary".to_string()];
        row.extend(head.iter().cloned());
        row.extend(std::iter::repeat_n(String::new(), 4));
        row.extend([
            opt(log.selection_time_s),
            opt(log.docking_time_s),
            log.clicks.to_string(),
            opt(log.error_distance_m),
            log.success.to_string(),
        ]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.to_string()))
}

/// Flat per-trial table for analysis tools.
pub fn write_trial_summary_csv<W: Write>(logs: &[TrialLog], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_SUMMARY_COLUMNS).map_err(csv_err)?;
    for log in logs {
        w.write_record([
            log.participant.to_string(),
            log.technique.to_string(),
            log.distance_m.to_string(),
            log.trial.to_string(),
            opt(log.selection_time_s),
            opt(log.docking_time_s),
            log.clicks.to_string(),
            opt(log.error_distance_m),
            log.success.to_string(),
            log.task.to_string(),
            opt(log.target),
            log.scored.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.to_string()))
}

struct Row<'a> {
    line: u64,
    rec: &'a csv::StringRecord,
}

impl Row<'_> {
    fn err(&self, message: impl Into<String>) -> HarnessError {
        HarnessError::Import {
            row: self.line,
            message: message.into(),
        }
    }

    fn field(&self, col: usize) -> &str {
        self.rec.get(col).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&self, col: usize) -> Result<T, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.field(col);
        raw.parse::<T>()
            .map_err(|e| self.err(format!("column `{}`: cannot parse `{raw}`: {e}", TRIAL_LOG_COLUMNS[col])))
    }

    fn parse_opt<T: std::str::FromStr>(&self, col: usize) -> Result<Option<T>, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        if self.field(col).is_empty() {
            Ok(None)
        } else {
            self.parse(col).map(Some)
        }
    }
}

type Key = (u32, Technique, u64, TaskKind, u32, Option<u32>, bool);

fn row_key(row: &Row<'_>) -> Result<Key, HarnessError> {
    Ok((
        row.parse(2)?,
        row.parse(3)?,
        row.parse::<f64>(4)?.to_bits(),
        row.parse(5)?,
        row.parse(6)?,
        row.parse_opt(7)?,
        row.parse(8)?,
    ))
}

/// Parses and validates a trial-log CSV.
pub fn read_trial_log_csv<R: Read>(input: R) -> Result<Vec<TrialLog>, HarnessError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != TRIAL_LOG_COLUMNS {
        return Err(HarnessError::Import {
            row: 1,
            message: format!("unexpected header: {}", found.join(",")),
        });
    }
    let mut logs = Vec::new();
    let mut pending: Option<(Key, Vec<TrialEvent>)> = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = Row { line: i as u64 + 2, rec: &rec };
        let version: u32 = row.parse(0)?;
        if version != LOG_SCHEMA_VERSION {
            return Err(row.err(format!("schema version {version}, expected {LOG_SCHEMA_VERSION}")));
        }
        let key = row_key(&row)?;
        match row.field(1) {
            "event" => {
                let event = TrialEvent {
                    t: row.parse(9)?,
                    kind: row.parse::<EventKind>(10)?,
                    sphere: row.parse_opt(11)?,
                    value: row.parse_opt(12)?,
                };
                match &mut pending {
                    Some((k, events)) if *k == key => {
                        if let Some(prev) = events.last() {
                            if !(event.t >= prev.t) {
                                return Err(row.err(format!(
                                    "timestamp {} decreases from {}",
                                    event.t, prev.t
                                )));
                            }
                        }
                        events.push(event);
                    }
                    Some(_) => return Err(row.err("previous trial has no summary row")),
                    None => pending = Some((key, vec![event])),
                }
            }
            "summary" => {
                let events = match pending.take() {
                    Some((k, events)) if k == key => events,
                    Some(_) => return Err(row.err("summary row does not match the preceding events")),
                    None => Vec::new(),
                };
                let log = TrialLog {
                    participant: key.0,
                    technique: key.1,
                    distance_m: f64::from_bits(key.2),
                    task: key.3,
                    trial: key.4,
                    target: key.5,
                    scored: key.6,
                    selection_time_s: row.parse_opt(13)?,
                    docking_time_s: row.parse_opt(14)?,
                    clicks: row.parse(15)?,
                    error_distance_m: row.parse_opt(16)?,
                    success: row.parse(17)?,
                    events,
                };
                log.validate().map_err(|e| row.err(e.to_string()))?;
                logs.push(log);
            }
            other => return Err(row.err(format!("unknown record type `{other}`"))),
        }
    }
    if pending.is_some() {
        return Err(HarnessError::Import {
            row: 0,
            message: "file ends inside a trial without its summary row".into(),
        });
    }
    Ok(logs)
}

/// Groups logs into sessions by participant, in first-appearance order.
pub fn sessions_from_logs(logs: Vec<TrialLog>, config_hash: &str) -> Vec<SessionRecord> {
    let mut sessions: Vec<SessionRecord> = Vec::new();
    for log in logs {
        let idx = match sessions.iter().position(|s| s.participant == log.participant) {
            Some(i) => i,
            None => {
                sessions.push(SessionRecord {
                    participant: log.participant,
                    config_hash: config_hash.to_string(),
                    conditions: Vec::new(),
                    logs: Vec::new(),
                });
                sessions.len() - 1
            }
        };
        let s = &mut sessions[idx];
        let cond = Condition {
            technique: log.technique,
            distance_m: log.distance_m,
        };
        if s.conditions.last() != Some(&cond) {
            s.conditions.push(cond);
        }
        s.logs.push(log);
    }
    sessions
}

/// Imports a trial-log file into sessions.
pub fn import_human_logs(path: &std::path::Path) -> Result<Vec<SessionRecord>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let logs = read_trial_log_csv(std::io::BufReader::new(file))?;
    Ok(sessions_from_logs(logs, "imported"))
}
