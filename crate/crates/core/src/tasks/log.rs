use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::technique::Technique;

use super::TaskError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Selection,
    Docking,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Selection => "selection",
            TaskKind::Docking => "docking",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "selection" => Ok(TaskKind::Selection),
            "docking" => Ok(TaskKind::Docking),
            _ => Err(format!("unknown task `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    TrialStart,
    Click,
    Hover,
    Grab,
    Release,
    PortalOpen,
    PortalOpenFailed,
    PortalClose,
    TeleportStart,
    TeleportArrive,
    Docked,
    TrialEnd,
}

impl EventKind {
    pub const ALL: [EventKind; 12] = [
        EventKind::TrialStart,
        EventKind::Click,
        EventKind::Hover,
        EventKind::Grab,
        EventKind::Release,
        EventKind::PortalOpen,
        EventKind::PortalOpenFailed,
        EventKind::PortalClose,
        EventKind::TeleportStart,
        EventKind::TeleportArrive,
        EventKind::Docked,
        EventKind::TrialEnd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::TrialStart => "trial_start",
            EventKind::Click => "click",
            EventKind::Hover => "hover",
            EventKind::Grab => "grab",
            EventKind::Release => "release",
            EventKind::PortalOpen => "portal_open",
            EventKind::PortalOpenFailed => "portal_open_failed",
            EventKind::PortalClose => "portal_close",
            EventKind::TeleportStart => "teleport_start",
            EventKind::TeleportArrive => "teleport_arrive",
            EventKind::Docked => "docked",
            EventKind::TrialEnd => "trial_end",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown event `{s}`"))
    }
}

/// A timestamped input or state event. `sphere` is the hit sphere for
/// clicks and hovers; `value` carries an event-specific quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialEvent {
    pub t: f64,
    pub kind: EventKind,
    pub sphere: Option<u32>,
    pub value: Option<f64>,
}

impl TrialEvent {
    pub fn new(t: f64, kind: EventKind) -> Self {
        Self {
            t,
            kind,
            sphere: None,
            value: None,
        }
    }

    pub fn click(t: f64, hit: Option<u32>) -> Self {
        Self {
            sphere: hit,
            ..Self::new(t, EventKind::Click)
        }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }
}

/// Record of one selection (Task 1) or one docking trial (Task 2).
///
/// For selections `trial` is the layout repetition and `target` the sphere
/// id; `scored` is false for the center and the first ring sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub participant: u32,
    pub technique: Technique,
    pub distance_m: f64,
    pub task: TaskKind,
    pub trial: u32,
    pub target: Option<u32>,
    pub scored: bool,
    pub selection_time_s: Option<f64>,
    pub docking_time_s: Option<f64>,
    pub clicks: u32,
    pub error_distance_m: Option<f64>,
    pub success: bool,
    pub events: Vec<TrialEvent>,
}

impl TrialLog {
    pub fn new(participant: u32, technique: Technique, distance_m: f64, task: TaskKind, trial: u32) -> Self {
        Self {
            participant,
            technique,
            distance_m,
            task,
            trial,
            target: None,
            scored: true,
            selection_time_s: None,
            docking_time_s: None,
            clicks: 0,
            error_distance_m: None,
            success: false,
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, event: TrialEvent) {
        self.events.push(event);
    }

    pub fn first_event_time(&self) -> Option<f64> {
        self.events.first().map(|e| e.t)
    }

    pub fn last_event_time(&self) -> Option<f64> {
        self.events.last().map(|e| e.t)
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        for (i, pair) in self.events.windows(2).enumerate() {
            if !(pair[1].t >= pair[0].t) {
                return Err(TaskError::NonMonotoneTimestamps {
                    index: i + 1,
                    time: pair[1].t,
                    previous: pair[0].t,
                });
            }
        }
        if self.success {
            match self.task {
                TaskKind::Selection => {
                    if !self.selection_time_s.is_some_and(|t| t > 0.0) {
                        return Err(TaskError::NonPositiveTime("selection_time_s"));
                    }
                    if self.clicks < 1 {
                        return Err(TaskError::TooFewClicks { clicks: self.clicks });
                    }
                }
                TaskKind::Docking => {
                    if !self.docking_time_s.is_some_and(|t| t > 0.0) {
                        return Err(TaskError::NonPositiveTime("docking_time_s"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn selection() -> TrialLog {
        let mut log = TrialLog::new(1, Technique::Portal, 3.0, TaskKind::Selection, 0);
        log.push(TrialEvent::new(0.0, EventKind::TrialStart));
        log.push(TrialEvent::click(0.8, Some(4)));
        log.success = true;
        log.clicks = 1;
        log.selection_time_s = Some(0.8);
        log
    }

    #[test]
    fn valid_log_passes() {
        selection().validate().unwrap();
    }

    #[test]
    fn decreasing_timestamp_rejected() {
        let mut log = selection();
        log.push(TrialEvent::click(0.5, None));
        assert!(matches!(log.validate(), Err(TaskError::NonMonotoneTimestamps { index: 2, .. })));
    }

    #[test]
    fn success_needs_positive_time() {
        let mut log = selection();
        log.selection_time_s = Some(0.0);
        assert!(log.validate().is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in EventKind::ALL {
            assert_eq!(k.as_str().parse::<EventKind>().unwrap(), k);
        }
        assert_eq!("docking".parse::<TaskKind>().unwrap(), TaskKind::Docking);
    }
}
