use rayon::prelude::*;
use serde::Serialize;

use crate::agent::{simulate_docking_trial, simulate_selection_trial, stream_rng, StreamKey, TechniqueSetup, TORSO_HEIGHT};
use crate::geometry::{Pose, Vec3};
use crate::portal::ArmReach;
use crate::tasks::{build_selection_layout, DockingTrial, TaskKind, TrialLog};
use crate::technique::Technique;

use super::config::ExperimentConfig;
use super::latin::latin_square_orders;
use super::HarnessError;

/// One technique and distance block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub technique: Technique,
    pub distance_m: f64,
}

/// Everything recorded for one participant.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecord {
    pub participant: u32,
    pub config_hash: String,
    pub conditions: Vec<Condition>,
    pub logs: Vec<TrialLog>,
}

impl SessionRecord {
    pub fn center_selections(&self) -> usize {
        self.logs
            .iter()
            .filter(|l| l.task == TaskKind::Selection && l.target == Some(0))
            .count()
    }

    pub fn scored_ring_selections(&self) -> usize {
        self.logs
            .iter()
            .filter(|l| l.task == TaskKind::Selection && l.scored && l.target.is_some_and(|t| t != 0))
            .count()
    }

    pub fn docking_trials(&self) -> usize {
        self.logs.iter().filter(|l| l.task == TaskKind::Docking).count()
    }
}

/// Condition order per participant: a row of a Latin square over the
/// technique x distance blocks.
pub fn condition_orders(config: &ExperimentConfig) -> Vec<Vec<Condition>> {
    let cells: Vec<Condition> = config
        .techniques
        .iter()
        .flat_map(|&technique| {
            config.distances.iter().map(move |&distance_m| Condition { technique, distance_m })
        })
        .collect();
    latin_square_orders(cells.len(), config.participants as usize, config.master_seed)
        .into_iter()
        .map(|row| row.into_iter().map(|i| cells[i]).collect())
        .collect()
}

fn task_code(task: TaskKind) -> u64 {
    match task {
        TaskKind::Selection => 1,
        TaskKind::Docking => 2,
    }
}

fn technique_code(t: Technique) -> u64 {
    Technique::ALL.iter().position(|&x| x == t).expect("listed") as u64
}

fn simulate_participant(
    config: &ExperimentConfig,
    index: usize,
    conditions: Vec<Condition>,
    hash: &str,
) -> Result<SessionRecord, HarnessError> {
    let participant = index as u32 + 1;
    let reach = ArmReach::new(config.reach.for_participant(index)).map_err(|e| HarnessError::Config {
        path: "reach".into(),
        message: e.to_string(),
    })?;
    let mut logs = Vec::new();
    for cond in &conditions {
        let setup = TechniqueSetup::new(cond.technique, reach, config.room.half_extent);
        let distance_index = config
            .distances
            .iter()
            .position(|&d| d == cond.distance_m)
            .expect("condition from config") as u64;
        for trial in 0..config.trials_per_cell {
            let key = StreamKey {
                task: task_code(config.task),
                technique: technique_code(cond.technique),
                distance_index,
                trial: u64::from(trial),
            };
            let mut rng = stream_rng(config.master_seed, u64::from(participant), key);
            match config.task {
                TaskKind::Selection => {
                    let layout = build_selection_layout(cond.distance_m)?;
                    let set = simulate_selection_trial(&setup, &layout, &config.agent, participant, trial, &mut rng)?;
                    logs.extend(set.logs);
                }
                TaskKind::Docking => {
                    let dock = Pose::from_position(Vec3::new(0.0, TORSO_HEIGHT, -cond.distance_m));
                    let spawn = DockingTrial::spawn(&dock, &mut rng);
                    let mut log = simulate_docking_trial(&setup, &spawn, &config.agent, participant, trial, &mut rng)?;
                    log.distance_m = cond.distance_m;
                    logs.push(log);
                }
            }
        }
    }
    Ok(SessionRecord {
        participant,
        config_hash: hash.to_string(),
        conditions,
        logs,
    })
}

/// Simulates every participant. Output order and content depend only on
/// the config; `parallel` is the worker count, `None` for all cores.
pub fn run_batch(config: &ExperimentConfig, parallel: Option<usize>) -> Result<Vec<SessionRecord>, HarnessError> {
    config.validate()?;
    let hash = config.hash();
    let orders = condition_orders(config);
    let work = || {
        orders
            .clone()
            .into_par_iter()
            .enumerate()
            .map(|(i, conds)| simulate_participant(config, i, conds, &hash))
            .collect::<Result<Vec<_>, _>>()
    };
    match parallel {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| HarnessError::Runtime(e.to_string()))?
            .install(work),
        None => work(),
    }
}
