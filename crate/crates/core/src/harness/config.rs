use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::AgentParams;
use crate::portal::ArmReach;
use crate::tasks::TaskKind;
use crate::technique::Technique;

use super::HarnessError;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Study1Task1,
    Study1Task2,
    Study2,
    Custom,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Study1Task1 => "study1_task1",
            Preset::Study1Task2 => "study1_task2",
            Preset::Study2 => "study2",
            Preset::Custom => "custom",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Preset::Study1Task1, Preset::Study1Task2, Preset::Study2, Preset::Custom]
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomConfig {
    /// Center-to-wall distance, meters.
    pub half_extent: f64,
    pub floor_height: f64,
}

impl Default for RoomConfig {
    fn default() -> Self {
        Self {
            half_extent: 10.0,
            floor_height: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReachConfig {
    /// Arm reach used for participants without an explicit value, meters.
    pub default_m: f64,
    pub per_participant_m: Vec<f64>,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            default_m: STUDY1_REACH,
            per_participant_m: Vec::new(),
        }
    }
}

impl ReachConfig {
    pub fn for_participant(&self, index: usize) -> f64 {
        self.per_participant_m.get(index).copied().unwrap_or(self.default_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureFlags {
    pub portal_relocation_enabled: bool,
    pub portal_passthrough_enabled: bool,
}

/// Mean arm reach of the first study's participants, meters.
pub const STUDY1_REACH: f64 = 0.6143;
/// Mean arm reach of the second study's participants, meters.
pub const STUDY2_REACH: f64 = 0.5453;

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub preset: Preset,
    pub task: TaskKind,
    pub techniques: Vec<Technique>,
    pub distances: Vec<f64>,
    pub trials_per_cell: u32,
    pub participants: u32,
    pub master_seed: u64,
    pub room: RoomConfig,
    pub reach: ReachConfig,
    pub agent: AgentParams,
    pub features: FeatureFlags,
}

/// As written in a config file; missing fields come from the preset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    #[serde(default)]
    preset: Option<Preset>,
    task: Option<TaskKind>,
    techniques: Option<Vec<Technique>>,
    distances: Option<Vec<f64>>,
    trials_per_cell: Option<u32>,
    participants: Option<u32>,
    master_seed: Option<u64>,
    room: Option<RoomConfig>,
    reach: Option<ReachConfig>,
    agent: Option<AgentParams>,
    features: Option<FeatureFlags>,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            preset,
            task: TaskKind::Selection,
            techniques: vec![Technique::Portal, Technique::Homer, Technique::LinearOffset],
            distances: vec![3.0, 6.0, 9.0],
            trials_per_cell: 3,
            participants: 21,
            master_seed: 1,
            room: RoomConfig::default(),
            reach: ReachConfig::default(),
            agent: AgentParams::default(),
            features: FeatureFlags::default(),
        };
        match preset {
            Preset::Study1Task1 | Preset::Custom => base,
            Preset::Study1Task2 => Self {
                task: TaskKind::Docking,
                ..base
            },
            Preset::Study2 => Self {
                task: TaskKind::Docking,
                techniques: vec![Technique::Portal, Technique::Teleport],
                trials_per_cell: 9,
                participants: 22,
                reach: ReachConfig {
                    default_m: STUDY2_REACH,
                    per_participant_m: Vec::new(),
                },
                ..base
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let de = toml::Deserializer::parse(text).map_err(|e| HarnessError::Config {
            path: String::new(),
            message: e.to_string(),
        })?;
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        Self::resolve(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    fn resolve(raw: RawConfig) -> Result<Self, HarnessError> {
        if raw.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(HarnessError::Config {
                path: "schema_version".into(),
                message: format!("expected {CONFIG_SCHEMA_VERSION}, found {}", raw.schema_version),
            });
        }
        let preset = raw.preset.unwrap_or(Preset::Custom);
        let base = Self::preset(preset);
        if preset != Preset::Custom {
            let pinned = [
                ("task", raw.task.is_some_and(|t| t != base.task)),
                ("techniques", raw.techniques.as_ref().is_some_and(|t| *t != base.techniques)),
                ("distances", raw.distances.as_ref().is_some_and(|d| *d != base.distances)),
                ("trials_per_cell", raw.trials_per_cell.is_some_and(|n| n != base.trials_per_cell)),
            ];
            if let Some((field, _)) = pinned.iter().find(|(_, differs)| *differs) {
                return Err(HarnessError::Config {
                    path: (*field).into(),
                    message: format!("fixed by preset `{preset}`; use preset = \"custom\" to change it"),
                });
            }
        }
        let config = Self {
            schema_version: raw.schema_version,
            preset,
            task: raw.task.unwrap_or(base.task),
            techniques: raw.techniques.unwrap_or(base.techniques),
            distances: raw.distances.unwrap_or(base.distances),
            trials_per_cell: raw.trials_per_cell.unwrap_or(base.trials_per_cell),
            participants: raw.participants.unwrap_or(base.participants),
            master_seed: raw.master_seed.unwrap_or(base.master_seed),
            room: raw.room.unwrap_or(base.room),
            reach: raw.reach.unwrap_or(base.reach),
            agent: raw.agent.unwrap_or(base.agent),
            features: raw.features.unwrap_or(base.features),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |path: String, message: String| Err(HarnessError::Config { path, message });
        if self.techniques.is_empty() {
            return err("techniques".into(), "at least one technique is required".into());
        }
        for (i, t) in self.techniques.iter().enumerate() {
            if self.techniques[..i].contains(t) {
                return err(format!("techniques[{i}]"), format!("duplicate technique `{t}`"));
            }
            if self.task == TaskKind::Selection && *t == Technique::Teleport {
                return err(format!("techniques[{i}]"), "teleport has no selection mode".into());
            }
        }
        if self.distances.is_empty() {
            return err("distances".into(), "at least one distance is required".into());
        }
        for (i, d) in self.distances.iter().enumerate() {
            if !(*d > 0.0 && d.is_finite()) {
                return err(format!("distances[{i}]"), format!("must be positive, got {d}"));
            }
            if self.distances[..i].contains(d) {
                return err(format!("distances[{i}]"), format!("duplicate distance {d}"));
            }
        }
        if self.trials_per_cell < 1 {
            return err("trials_per_cell".into(), "must be at least 1".into());
        }
        if self.participants < 1 {
            return err("participants".into(), "must be at least 1".into());
        }
        if !(self.room.half_extent > 0.0 && self.room.half_extent.is_finite()) {
            return err("room.half_extent".into(), format!("must be positive, got {}", self.room.half_extent));
        }
        if ArmReach::new(self.reach.default_m).is_err() {
            return err(
                "reach.default_m".into(),
                format!("must lie in [{}, {}] m, got {}", ArmReach::MIN, ArmReach::MAX, self.reach.default_m),
            );
        }
        for (i, r) in self.reach.per_participant_m.iter().enumerate() {
            if ArmReach::new(*r).is_err() {
                return err(format!("reach.per_participant_m[{i}]"), format!("out of range: {r}"));
            }
        }
        if self.techniques.contains(&Technique::LinearOffset) {
            let max_d = self.distances.iter().copied().fold(0.0, f64::max);
            if self.room.half_extent < max_d {
                return err(
                    "room.half_extent".into(),
                    format!("Linear Offset cannot reach targets at {max_d} m in a room of half extent {}", self.room.half_extent),
                );
            }
        }
        if self.techniques.contains(&Technique::Portal) {
            for (i, d) in self.distances.iter().enumerate() {
                let r = self.reach.default_m.max(self.reach.per_participant_m.iter().copied().fold(0.0, f64::max));
                if *d <= r {
                    return err(format!("distances[{i}]"), format!("{d} m is within arm reach; a portal needs a remote target"));
                }
            }
        }
        self.agent.validate().map_err(|e| HarnessError::Config {
            path: "agent".into(),
            message: e.to_string(),
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn cell_count(&self) -> usize {
        self.techniques.len() * self.distances.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_toml() {
        for p in [Preset::Study1Task1, Preset::Study1Task2, Preset::Study2] {
            let c = ExperimentConfig::preset(p);
            c.validate().unwrap();
            let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn minimal_file_uses_preset() {
        let c = ExperimentConfig::from_toml_str("schema_version = 1\npreset = \"study2\"\nmaster_seed = 9\n").unwrap();
        assert_eq!(c.techniques, vec![Technique::Portal, Technique::Teleport]);
        assert_eq!(c.trials_per_cell, 9);
        assert_eq!(c.master_seed, 9);
    }

    #[test]
    fn errors_carry_field_paths() {
        let e = ExperimentConfig::from_toml_str("schema_version = 1\npreset = \"custom\"\ndistances = [3.0, -1.0]\n").unwrap_err();
        assert!(e.to_string().contains("distances[1]"), "{e}");
        let e = ExperimentConfig::from_toml_str("schema_version = 1\n[agent]\nfitts_a = \"slow\"\n").unwrap_err();
        assert!(e.to_string().contains("agent.fitts_a"), "{e}");
        let e = ExperimentConfig::from_toml_str("schema_version = 2\n").unwrap_err();
        assert!(e.to_string().contains("schema_version"), "{e}");
        let e = ExperimentConfig::from_toml_str("schema_version = 1\npreset = \"study1_task1\"\ntrials_per_cell = 5\n").unwrap_err();
        assert!(e.to_string().contains("trials_per_cell"), "{e}");
        let e = ExperimentConfig::from_toml_str("schema_version = 1\ncolour = 3\n").unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::preset(Preset::Study1Task1);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.master_seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
