//! Scenario files: a single JSON document describing units, tasks, the
//! distance model and dispatch constants.
//!
//! ```json
//! {
//!   "format": "rescue-scenario/1",
//!   "name": "port-arthur",
//!   "epoch": "2017-08-30",
//!   "start": "14:00",
//!   "config": { "speed_mph": 20, "prep_minutes": 30, "rest_minutes": 0,
//!               "dis_radius_miles": 2, "high_priority_threshold": 7,
//!               "ema_alpha": 0.5, "seed_burst_minutes": 54, "unit_capacity": 3,
//!               "weights": { "label_weights": {..}, "env_weights": {..},
//!                            "base_priority": 1, "max_priority": 10 } },
//!   "units": [ { "id": "1" } ],
//!   "tasks": [ { "id": "1", "arrival": "12:13", "burst": 54,
//!                "labels": { "flood": 1 }, "env": { "storm": 1 },
//!                "distance_from_base": 5.1 } ],
//!   "distance_matrix": { "base": { "t1": 5.1 }, "t1": { "t3": 2.0 } }
//! }
//! ```
//!
//! With `distance_matrix` (or any `distance_from_base`) the scenario runs in
//! matrix mode: tasks default to node `t<ID>` and units to node `base`.
//! Otherwise every task needs a `location` of `{lat, lon}` and the scenario a
//! `base` point, and distances are great-circle miles.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::burst::BurstPredictor;
use crate::error::{Error, Result};
use crate::geo::{DistanceMatrix, DistanceModel, GeoPoint, Location, BASE_NODE};
use crate::labels::LabelVector;
use crate::priority::{score, EnvVector, WeightConfig};
use crate::sched::{self, DispatchContext, EnvUpdate, Policy, Schedule, SchedulerConfig};
use crate::task::{PrioritySource, RescueTask, RescueUnit};
use crate::time::TimePoint;

pub const SCENARIO_FORMAT: &str = "rescue-scenario/1";

fn scenario_format() -> String {
    SCENARIO_FORMAT.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub speed_mph: f64,
    pub prep_minutes: u32,
    pub rest_minutes: u32,
    pub dis_radius_miles: f64,
    pub high_priority_threshold: f64,
    pub saturation_gated_grouping: bool,
    pub ema_alpha: f64,
    pub seed_burst_minutes: f64,
    pub unit_capacity: u32,
    pub weights: WeightConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let sched = SchedulerConfig::default();
        ScenarioConfig {
            speed_mph: 20.0,
            prep_minutes: 30,
            rest_minutes: 0,
            dis_radius_miles: sched.dis_radius_miles,
            high_priority_threshold: sched.high_priority_threshold,
            saturation_gated_grouping: sched.saturation_gated_grouping,
            ema_alpha: 0.5,
            seed_burst_minutes: 54.0,
            unit_capacity: 3,
            weights: WeightConfig::demo(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub capabilities: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_mph: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prep_minutes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rest_minutes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Location>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub available_at: Option<TimePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    pub arrival: TimePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default)]
    pub labels: LabelVector,
    #[serde(default)]
    pub env: EnvVector,
    /// Fixes the priority instead of scoring labels and env.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burst: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual_burst: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_from_base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub required_capabilities: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "scenario_format")]
    pub format: String,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<String>,
    /// Default availability of units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<TimePoint>,
    #[serde(default)]
    pub config: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<GeoPoint>,
    #[serde(default)]
    pub units: Vec<UnitSpec>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<DistanceMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub env_updates: Vec<EnvUpdate>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(vec![format!("scenario JSON: {e}")]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// A validated scenario ready to schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub tasks: Vec<RescueTask>,
    pub units: Vec<RescueUnit>,
    pub distances: DistanceModel,
    pub weights: WeightConfig,
    pub scheduler: SchedulerConfig,
    pub ema_alpha: f64,
    pub seed_burst_minutes: f64,
    pub env_updates: Vec<EnvUpdate>,
    unit_template: RescueUnit,
}

fn valid_iso_date(s: &str) -> bool {
    let parts: Vec<&str> = s.split('-').collect();
    if parts.len() != 3 || parts[0].len() != 4 || parts[1].len() != 2 || parts[2].len() != 2 {
        return false;
    }
    let nums: Option<Vec<u32>> = parts.iter().map(|p| p.parse().ok()).collect();
    matches!(nums.as_deref(), Some([_, m, d]) if (1..=12).contains(m) && (1..=31).contains(d))
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_file(&ScenarioFile::from_json(&text)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&ScenarioFile::from_json(text)?)
    }

    pub fn from_file(file: &ScenarioFile) -> Result<Self> {
        let mut problems = Vec::new();
        let cfg = &file.config;
        if file.format != SCENARIO_FORMAT {
            problems.push(format!("format: expected `{SCENARIO_FORMAT}`, got `{}`", file.format));
        }
        if let Some(epoch) = &file.epoch {
            if !valid_iso_date(epoch) {
                problems.push(format!("epoch: `{epoch}` is not an ISO date (YYYY-MM-DD)"));
            }
        }
        if !(cfg.speed_mph > 0.0) {
            problems.push("config.speed_mph: must be positive".into());
        }
        if !(cfg.dis_radius_miles > 0.0) {
            problems.push("config.dis_radius_miles: must be positive".into());
        }
        if !(0.0..=1.0).contains(&cfg.ema_alpha) {
            problems.push("config.ema_alpha: must lie in [0, 1]".into());
        }
        if !(cfg.seed_burst_minutes > 0.0) {
            problems.push("config.seed_burst_minutes: must be positive".into());
        }
        if cfg.unit_capacity == 0 {
            problems.push("config.unit_capacity: must be at least 1".into());
        }
        if let Err(e) = cfg.weights.validate() {
            problems.push(format!("config.weights: {e}"));
        }
        let w = &cfg.weights;
        if !(cfg.high_priority_threshold >= w.base_priority && cfg.high_priority_threshold <= w.max_priority) {
            problems.push("config.high_priority_threshold: outside [base_priority, max_priority]".into());
        }

        let matrix_mode =
            file.distance_matrix.is_some() || file.tasks.iter().any(|t| t.distance_from_base.is_some());
        let mut matrix = file.distance_matrix.clone().unwrap_or_default();
        if let Err(Error::Validation(p)) = matrix.validate() {
            problems.extend(p);
        }
        if let Some(base) = &file.base {
            if let Err(e) = base.validate() {
                problems.push(format!("base: {e}"));
            }
        }
        let default_base = if matrix_mode {
            Some(Location::base())
        } else {
            file.base.map(Location::Point)
        };
        if !matrix_mode && default_base.is_none() && !file.tasks.is_empty() {
            problems.push("base: coordinates mode needs a base point (or supply distance_matrix)".into());
        }

        let mut seen = std::collections::BTreeSet::new();
        let mut tasks = Vec::with_capacity(file.tasks.len());
        for (i, spec) in file.tasks.iter().enumerate() {
            let at = |field: &str| format!("tasks[{i}] (id `{}`).{field}", spec.id);
            if spec.id.is_empty() {
                problems.push(format!("tasks[{i}].id: must not be empty"));
            }
            if !seen.insert(spec.id.clone()) {
                problems.push(format!("{}: duplicate id", at("id")));
            }
            if spec.burst == Some(0) {
                problems.push(format!("{}: must be positive", at("burst")));
            }
            if spec.actual_burst == Some(0) {
                problems.push(format!("{}: must be positive", at("actual_burst")));
            }
            let location = match (&spec.location, matrix_mode) {
                (Some(Location::Point(p)), false) => {
                    if let Err(e) = p.validate() {
                        problems.push(format!("{}: {e}", at("location")));
                    }
                    Location::Point(*p)
                }
                (Some(Location::Node(k)), true) => Location::Node(k.clone()),
                (None, true) => Location::node(format!("t{}", spec.id)),
                (Some(_), true) => {
                    problems.push(format!("{}: matrix mode expects a node key", at("location")));
                    continue;
                }
                (_, false) => {
                    problems.push(format!("{}: coordinates mode needs {{lat, lon}}", at("location")));
                    continue;
                }
            };
            if let (Some(d), Location::Node(key)) = (spec.distance_from_base, &location) {
                if !(d >= 0.0) {
                    problems.push(format!("{}: must be non-negative", at("distance_from_base")));
                }
                match matrix.get(BASE_NODE, key) {
                    Some(m) if (m - d).abs() > 1e-9 => problems.push(format!(
                        "{}: {d} disagrees with distance_matrix ({m})",
                        at("distance_from_base")
                    )),
                    Some(_) => {}
                    None => matrix.insert(BASE_NODE, key, d),
                }
            }
            let (priority, priority_source) = match spec.priority {
                Some(p) => {
                    if !(p >= w.base_priority && p <= w.max_priority) {
                        problems.push(format!("{}: {p} outside [{}, {}]", at("priority"), w.base_priority, w.max_priority));
                    }
                    (p, PrioritySource::Explicit)
                }
                None => match score(&spec.labels, &spec.env, w) {
                    Ok(s) => (s.value(), PrioritySource::Scored),
                    Err(e) => {
                        problems.push(format!("{}: {e}", at("env")));
                        (w.base_priority, PrioritySource::Scored)
                    }
                },
            };
            let demand = spec.demand.unwrap_or(1);
            tasks.push(RescueTask {
                id: spec.id.clone(),
                arrival: spec.arrival,
                text: spec.text.clone(),
                labels: spec.labels,
                env: spec.env.clone(),
                location,
                burst: spec.burst,
                actual_burst: spec.actual_burst,
                priority,
                priority_source,
                required_capabilities: spec.required_capabilities.iter().cloned().collect(),
                demand,
            });
        }

        for (i, u) in file.env_updates.iter().enumerate() {
            if !seen.contains(&u.task_id) {
                problems.push(format!("env_updates[{i}].task: unknown task `{}`", u.task_id));
            }
            if let Err(e) = score(&LabelVector::default(), &u.env, w) {
                problems.push(format!("env_updates[{i}].env: {e}"));
            }
        }

        let start = file.start.unwrap_or(TimePoint::ZERO);
        let template = RescueUnit {
            id: String::new(),
            capabilities: Default::default(),
            capacity: cfg.unit_capacity,
            speed_mph: cfg.speed_mph,
            prep_minutes: cfg.prep_minutes,
            rest_minutes: cfg.rest_minutes,
            base: default_base.clone().unwrap_or_else(Location::base),
            available_at: start,
        };
        let mut units = Vec::with_capacity(file.units.len());
        let mut unit_ids = std::collections::BTreeSet::new();
        for (i, spec) in file.units.iter().enumerate() {
            if !unit_ids.insert(spec.id.clone()) {
                problems.push(format!("units[{i}].id: duplicate `{}`", spec.id));
            }
            let unit = RescueUnit {
                id: spec.id.clone(),
                capabilities: spec.capabilities.iter().cloned().collect(),
                capacity: spec.capacity.unwrap_or(template.capacity),
                speed_mph: spec.speed_mph.unwrap_or(template.speed_mph),
                prep_minutes: spec.prep_minutes.unwrap_or(template.prep_minutes),
                rest_minutes: spec.rest_minutes.unwrap_or(template.rest_minutes),
                base: spec.base.clone().unwrap_or_else(|| template.base.clone()),
                available_at: spec.available_at.unwrap_or(start),
            };
            if unit.capacity == 0 {
                problems.push(format!("units[{i}].capacity: must be at least 1"));
            }
            if !(unit.speed_mph > 0.0) {
                problems.push(format!("units[{i}].speed_mph: must be positive"));
            }
            units.push(unit);
        }

        let distances = if matrix_mode {
            DistanceModel::Matrix(matrix)
        } else {
            DistanceModel::Coordinates
        };
        for task in &tasks {
            for unit in units.iter().chain(std::iter::once(&template)) {
                if distances.distance(&unit.base, &task.location).is_err() {
                    problems.push(format!(
                        "task `{}`: distance from {} is not resolvable",
                        task.id, unit.base
                    ));
                    break;
                }
            }
        }

        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Scenario {
            name: file.name.clone(),
            tasks,
            units,
            distances,
            weights: cfg.weights.clone(),
            scheduler: SchedulerConfig {
                dis_radius_miles: cfg.dis_radius_miles,
                high_priority_threshold: cfg.high_priority_threshold,
                saturation_gated_grouping: cfg.saturation_gated_grouping,
            },
            ema_alpha: cfg.ema_alpha,
            seed_burst_minutes: cfg.seed_burst_minutes,
            env_updates: file.env_updates.clone(),
            unit_template: template,
        })
    }

    /// Replaces the fleet with `n` identical units `1..=n` built from the
    /// scenario defaults.
    pub fn with_unit_count(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("unit count must be at least 1".into()));
        }
        let mut s = self.clone();
        s.units = (1..=n)
            .map(|i| RescueUnit {
                id: i.to_string(),
                ..self.unit_template.clone()
            })
            .collect();
        Ok(s)
    }

    pub fn predictor(&self) -> Result<BurstPredictor> {
        BurstPredictor::with_alpha(self.seed_burst_minutes, self.ema_alpha)
    }

    pub fn context(&self) -> DispatchContext<'_> {
        DispatchContext::new(&self.distances, &self.weights)
            .with_config(self.scheduler)
            .with_env_updates(&self.env_updates)
    }

    /// Runs `policy` with a fresh predictor.
    pub fn run(&self, policy: Policy) -> Result<Schedule> {
        let mut predictor = self.predictor()?;
        sched::schedule(policy, &self.tasks, &self.units, &self.context(), &mut predictor)
    }
}
