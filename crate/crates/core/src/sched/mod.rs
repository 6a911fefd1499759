//! Multi-unit dispatch: FCFS, priority, and multi-task hybrid policies.
//!
//! All three share one discrete-event loop. Units start at their base, are
//! dispatched as soon as they are idle and a servable task is queued, travel
//! each leg, serve on site, return to base and prepare before the next
//! mission. The hybrid policy additionally chains nearby queued tasks onto
//! the anchor's mission and rebalances priorities whenever a mission ends.

mod engine;
pub mod events;
pub mod queue;

use serde::{Deserialize, Serialize};

use crate::burst::BurstPredictor;
use crate::error::{Error, Result};
use crate::geo::DistanceModel;
use crate::metrics::MetricsReport;
use crate::priority::WeightConfig;
use crate::task::{Mission, RescueTask, RescueUnit, ScheduleEntry};

pub use events::{EnvUpdate, EventStream, SimEvent, TimedEvent, TraceKind, TraceRecord};
pub use queue::{compare, planned_burst, Policy, TaskQueue};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    /// Grouping radius around the anchor task, inclusive.
    pub dis_radius_miles: f64,
    /// Queued tasks at or above this priority get their own unit when
    /// another capable unit can take them.
    pub high_priority_threshold: f64,
    /// Only group when the queue holds more tasks than there are idle units.
    pub saturation_gated_grouping: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            dis_radius_miles: 2.0,
            high_priority_threshold: 7.0,
            saturation_gated_grouping: true,
        }
    }
}

/// Everything besides tasks and units that a dispatch run depends on.
#[derive(Clone, Copy, Debug)]
pub struct DispatchContext<'a> {
    pub distances: &'a DistanceModel,
    pub weights: &'a WeightConfig,
    pub config: SchedulerConfig,
    pub env_updates: &'a [EnvUpdate],
}

impl<'a> DispatchContext<'a> {
    pub fn new(distances: &'a DistanceModel, weights: &'a WeightConfig) -> Self {
        DispatchContext {
            distances,
            weights,
            config: SchedulerConfig::default(),
            env_updates: &[],
        }
    }

    pub fn with_config(mut self, config: SchedulerConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_env_updates(mut self, updates: &'a [EnvUpdate]) -> Self {
        self.env_updates = updates;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unschedulable {
    pub task_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub policy: Policy,
    /// Rows in dispatch order (mission by mission, legs in visiting order).
    pub entries: Vec<ScheduleEntry>,
    pub missions: Vec<Mission>,
    pub unschedulable: Vec<Unschedulable>,
    /// Tasks still queued when the run ended.
    pub pending: Vec<String>,
    /// Maintained incrementally by the event loop as tasks finish.
    pub metrics: MetricsReport,
    pub final_burst_estimate: f64,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
}

impl Schedule {
    pub fn entry(&self, task_id: &str) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| e.task_id == task_id)
    }
}

/// Runs `policy` over `tasks` with `units`, driving `predictor` with every
/// observed completion.
pub fn schedule(
    policy: Policy,
    tasks: &[RescueTask],
    units: &[RescueUnit],
    ctx: &DispatchContext<'_>,
    predictor: &mut BurstPredictor,
) -> Result<Schedule> {
    validate(tasks, units, ctx)?;
    engine::Engine::new(policy, tasks, units, ctx, predictor).run()
}

/// Arrival-order dispatch, one task per mission.
pub fn schedule_fcfs(
    tasks: &[RescueTask],
    units: &[RescueUnit],
    ctx: &DispatchContext<'_>,
    predictor: &mut BurstPredictor,
) -> Result<Schedule> {
    schedule(Policy::Fcfs, tasks, units, ctx, predictor)
}

/// Priority-queue dispatch, one task per mission.
pub fn schedule_priority(
    tasks: &[RescueTask],
    units: &[RescueUnit],
    ctx: &DispatchContext<'_>,
    predictor: &mut BurstPredictor,
) -> Result<Schedule> {
    schedule(Policy::Priority, tasks, units, ctx, predictor)
}

/// Priority dispatch with geographic task chaining and priority balancing.
pub fn schedule_hybrid(
    tasks: &[RescueTask],
    units: &[RescueUnit],
    ctx: &DispatchContext<'_>,
    predictor: &mut BurstPredictor,
) -> Result<Schedule> {
    schedule(Policy::Hybrid, tasks, units, ctx, predictor)
}

fn validate(tasks: &[RescueTask], units: &[RescueUnit], ctx: &DispatchContext<'_>) -> Result<()> {
    if units.is_empty() {
        return Err(Error::InvalidConfig("at least one rescue unit is required".into()));
    }
    let cfg = &ctx.config;
    if !(cfg.dis_radius_miles > 0.0) {
        return Err(Error::InvalidConfig("dis_radius_miles must be positive".into()));
    }
    let w = ctx.weights;
    w.validate()?;
    if !(cfg.high_priority_threshold >= w.base_priority && cfg.high_priority_threshold <= w.max_priority) {
        return Err(Error::InvalidConfig(format!(
            "high_priority_threshold {} outside [{}, {}]",
            cfg.high_priority_threshold, w.base_priority, w.max_priority
        )));
    }
    let mut problems = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for u in units {
        if !seen.insert(u.id.as_str()) {
            problems.push(format!("duplicate unit id `{}`", u.id));
        }
        if u.capacity == 0 {
            problems.push(format!("unit `{}`: capacity must be at least 1", u.id));
        }
        if !(u.speed_mph > 0.0) {
            problems.push(format!("unit `{}`: speed must be positive", u.id));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for t in tasks {
        if !seen.insert(t.id.as_str()) {
            problems.push(format!("duplicate task id `{}`", t.id));
        }
        if t.burst == Some(0) {
            problems.push(format!("task `{}`: burst must be positive", t.id));
        }
        if t.actual_burst == Some(0) {
            problems.push(format!("task `{}`: actual_burst must be positive", t.id));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(problems))
    }
}
