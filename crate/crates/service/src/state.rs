//! Dispatch state as a fold over logged events.

use std::collections::BTreeMap;

use rescue_core::sched::{schedule_hybrid, DispatchContext, Schedule, SchedulerConfig};
use rescue_core::{
    rebalance, score, travel_minutes, BurstPredictor, DistanceMatrix, DistanceModel, EnvVector, GeoPoint,
    Mission, PrioritySource, RescueTask, RescueUnit, ScheduleEntry, TimePoint, WeightConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

/// Fixed parameters a log starts from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Genesis {
    pub start: TimePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<DistanceMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<GeoPoint>,
    pub scheduler: SchedulerConfig,
    pub weights: WeightConfig,
    pub ema_alpha: f64,
    pub seed_burst_minutes: f64,
    pub unit_defaults: UnitDefaults,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitDefaults {
    pub capacity: u32,
    pub speed_mph: f64,
    pub prep_minutes: u32,
    pub rest_minutes: u32,
}

impl Default for UnitDefaults {
    fn default() -> Self {
        UnitDefaults { capacity: 3, speed_mph: 20.0, prep_minutes: 30, rest_minutes: 0 }
    }
}

impl Default for Genesis {
    fn default() -> Self {
        Genesis {
            start: TimePoint::ZERO,
            matrix: Some(DistanceMatrix::new()),
            base: None,
            scheduler: SchedulerConfig::default(),
            weights: WeightConfig::demo(),
            ema_alpha: 0.5,
            seed_burst_minutes: 54.0,
            unit_defaults: UnitDefaults::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum EventKind {
    TaskIngested {
        task: RescueTask,
        /// Matrix entries introduced with the task, keyed by the other node.
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        distances: BTreeMap<String, f64>,
    },
    EnvUpdated { task_id: String, env: EnvVector },
    WeightsChanged { weights: WeightConfig },
    UnitRegistered { unit: RescueUnit },
    MissionDispatched { mission: Mission },
    MissionCompleted { mission_id: String, actual: BTreeMap<String, u32> },
    PriorityOverridden { task_id: String, priority: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub seq: u64,
    pub at: TimePoint,
    pub wall_ms: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispatchState {
    pub seq: u64,
    pub clock: TimePoint,
    pub genesis: Genesis,
    pub matrix: Option<DistanceMatrix>,
    pub weights: WeightConfig,
    pub predictor: BurstPredictor,
    pub units: Vec<RescueUnit>,
    /// Tasks waiting for dispatch, in ingestion order.
    pub queue: Vec<RescueTask>,
    pub active: Vec<Mission>,
    /// Rows of completed missions, re-timed with actual durations.
    pub completed: Vec<ScheduleEntry>,
    pub missions_dispatched: u64,
}

impl DispatchState {
    pub fn new(genesis: Genesis) -> Result<Self> {
        let predictor = BurstPredictor::with_alpha(genesis.seed_burst_minutes, genesis.ema_alpha)?;
        Ok(DispatchState {
            seq: 0,
            clock: genesis.start,
            matrix: genesis.matrix.clone(),
            weights: genesis.weights.clone(),
            predictor,
            units: Vec::new(),
            queue: Vec::new(),
            active: Vec::new(),
            completed: Vec::new(),
            missions_dispatched: 0,
            genesis,
        })
    }

    pub fn replay<'a>(genesis: Genesis, events: impl IntoIterator<Item = &'a LogEvent>) -> Result<Self> {
        let mut state = Self::new(genesis)?;
        for ev in events {
            state.apply(ev)?;
        }
        Ok(state)
    }

    pub fn distances(&self) -> DistanceModel {
        match &self.matrix {
            Some(m) => DistanceModel::Matrix(m.clone()),
            None => DistanceModel::Coordinates,
        }
    }

    pub fn unit(&self, id: &str) -> Option<&RescueUnit> {
        self.units.iter().find(|u| u.id == id)
    }

    pub fn queued(&self, id: &str) -> Option<&RescueTask> {
        self.queue.iter().find(|t| t.id == id)
    }

    /// True when the id is queued, on an active mission or completed.
    pub fn knows_task(&self, id: &str) -> bool {
        self.queued(id).is_some()
            || self.active.iter().any(|m| m.tasks.iter().any(|t| t == id))
            || self.completed.iter().any(|e| e.task_id == id)
    }

    /// Units as the planner sees them at `now`.
    pub fn planning_units(&self, now: TimePoint) -> Vec<RescueUnit> {
        self.units
            .iter()
            .map(|u| RescueUnit { available_at: u.available_at.max(now), ..u.clone() })
            .collect()
    }

    /// Scheduler settings with the high-priority threshold carried from the
    /// genesis priority range onto the current one.
    pub fn scheduler(&self) -> SchedulerConfig {
        let mut cfg = self.genesis.scheduler;
        let (gb, gm) = (self.genesis.weights.base_priority, self.genesis.weights.max_priority);
        let (b, m) = (self.weights.base_priority, self.weights.max_priority);
        if gm > gb {
            cfg.high_priority_threshold = (b + (cfg.high_priority_threshold - gb) * (m - b) / (gm - gb)).clamp(b, m);
        }
        cfg
    }

    /// Hybrid plan for the queue at `now`.
    pub fn plan(&self, now: TimePoint) -> Result<Schedule> {
        if self.units.is_empty() || self.queue.is_empty() {
            return Ok(Schedule {
                policy: rescue_core::sched::Policy::Hybrid,
                entries: Vec::new(),
                missions: Vec::new(),
                unschedulable: Vec::new(),
                pending: self.queue.iter().map(|t| t.id.clone()).collect(),
                metrics: Default::default(),
                final_burst_estimate: self.predictor.estimate(),
                trace: Vec::new(),
            });
        }
        let distances = self.distances();
        let ctx = DispatchContext::new(&distances, &self.weights).with_config(self.scheduler());
        let mut predictor = self.predictor.clone();
        Ok(schedule_hybrid(&self.queue, &self.planning_units(now), &ctx, &mut predictor)?)
    }

    pub fn apply(&mut self, ev: &LogEvent) -> Result<()> {
        if ev.seq != self.seq + 1 {
            return Err(ServiceError::Log(format!("expected seq {}, found {}", self.seq + 1, ev.seq)));
        }
        match &ev.kind {
            EventKind::TaskIngested { task, distances } => {
                if let (Some(m), rescue_core::Location::Node(key)) = (&mut self.matrix, &task.location) {
                    for (other, miles) in distances {
                        m.insert(key, other, *miles);
                    }
                }
                self.queue.push(task.clone());
            }
            EventKind::EnvUpdated { task_id, env } => {
                let weights = self.weights.clone();
                let task = self.queue_mut(task_id)?;
                task.env = env.clone();
                if task.priority_source == PrioritySource::Scored {
                    task.priority = score(&task.labels, &task.env, &weights)?.value();
                }
            }
            EventKind::WeightsChanged { weights } => {
                // explicit priorities keep their place on the rescaled range
                let (ob, om) = (self.weights.base_priority, self.weights.max_priority);
                let (nb, nm) = (weights.base_priority, weights.max_priority);
                for t in &mut self.queue {
                    if t.priority_source == PrioritySource::Explicit && om > ob {
                        t.priority = (nb + (t.priority - ob) * (nm - nb) / (om - ob)).clamp(nb, nm);
                    }
                }
                self.weights = weights.clone();
                self.queue = rebalance(&self.queue, &BTreeMap::new(), &self.weights)?;
            }
            EventKind::UnitRegistered { unit } => self.units.push(unit.clone()),
            EventKind::MissionDispatched { mission } => {
                self.queue.retain(|t| !mission.tasks.contains(&t.id));
                let unit = self
                    .units
                    .iter_mut()
                    .find(|u| u.id == mission.unit_id)
                    .ok_or_else(|| ServiceError::Log(format!("unknown unit {}", mission.unit_id)))?;
                unit.available_at = mission.available_at;
                self.active.push(mission.clone());
                self.missions_dispatched += 1;
            }
            EventKind::MissionCompleted { mission_id, actual } => {
                let idx = self
                    .active
                    .iter()
                    .position(|m| &m.id == mission_id)
                    .ok_or_else(|| ServiceError::NotFound(format!("no active mission {mission_id}")))?;
                let mission = self.active.remove(idx);
                let unit = self
                    .units
                    .iter_mut()
                    .find(|u| u.id == mission.unit_id)
                    .ok_or_else(|| ServiceError::Log(format!("unknown unit {}", mission.unit_id)))?;
                let mut t = mission.depart_base;
                for leg in &mission.legs {
                    let burst = actual.get(&leg.task_id).copied().unwrap_or(leg.burst_used);
                    let waiting = t.since(leg.arrival) + leg.route_duration;
                    let row = ScheduleEntry {
                        start_time: t,
                        waiting_time: waiting,
                        burst_used: burst,
                        turnaround_time: waiting + burst,
                        ..leg.clone()
                    };
                    t = row.completion();
                    self.predictor.observe(f64::from(burst))?;
                    self.completed.push(row);
                }
                let back = t + travel_minutes(mission.return_distance, unit.speed_mph)?;
                unit.available_at = back + unit.prep_minutes + unit.rest_minutes;
                self.queue = rebalance(&self.queue, &BTreeMap::new(), &self.weights)?;
            }
            EventKind::PriorityOverridden { task_id, priority } => {
                let task = self.queue_mut(task_id)?;
                task.priority = *priority;
                task.priority_source = PrioritySource::Explicit;
            }
        }
        self.seq = ev.seq;
        self.clock = self.clock.max(ev.at);
        Ok(())
    }

    fn queue_mut(&mut self, id: &str) -> Result<&mut RescueTask> {
        self.queue
            .iter_mut()
            .find(|t| t.id == id)
            .ok_or_else(|| ServiceError::NotFound(format!("no queued task {id}")))
    }
}
