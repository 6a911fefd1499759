//! Single-writer mutation path. Every accepted command appends exactly one
//! event; reads see immutable snapshots.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use rescue_core::sched::{compare, Policy, Schedule};
use rescue_core::{
    score, Label, LabelVector, Location, MetricsReport, PrioritySource, RescueTask, RescueUnit, TimePoint,
    WeightConfig, EnvVector,
};
use rescue_core::sim::Scenario;
use rescue_text::{preprocess, Classification, LinearModel};
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::error::{Result, ServiceError};
use crate::log::EventLog;
use crate::state::{DispatchState, EventKind, Genesis, LogEvent, UnitDefaults};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRequest {
    pub id: Option<String>,
    pub arrival: Option<TimePoint>,
    pub text: Option<String>,
    pub labels: Option<LabelVector>,
    #[serde(default)]
    pub env: EnvVector,
    pub priority: Option<f64>,
    pub burst: Option<u32>,
    pub location: Option<Location>,
    pub distance_from_base: Option<f64>,
    /// Extra matrix entries from this task to other nodes, in miles.
    #[serde(default)]
    pub distances: BTreeMap<String, f64>,
    #[serde(default)]
    pub required_capabilities: Vec<String>,
    pub demand: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    Structured,
    Classified,
    /// Some or all heads were unavailable; their flags read 0.
    Partial,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskCreated {
    pub seq: u64,
    pub task: RescueTask,
    pub queue_position: usize,
    pub label_source: LabelSource,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unavailable_heads: Vec<Label>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitRequest {
    pub id: String,
    #[serde(default)]
    pub capabilities: Vec<String>,
    pub capacity: Option<u32>,
    pub speed_mph: Option<f64>,
    pub prep_minutes: Option<u32>,
    pub rest_minutes: Option<u32>,
    pub base: Option<Location>,
    pub available_at: Option<TimePoint>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompleteRequest {
    /// Actual on-site minutes per task; missing tasks keep their planned burst.
    #[serde(default)]
    pub actual: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompleteResponse {
    pub seq: u64,
    pub mission_id: String,
    pub burst_estimate: f64,
    pub unit_available_at: TimePoint,
    pub queue: Vec<RescueTask>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleView {
    pub at: TimePoint,
    #[serde(flatten)]
    pub schedule: Schedule,
}

/// What-if edits for a dry-run plan.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreviewRequest {
    pub weights: Option<WeightConfig>,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub units: Vec<UnitRequest>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanSummary {
    /// Task ids in dispatch order.
    pub order: Vec<String>,
    /// Mean planned waiting over queued tasks, in minutes.
    pub mean_wait_min: f64,
    pub schedule: Schedule,
}

impl PlanSummary {
    fn of(state: &DispatchState, now: TimePoint) -> Result<Self> {
        let schedule = state.plan(now)?;
        let n = schedule.entries.len();
        let mean_wait_min = if n == 0 {
            0.0
        } else {
            schedule.entries.iter().map(|e| f64::from(e.waiting_time)).sum::<f64>() / n as f64
        };
        Ok(PlanSummary { order: schedule.entries.iter().map(|e| e.task_id.clone()).collect(), mean_wait_min, schedule })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Preview {
    pub before: PlanSummary,
    pub after: PlanSummary,
}

struct Writer {
    state: DispatchState,
    log: EventLog,
}

pub struct Dispatcher {
    writer: Mutex<Writer>,
    snapshot: RwLock<Arc<DispatchState>>,
    clock: Arc<dyn Clock>,
    model: Option<Arc<LinearModel>>,
}

impl Dispatcher {
    fn from_parts(state: DispatchState, log: EventLog, clock: Arc<dyn Clock>) -> Self {
        Dispatcher {
            snapshot: RwLock::new(Arc::new(state.clone())),
            writer: Mutex::new(Writer { state, log }),
            clock,
            model: None,
        }
    }

    pub fn in_memory(genesis: Genesis, clock: Arc<dyn Clock>) -> Result<Self> {
        let log = EventLog::in_memory(&genesis);
        Ok(Self::from_parts(DispatchState::new(genesis)?, log, clock))
    }

    /// Opens `path`, replaying it if present, otherwise starting a new log
    /// from `genesis`.
    pub fn open(path: &Path, genesis: Genesis, clock: Arc<dyn Clock>) -> Result<Self> {
        if path.exists() {
            let (log, genesis, events) = EventLog::open(path)?;
            let state = DispatchState::replay(genesis, &events)?;
            Ok(Self::from_parts(state, log, clock))
        } else {
            let log = EventLog::create(path, &genesis)?;
            Ok(Self::from_parts(DispatchState::new(genesis)?, log, clock))
        }
    }

    pub fn with_model(mut self, model: LinearModel) -> Self {
        self.model = Some(Arc::new(model));
        self
    }

    pub fn snapshot(&self) -> Arc<DispatchState> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn now(&self) -> TimePoint {
        self.clock.now()
    }

    /// Validates against the current state, then logs and applies the event.
    fn commit<T>(&self, prepare: impl FnOnce(&DispatchState, TimePoint) -> Result<(EventKind, T)>) -> Result<(u64, T)> {
        let mut w = self.writer.lock().expect("writer lock");
        let now = self.clock.now().max(w.state.clock);
        let (kind, extra) = prepare(&w.state, now)?;
        let ev = LogEvent { seq: w.state.seq + 1, at: now, wall_ms: self.clock.wall_ms(), kind };
        let mut next = w.state.clone();
        next.apply(&ev)?;
        w.log.append(&ev)?;
        w.state = next;
        *self.snapshot.write().expect("snapshot lock") = Arc::new(w.state.clone());
        Ok((ev.seq, extra))
    }

    pub fn ingest_task(&self, req: TaskRequest) -> Result<TaskCreated> {
        let model = self.model.clone();
        let (seq, (task, source, unavailable, classification)) = self.commit(|state, now| {
            let (task, distances, source, unavailable, classification) = resolve_task(state, req, now, model.as_deref())?;
            Ok((
                EventKind::TaskIngested { task: task.clone(), distances },
                (task, source, unavailable, classification),
            ))
        })?;
        let snap = self.snapshot();
        let queue_position = queue_order(&snap).iter().position(|id| *id == task.id).unwrap_or(0);
        let task = snap.queued(&task.id).cloned().unwrap_or(task);
        Ok(TaskCreated { seq, task, queue_position, label_source: source, unavailable_heads: unavailable, classification })
    }

    pub fn register_unit(&self, req: UnitRequest) -> Result<(u64, RescueUnit)> {
        self.commit(|state, now| {
            let unit = resolve_unit(state, req, now)?;
            Ok((EventKind::UnitRegistered { unit: unit.clone() }, unit))
        })
    }

    pub fn set_weights(&self, weights: WeightConfig) -> Result<(u64, Vec<RescueTask>)> {
        let (seq, ()) = self.commit(|state, _| Ok((weights_event(state, weights)?, ())))?;
        Ok((seq, self.snapshot().queue.clone()))
    }

    pub fn update_env(&self, task_id: &str, env: EnvVector) -> Result<(u64, RescueTask)> {
        let (seq, ()) = self.commit(|state, _| {
            let task = state.queued(task_id).ok_or_else(|| ServiceError::NotFound(format!("no queued task {task_id}")))?;
            score(&task.labels, &env, &state.weights).map_err(|e| ServiceError::invalid(e.to_string()))?;
            Ok((EventKind::EnvUpdated { task_id: task_id.to_string(), env }, ()))
        })?;
        Ok((seq, self.snapshot().queued(task_id).cloned().expect("task still queued")))
    }

    pub fn override_priority(&self, task_id: &str, priority: f64) -> Result<(u64, usize)> {
        let (seq, ()) = self.commit(|state, _| Ok((override_event(state, task_id, priority)?, ())))?;
        let snap = self.snapshot();
        let pos = queue_order(&snap).iter().position(|id| id == task_id).unwrap_or(0);
        Ok((seq, pos))
    }

    /// Commits the earliest mission of the current plan if it departs now.
    pub fn dispatch_next(&self) -> Result<(u64, rescue_core::Mission)> {
        self.commit(|state, now| {
            let plan = state.plan(now)?;
            let first = plan
                .missions
                .iter()
                .min_by_key(|m| m.depart_base)
                .ok_or_else(|| ServiceError::Conflict("nothing to dispatch".into()))?;
            if first.depart_base > now {
                return Err(ServiceError::Conflict(format!("no unit ready before {}", first.depart_base)));
            }
            let id = format!("M{}", state.missions_dispatched + 1);
            let mut mission = first.clone();
            mission.id = id.clone();
            for leg in &mut mission.legs {
                leg.mission_id = id.clone();
            }
            Ok((EventKind::MissionDispatched { mission: mission.clone() }, mission))
        })
    }

    pub fn complete_mission(&self, mission_id: &str, req: CompleteRequest) -> Result<CompleteResponse> {
        let (seq, ()) = self.commit(|state, _| {
            let mission = state
                .active
                .iter()
                .find(|m| m.id == mission_id)
                .ok_or_else(|| ServiceError::NotFound(format!("no active mission {mission_id}")))?;
            let mut problems = Vec::new();
            let mut actual = BTreeMap::new();
            for (task, minutes) in req.actual {
                if !mission.tasks.contains(&task) {
                    problems.push(format!("task {task} is not on mission {mission_id}"));
                } else if minutes <= 0 || minutes > i64::from(u32::MAX) {
                    problems.push(format!("task {task}: duration must be a positive number of minutes"));
                } else {
                    actual.insert(task, minutes as u32);
                }
            }
            if !problems.is_empty() {
                return Err(ServiceError::Invalid(problems));
            }
            Ok((EventKind::MissionCompleted { mission_id: mission_id.to_string(), actual }, ()))
        })?;
        let snap = self.snapshot();
        let unit_id = snap
            .completed
            .iter()
            .rev()
            .find(|e| e.mission_id == mission_id)
            .map(|e| e.unit_id.clone())
            .unwrap_or_default();
        Ok(CompleteResponse {
            seq,
            mission_id: mission_id.to_string(),
            burst_estimate: snap.predictor.estimate(),
            unit_available_at: snap.unit(&unit_id).map(|u| u.available_at).unwrap_or(snap.clock),
            queue: snap.queue.clone(),
        })
    }

    pub fn schedule(&self) -> Result<ScheduleView> {
        let snap = self.snapshot();
        Ok(ScheduleView { at: snap.clock, schedule: snap.plan(snap.clock)? })
    }

    /// Plans the current state with and without the proposed edits. Nothing
    /// is logged.
    pub fn preview(&self, req: PreviewRequest) -> Result<Preview> {
        let snap = self.snapshot();
        let now = snap.clock;
        let mut edited = (*snap).clone();
        let mut events = Vec::new();
        if let Some(w) = req.weights {
            events.push(weights_event(&edited, w)?);
        }
        for (task_id, priority) in req.overrides {
            events.push(override_event(&edited, &task_id, priority)?);
        }
        for kind in events {
            edited.apply(&LogEvent { seq: edited.seq + 1, at: now, wall_ms: 0, kind })?;
        }
        for u in req.units {
            let unit = resolve_unit(&edited, u, now)?;
            edited.apply(&LogEvent { seq: edited.seq + 1, at: now, wall_ms: 0, kind: EventKind::UnitRegistered { unit } })?;
        }
        Ok(Preview { before: PlanSummary::of(&snap, now)?, after: PlanSummary::of(&edited, now)? })
    }

    pub fn metrics(&self) -> MetricsReport {
        MetricsReport::from_entries(&self.snapshot().completed)
    }

    /// Log lines of an in-memory dispatcher (header first).
    pub fn memory_log(&self) -> Vec<String> {
        self.writer.lock().expect("writer lock").log.memory_lines().to_vec()
    }
}

/// Queue ids in hybrid dispatch order.
pub fn queue_order(state: &DispatchState) -> Vec<String> {
    let fallback = state.predictor.estimate_minutes();
    let mut q: Vec<&RescueTask> = state.queue.iter().collect();
    q.sort_by(|a, b| compare(Policy::Hybrid, a, b, fallback));
    q.into_iter().map(|t| t.id.clone()).collect()
}

fn weights_event(state: &DispatchState, weights: WeightConfig) -> Result<EventKind> {
    let mut problems = Vec::new();
    if let Err(e) = weights.validate() {
        problems.push(e.to_string());
    }
    for t in &state.queue {
        if let Err(e) = score(&t.labels, &t.env, &weights) {
            problems.push(format!("task {}: {e}", t.id));
        }
    }
    if !problems.is_empty() {
        return Err(ServiceError::Invalid(problems));
    }
    Ok(EventKind::WeightsChanged { weights })
}

fn override_event(state: &DispatchState, task_id: &str, priority: f64) -> Result<EventKind> {
    state.queued(task_id).ok_or_else(|| ServiceError::NotFound(format!("no queued task {task_id}")))?;
    let w = &state.weights;
    if !(priority >= w.base_priority && priority <= w.max_priority) {
        return Err(ServiceError::invalid(format!("priority {priority} outside [{}, {}]", w.base_priority, w.max_priority)));
    }
    Ok(EventKind::PriorityOverridden { task_id: task_id.to_string(), priority })
}

type Resolved = (RescueTask, BTreeMap<String, f64>, LabelSource, Vec<Label>, Option<Classification>);

fn resolve_task(state: &DispatchState, req: TaskRequest, now: TimePoint, model: Option<&LinearModel>) -> Result<Resolved> {
    let mut problems = Vec::new();
    let id = match req.id {
        Some(id) if id.trim().is_empty() => {
            problems.push("id: must not be empty".to_string());
            id
        }
        Some(id) => id,
        None => (1..).map(|n| format!("T{n}")).find(|c| !state.knows_task(c)).expect("free id"),
    };
    if state.knows_task(&id) {
        return Err(ServiceError::Conflict(format!("task {id} already exists")));
    }

    let mut distances = req.distances;
    let location = match (&state.matrix, req.location) {
        (Some(m), loc) => {
            let key = match loc {
                None => format!("t{id}"),
                Some(Location::Node(k)) => k,
                Some(Location::Point(_)) => {
                    problems.push("location: this service uses a distance matrix; give a node key".into());
                    String::new()
                }
            };
            if let Some(d) = req.distance_from_base {
                distances.insert(rescue_core::geo::BASE_NODE.to_string(), d);
            }
            for (other, d) in &distances {
                if !(d.is_finite() && *d >= 0.0) {
                    problems.push(format!("distances.{other}: must be non-negative"));
                }
                if other == &key {
                    problems.push(format!("distances.{other}: self distance"));
                }
            }
            if !key.is_empty()
                && m.get(rescue_core::geo::BASE_NODE, &key).is_none()
                && !distances.contains_key(rescue_core::geo::BASE_NODE)
            {
                problems.push(format!(
                    "location: distance from base to `{key}` is unknown (send distance_from_base; geocoding is not supported)"
                ));
            }
            Location::Node(key)
        }
        (None, Some(Location::Point(p))) => {
            if let Err(e) = p.validate() {
                problems.push(format!("location: {e}"));
            }
            Location::Point(p)
        }
        (None, _) => {
            problems.push("location: a {lat, lon} point is required (geocoding is not supported)".into());
            Location::base()
        }
    };

    let (labels, source, unavailable, classification) = match (req.labels, &req.text) {
        (Some(labels), _) => (labels, LabelSource::Structured, Vec::new(), None),
        (None, Some(text)) if !preprocess(text).tokens.is_empty() => match model {
            Some(m) => {
                let c = m.classify(text);
                let missing: Vec<Label> = c.heads.iter().filter(|h| h.score.is_none()).map(|h| h.label).collect();
                let source = if missing.is_empty() { LabelSource::Classified } else { LabelSource::Partial };
                (c.labels, source, missing, Some(c))
            }
            None => (LabelVector::default(), LabelSource::Partial, Label::ALL.to_vec(), None),
        },
        // nothing left to classify after cleaning
        (None, Some(_)) => (LabelVector::default(), LabelSource::Classified, Vec::new(), None),
        (None, None) => (LabelVector::default(), LabelSource::Structured, Vec::new(), None),
    };

    if req.burst == Some(0) {
        problems.push("burst: must be positive".into());
    }
    let w = &state.weights;
    let (priority, priority_source) = match req.priority {
        Some(p) => {
            if !(p >= w.base_priority && p <= w.max_priority) {
                problems.push(format!("priority: {p} outside [{}, {}]", w.base_priority, w.max_priority));
            }
            (p, PrioritySource::Explicit)
        }
        None => match score(&labels, &req.env, w) {
            Ok(s) => (s.value(), PrioritySource::Scored),
            Err(e) => {
                problems.push(format!("env: {e}"));
                (w.base_priority, PrioritySource::Scored)
            }
        },
    };
    let task = RescueTask {
        id,
        arrival: req.arrival.unwrap_or(now),
        text: req.text,
        labels,
        env: req.env,
        location,
        burst: req.burst,
        actual_burst: None,
        priority,
        priority_source,
        required_capabilities: req.required_capabilities.into_iter().collect(),
        demand: req.demand.unwrap_or(1),
    };
    if !problems.is_empty() {
        return Err(ServiceError::Invalid(problems));
    }
    Ok((task, distances, source, unavailable, classification))
}

fn resolve_unit(state: &DispatchState, req: UnitRequest, now: TimePoint) -> Result<RescueUnit> {
    if state.unit(&req.id).is_some() {
        return Err(ServiceError::Conflict(format!("unit {} already registered", req.id)));
    }
    let d: &UnitDefaults = &state.genesis.unit_defaults;
    let mut problems = Vec::new();
    if req.id.trim().is_empty() {
        problems.push("id: must not be empty".to_string());
    }
    let capacity = req.capacity.unwrap_or(d.capacity);
    if capacity == 0 {
        problems.push("capacity: must be at least 1".into());
    }
    let speed_mph = req.speed_mph.unwrap_or(d.speed_mph);
    if !(speed_mph.is_finite() && speed_mph > 0.0) {
        problems.push("speed_mph: must be positive".into());
    }
    let base = match (req.base, &state.matrix, state.genesis.base) {
        (Some(b), _, _) => b,
        (None, Some(_), _) => Location::base(),
        (None, None, Some(p)) => Location::Point(p),
        (None, None, None) => {
            problems.push("base: required when the service has no default base".into());
            Location::base()
        }
    };
    // the base node exists in matrix mode even before any task names it
    let implicit_base = state.matrix.is_some() && base == Location::base();
    if !implicit_base && !state.distances().can_resolve(&base) {
        problems.push(format!("base: `{base}` is not a known location"));
    }
    if !problems.is_empty() {
        return Err(ServiceError::Invalid(problems));
    }
    Ok(RescueUnit {
        id: req.id,
        capabilities: req.capabilities.into_iter().collect(),
        capacity,
        speed_mph,
        prep_minutes: req.prep_minutes.unwrap_or(d.prep_minutes),
        rest_minutes: req.rest_minutes.unwrap_or(d.rest_minutes),
        base,
        available_at: req.available_at.unwrap_or(now),
    })
}

impl Genesis {
    pub fn from_scenario(s: &Scenario, start: TimePoint) -> Self {
        let template = s.with_unit_count(1).expect("one unit").units.remove(0);
        Genesis {
            start,
            matrix: match &s.distances {
                rescue_core::DistanceModel::Matrix(m) => Some(m.clone()),
                rescue_core::DistanceModel::Coordinates => None,
            },
            base: match &template.base {
                Location::Point(p) => Some(*p),
                Location::Node(_) => None,
            },
            scheduler: s.scheduler,
            weights: s.weights.clone(),
            ema_alpha: s.ema_alpha,
            seed_burst_minutes: s.seed_burst_minutes,
            unit_defaults: UnitDefaults {
                capacity: template.capacity,
                speed_mph: template.speed_mph,
                prep_minutes: template.prep_minutes,
                rest_minutes: template.rest_minutes,
            },
        }
    }
}

impl Dispatcher {
    /// Registers the scenario's units and ingests its tasks as logged events.
    pub fn bootstrap(&self, s: &Scenario) -> Result<()> {
        for u in &s.units {
            let unit = u.clone();
            self.commit(|state, _| {
                if state.unit(&unit.id).is_some() {
                    return Err(ServiceError::Conflict(format!("unit {} already registered", unit.id)));
                }
                Ok((EventKind::UnitRegistered { unit }, ()))
            })?;
        }
        for t in &s.tasks {
            let task = t.clone();
            self.commit(|state, _| {
                if state.knows_task(&task.id) {
                    return Err(ServiceError::Conflict(format!("task {} already exists", task.id)));
                }
                Ok((EventKind::TaskIngested { task, distances: BTreeMap::new() }, ()))
            })?;
        }
        Ok(())
    }
}
