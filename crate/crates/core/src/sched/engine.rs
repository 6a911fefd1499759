use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::burst::BurstPredictor;
use crate::error::{Error, Result};
use crate::geo::{DistanceModel, Location};
use crate::metrics::MetricsAccumulator;
use crate::priority::{self, EnvVector};
use crate::task::{Mission, PrioritySource, RescueTask, RescueUnit, ScheduleEntry};
use crate::time::{travel_minutes, TimePoint};

use super::events::{EventStream, SimEvent, TraceKind, TraceRecord};
use super::queue::{compare, planned_burst, Policy, TaskQueue};
use super::{DispatchContext, Schedule, Unschedulable};

// Same-minute processing order: finished tasks, finished missions, then the
// external stream (env reports before arrivals).
const TASK_DONE: u8 = 0;
const MISSION_DONE: u8 = 1;

pub(super) struct Engine<'a> {
    policy: Policy,
    ctx: &'a DispatchContext<'a>,
    units: &'a [RescueUnit],
    available: Vec<TimePoint>,
    stream: EventStream,
    next_external: usize,
    internal: BinaryHeap<Reverse<(TimePoint, u8, usize)>>,
    queue: TaskQueue,
    env_feed: BTreeMap<String, EnvVector>,
    predictor: &'a mut BurstPredictor,
    clock: TimePoint,
    entries: Vec<ScheduleEntry>,
    missions: Vec<Mission>,
    unschedulable: Vec<Unschedulable>,
    metrics: MetricsAccumulator,
    trace: Vec<TraceRecord>,
}

impl<'a> Engine<'a> {
    pub(super) fn new(
        policy: Policy,
        tasks: &[RescueTask],
        units: &'a [RescueUnit],
        ctx: &'a DispatchContext<'a>,
        predictor: &'a mut BurstPredictor,
    ) -> Self {
        Engine {
            policy,
            ctx,
            units,
            available: units.iter().map(|u| u.available_at).collect(),
            stream: EventStream::from_parts(tasks, ctx.env_updates),
            next_external: 0,
            internal: BinaryHeap::new(),
            queue: TaskQueue::new(policy),
            env_feed: BTreeMap::new(),
            predictor,
            clock: TimePoint::ZERO,
            entries: Vec::new(),
            missions: Vec::new(),
            unschedulable: Vec::new(),
            metrics: MetricsAccumulator::default(),
            trace: Vec::new(),
        }
    }

    pub(super) fn run(mut self) -> Result<Schedule> {
        loop {
            self.process_due()?;
            if self.try_dispatch()? {
                continue;
            }
            if self.queue.is_empty() && self.next_external >= self.stream.events().len() {
                break;
            }
            match self.next_event_time() {
                Some(t) => self.clock = t,
                None => break,
            }
        }
        // let in-flight missions finish so metrics and the predictor see them
        while let Some(&Reverse((t, _, _))) = self.internal.peek() {
            self.clock = self.clock.max(t);
            self.process_due()?;
        }
        Ok(Schedule {
            policy: self.policy,
            pending: self.queue.ids(),
            entries: self.entries,
            missions: self.missions,
            unschedulable: self.unschedulable,
            metrics: self.metrics.finish(),
            final_burst_estimate: self.predictor.estimate(),
            trace: self.trace,
        })
    }

    fn fallback_burst(&self) -> u32 {
        self.predictor.estimate_minutes()
    }

    fn next_event_time(&self) -> Option<TimePoint> {
        let external = self.stream.events().get(self.next_external).map(|e| e.at);
        let internal = self.internal.peek().map(|Reverse((t, _, _))| *t);
        let unit = self.available.iter().copied().filter(|&t| t > self.clock).min();
        [external, internal, unit].into_iter().flatten().min()
    }

    fn process_due(&mut self) -> Result<()> {
        loop {
            let internal = self
                .internal
                .peek()
                .map(|Reverse(key)| *key)
                .filter(|(t, _, _)| *t <= self.clock);
            if let Some((at, kind, idx)) = internal {
                self.internal.pop();
                match kind {
                    TASK_DONE => self.on_task_done(at, idx),
                    _ => self.on_mission_done(at, idx)?,
                }
                continue;
            }
            let Some(ev) = self.stream.events().get(self.next_external) else {
                break;
            };
            if ev.at > self.clock {
                break;
            }
            let ev = ev.clone();
            self.next_external += 1;
            match ev.event {
                SimEvent::TaskArrival(task) => self.on_arrival(ev.at, task)?,
                SimEvent::EnvUpdate { task_id, env } => {
                    self.record(ev.at, TraceKind::EnvUpdate, &task_id);
                    self.env_feed.insert(task_id, env);
                }
                SimEvent::MissionCompleted { .. } => {}
            }
        }
        Ok(())
    }

    fn record(&mut self, at: TimePoint, kind: TraceKind, subject: &str) {
        self.trace.push(TraceRecord {
            at,
            clock: self.clock,
            kind,
            subject: subject.to_string(),
        });
    }

    fn on_arrival(&mut self, at: TimePoint, mut task: RescueTask) -> Result<()> {
        self.record(at, TraceKind::TaskArrival, &task.id);
        if !self.units.iter().any(|u| u.can_serve(&task)) {
            self.unschedulable.push(Unschedulable {
                reason: format!(
                    "no unit offers capabilities {:?} with capacity >= {}",
                    task.required_capabilities, task.demand
                ),
                task_id: task.id,
            });
            return Ok(());
        }
        if let Some(env) = self.env_feed.get(&task.id) {
            task.env = env.clone();
        }
        if task.priority_source == PrioritySource::Scored {
            task.priority = priority::score(&task.labels, &task.env, self.ctx.weights)?.value();
        }
        self.queue.push(task);
        Ok(())
    }

    fn on_task_done(&mut self, at: TimePoint, entry: usize) {
        let id = self.entries[entry].task_id.clone();
        self.record(at, TraceKind::TaskCompleted, &id);
        self.metrics.record(&self.entries[entry]);
    }

    fn on_mission_done(&mut self, at: TimePoint, mission: usize) -> Result<()> {
        let id = self.missions[mission].id.clone();
        self.record(at, TraceKind::MissionCompleted, &id);
        let actual: Vec<u32> = self.missions[mission].legs.iter().map(|l| l.burst_used).collect();
        for minutes in actual {
            self.predictor.observe(f64::from(minutes))?;
        }
        if self.policy == Policy::Hybrid && !self.queue.is_empty() {
            let updated = priority::rebalance(self.queue.tasks(), &self.env_feed, self.ctx.weights)?;
            self.queue.replace(updated);
        }
        Ok(())
    }

    fn try_dispatch(&mut self) -> Result<bool> {
        if self.queue.is_empty() {
            return Ok(false);
        }
        let free: Vec<usize> = (0..self.units.len())
            .filter(|&i| self.available[i] <= self.clock)
            .collect();
        if free.is_empty() {
            return Ok(false);
        }
        self.queue.sort(self.fallback_burst());
        for (qi, task) in self.queue.tasks().iter().enumerate() {
            let unit = free
                .iter()
                .copied()
                .filter(|&u| self.units[u].can_serve(task))
                .min_by_key(|&u| (self.available[u], u));
            if let Some(u) = unit {
                self.dispatch(qi, u, free.len())?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn dispatch(&mut self, qi: usize, ui: usize, idle_units: usize) -> Result<()> {
        let units = self.units;
        let unit = &units[ui];
        let fallback = self.fallback_burst();
        let queued = self.queue.len();
        let anchor = self.queue.remove(qi);

        let mut chain = vec![anchor];
        let grouping = self.policy == Policy::Hybrid
            && (!self.ctx.config.saturation_gated_grouping || queued > idle_units);
        if grouping {
            let picked = self.pick_companions(&chain[0], ui, fallback)?;
            for &j in picked.iter().rev() {
                chain.push(self.queue.remove(j));
            }
            chain[1..].reverse();
            let policy = self.policy;
            chain.sort_by(|a, b| compare(policy, a, b, fallback));
        }

        let mission_id = format!("m{}", self.missions.len() + 1);
        let distances = self.ctx.distances;
        let mut t = self.clock;
        let mut here = unit.base.clone();
        let mut legs = Vec::with_capacity(chain.len());
        for task in &chain {
            let miles = distances.distance(&here, &task.location)?;
            let route = travel_minutes(miles, unit.speed_mph)?;
            let burst = task.actual_burst.unwrap_or_else(|| planned_burst(task, fallback));
            let waiting = t.since(task.arrival) + route;
            legs.push(ScheduleEntry {
                task_id: task.id.clone(),
                unit_id: unit.id.clone(),
                mission_id: mission_id.clone(),
                arrival: task.arrival,
                priority: task.priority,
                start_time: t,
                route_distance: miles,
                route_duration: route,
                waiting_time: waiting,
                burst_used: burst,
                turnaround_time: waiting + burst,
            });
            t = t + route + burst;
            here = task.location.clone();
        }
        let return_distance = distances.distance(&here, &unit.base)?;
        let return_base = t + travel_minutes(return_distance, unit.speed_mph)?;
        let available_at = return_base + unit.prep_minutes + unit.rest_minutes;
        self.available[ui] = available_at;

        for leg in &legs {
            self.internal
                .push(Reverse((leg.completion(), TASK_DONE, self.entries.len())));
            self.entries.push(leg.clone());
        }
        self.internal
            .push(Reverse((return_base, MISSION_DONE, self.missions.len())));
        self.record(self.clock, TraceKind::MissionDispatched, &mission_id);
        self.missions.push(Mission {
            id: mission_id,
            unit_id: unit.id.clone(),
            tasks: chain.iter().map(|t| t.id.clone()).collect(),
            depart_base: self.clock,
            return_distance,
            return_base,
            available_at,
            legs,
        });
        Ok(())
    }

    /// Queue indices (ascending) of tasks to chain behind `anchor`.
    fn pick_companions(&self, anchor: &RescueTask, ui: usize, fallback: u32) -> Result<Vec<usize>> {
        let unit = &self.units[ui];
        let cfg = &self.ctx.config;
        let distances = self.ctx.distances;
        let mut load = anchor.demand;
        let mut picked = Vec::new();
        for (j, cand) in self.queue.tasks().iter().enumerate() {
            if load + cand.demand > unit.capacity || !unit.can_serve(cand) {
                continue;
            }
            // an unknown pair is never treated as nearby
            let Some(miles) = known_distance(distances, &anchor.location, &cand.location)? else {
                continue;
            };
            if miles > cfg.dis_radius_miles + 1e-9 {
                continue;
            }
            let mut linked = true;
            for &k in &picked {
                let other: &RescueTask = &self.queue.tasks()[k];
                linked &= known_distance(distances, &other.location, &cand.location)?.is_some();
            }
            if !linked {
                continue;
            }
            if cand.priority >= cfg.high_priority_threshold {
                // when this mission would reach the candidate
                let reach = self.clock
                    + travel_minutes(distances.distance(&unit.base, &anchor.location)?, unit.speed_mph)?
                    + planned_burst(anchor, fallback)
                    + travel_minutes(miles, unit.speed_mph)?;
                let other_free = (0..self.units.len())
                    .any(|k| k != ui && self.units[k].can_serve(cand) && self.available[k] <= reach);
                if other_free {
                    continue;
                }
            }
            load += cand.demand;
            picked.push(j);
        }
        Ok(picked)
    }
}

fn known_distance(model: &DistanceModel, a: &Location, b: &Location) -> Result<Option<f64>> {
    match model.distance(a, b) {
        Ok(d) => Ok(Some(d)),
        Err(Error::DistanceLookup { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}
