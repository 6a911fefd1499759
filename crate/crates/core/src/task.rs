//! Tasks, units, and the per-leg records a dispatch produces.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geo::Location;
use crate::labels::LabelVector;
use crate::priority::EnvVector;
use crate::time::TimePoint;

/// Where a task's priority comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrioritySource {
    /// Recomputed from labels and environment whenever the queue is rebalanced.
    Scored,
    /// Fixed by the scenario or an operator override.
    Explicit,
}

/// One rescue request (or a merge of several requests for the same place).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescueTask {
    pub id: String,
    pub arrival: TimePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub labels: LabelVector,
    pub env: EnvVector,
    pub location: Location,
    /// Planned on-site minutes; `None` defers to the burst predictor.
    pub burst: Option<u32>,
    /// Observed on-site minutes, when known ahead of time (simulation input).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual_burst: Option<u32>,
    pub priority: f64,
    pub priority_source: PrioritySource,
    #[serde(default)]
    pub required_capabilities: BTreeSet<String>,
    pub demand: u32,
}

impl RescueTask {
    /// A minimal task at a matrix node or point; priority 1, demand 1.
    pub fn new(id: impl Into<String>, arrival: TimePoint, location: Location) -> Self {
        RescueTask {
            id: id.into(),
            arrival,
            text: None,
            labels: LabelVector::default(),
            env: EnvVector::new(),
            location,
            burst: None,
            actual_burst: None,
            priority: 1.0,
            priority_source: PrioritySource::Scored,
            required_capabilities: BTreeSet::new(),
            demand: 1,
        }
    }

    pub fn with_burst(mut self, minutes: u32) -> Self {
        self.burst = Some(minutes);
        self
    }

    pub fn with_priority(mut self, priority: f64) -> Self {
        self.priority = priority;
        self.priority_source = PrioritySource::Explicit;
        self
    }
}

/// A rescue team with its vehicle; the scheduler's processor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescueUnit {
    pub id: String,
    #[serde(default)]
    pub capabilities: BTreeSet<String>,
    pub capacity: u32,
    pub speed_mph: f64,
    pub prep_minutes: u32,
    #[serde(default)]
    pub rest_minutes: u32,
    pub base: Location,
    pub available_at: TimePoint,
}

impl RescueUnit {
    pub fn new(id: impl Into<String>, base: Location, available_at: TimePoint) -> Self {
        RescueUnit {
            id: id.into(),
            capabilities: BTreeSet::new(),
            capacity: 3,
            speed_mph: 20.0,
            prep_minutes: 30,
            rest_minutes: 0,
            base,
            available_at,
        }
    }

    pub fn can_serve(&self, task: &RescueTask) -> bool {
        task.required_capabilities.is_subset(&self.capabilities) && task.demand <= self.capacity
    }
}

/// One row of a dispatch schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub task_id: String,
    pub unit_id: String,
    pub mission_id: String,
    pub arrival: TimePoint,
    pub priority: f64,
    /// Departure toward this task (from base or from the previous task).
    pub start_time: TimePoint,
    pub route_distance: f64,
    pub route_duration: u32,
    pub waiting_time: u32,
    pub burst_used: u32,
    pub turnaround_time: u32,
}

impl ScheduleEntry {
    /// Minute at which the unit finishes on site.
    pub fn completion(&self) -> TimePoint {
        self.start_time + self.route_duration + self.burst_used
    }

    /// Checks the waiting/turnaround identities.
    pub fn is_consistent(&self) -> bool {
        self.start_time.checked_since(self.arrival).map(|d| d + self.route_duration)
            == Some(self.waiting_time)
            && self.turnaround_time == self.waiting_time + self.burst_used
    }
}

/// A unit's round trip covering one or more chained tasks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mission {
    pub id: String,
    pub unit_id: String,
    pub tasks: Vec<String>,
    pub depart_base: TimePoint,
    pub return_distance: f64,
    pub return_base: TimePoint,
    /// Ready for the next mission after preparation (and rest).
    pub available_at: TimePoint,
    pub legs: Vec<ScheduleEntry>,
}

/// Orders ids numerically when both parse as integers, otherwise lexically.
pub fn natural_id_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_identities() {
        // Port Arthur task 2 on two units: 16:09 start, arrival 12:45, 7 min leg, 54 min burst.
        let e = ScheduleEntry {
            task_id: "2".into(),
            unit_id: "1".into(),
            mission_id: "m1".into(),
            arrival: TimePoint::hm(12, 45),
            priority: 2.0,
            start_time: TimePoint::hm(16, 9),
            route_distance: 2.2,
            route_duration: 7,
            waiting_time: 211,
            burst_used: 54,
            turnaround_time: 265,
        };
        assert!(e.is_consistent());
        assert_eq!(e.completion(), TimePoint::hm(17, 10));
    }

    #[test]
    fn ids_sort_naturally() {
        let mut ids = vec!["10", "9", "b", "a", "1"];
        ids.sort_by(|a, b| natural_id_cmp(a, b));
        assert_eq!(ids, vec!["1", "9", "10", "a", "b"]);
    }

    #[test]
    fn capability_subset() {
        let mut unit = RescueUnit::new("1", Location::base(), TimePoint::ZERO);
        let mut task = RescueTask::new("t", TimePoint::ZERO, Location::node("t1"));
        task.required_capabilities.insert("boat".into());
        assert!(!unit.can_serve(&task));
        unit.capabilities.insert("boat".into());
        assert!(unit.can_serve(&task));
        task.demand = 4;
        assert!(!unit.can_serve(&task));
    }
}
