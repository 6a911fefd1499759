//! Timestamped inputs to the dispatch event loop and the trace it leaves.

use serde::{Deserialize, Serialize};

use crate::priority::EnvVector;
use crate::task::RescueTask;
use crate::time::TimePoint;

/// A condition report for one task, effective from `at`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvUpdate {
    pub at: TimePoint,
    #[serde(rename = "task")]
    pub task_id: String,
    pub env: EnvVector,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimEvent {
    TaskArrival(RescueTask),
    EnvUpdate { task_id: String, env: EnvVector },
    MissionCompleted { mission_id: String, actual: Vec<(String, u32)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimedEvent {
    pub at: TimePoint,
    pub event: SimEvent,
}

/// External events ordered by timestamp (stable for equal times).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventStream(Vec<TimedEvent>);

impl EventStream {
    pub fn from_parts(tasks: &[RescueTask], env_updates: &[EnvUpdate]) -> Self {
        let mut events: Vec<TimedEvent> = env_updates
            .iter()
            .map(|u| TimedEvent {
                at: u.at,
                event: SimEvent::EnvUpdate {
                    task_id: u.task_id.clone(),
                    env: u.env.clone(),
                },
            })
            .chain(tasks.iter().map(|t| TimedEvent {
                at: t.arrival,
                event: SimEvent::TaskArrival(t.clone()),
            }))
            .collect();
        // env reports precede arrivals at the same minute
        events.sort_by_key(|e| (e.at, matches!(e.event, SimEvent::TaskArrival(_))));
        EventStream(events)
    }

    pub fn events(&self) -> &[TimedEvent] {
        &self.0
    }

    pub fn is_ordered(&self) -> bool {
        self.0.windows(2).all(|w| w[0].at <= w[1].at)
    }
}

/// One processed event: its timestamp and the simulated clock when handled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub at: TimePoint,
    pub clock: TimePoint,
    pub kind: TraceKind,
    pub subject: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    TaskArrival,
    EnvUpdate,
    TaskCompleted,
    MissionCompleted,
    MissionDispatched,
}
