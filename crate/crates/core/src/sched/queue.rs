use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::task::{natural_id_cmp, RescueTask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Fcfs,
    Priority,
    Hybrid,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Fcfs, Policy::Priority, Policy::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Fcfs => "fcfs",
            Policy::Priority => "priority",
            Policy::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fcfs" => Ok(Policy::Fcfs),
            "priority" => Ok(Policy::Priority),
            "hybrid" => Ok(Policy::Hybrid),
            other => Err(format!("unknown policy `{other}` (expected fcfs, priority or hybrid)")),
        }
    }
}

/// Burst used for ordering: the task's own, else the current prediction.
pub fn planned_burst(task: &RescueTask, fallback: u32) -> u32 {
    task.burst.unwrap_or(fallback)
}

/// Queue order for `policy`.
///
/// FCFS: arrival, then id. Priority and hybrid: priority descending, then
/// burst ascending, then arrival ascending, then id.
pub fn compare(policy: Policy, a: &RescueTask, b: &RescueTask, fallback_burst: u32) -> Ordering {
    let by_arrival = || a.arrival.cmp(&b.arrival).then_with(|| natural_id_cmp(&a.id, &b.id));
    match policy {
        Policy::Fcfs => by_arrival(),
        Policy::Priority | Policy::Hybrid => b
            .priority
            .total_cmp(&a.priority)
            .then_with(|| planned_burst(a, fallback_burst).cmp(&planned_burst(b, fallback_burst)))
            .then_with(by_arrival),
    }
}

/// Pending tasks kept in policy order.
#[derive(Clone, Debug)]
pub struct TaskQueue {
    policy: Policy,
    items: Vec<RescueTask>,
}

impl TaskQueue {
    pub fn new(policy: Policy) -> Self {
        TaskQueue {
            policy,
            items: Vec::new(),
        }
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn push(&mut self, task: RescueTask) {
        self.items.push(task);
    }

    /// Re-sorts; stable, so fully tied tasks keep ingestion order.
    pub fn sort(&mut self, fallback_burst: u32) {
        let policy = self.policy;
        self.items
            .sort_by(|a, b| compare(policy, a, b, fallback_burst));
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn tasks(&self) -> &[RescueTask] {
        &self.items
    }

    pub fn remove(&mut self, index: usize) -> RescueTask {
        self.items.remove(index)
    }

    pub fn ids(&self) -> Vec<String> {
        self.items.iter().map(|t| t.id.clone()).collect()
    }

    pub(crate) fn replace(&mut self, tasks: Vec<RescueTask>) {
        self.items = tasks;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Location;
    use crate::time::TimePoint;

    fn task(id: &str, arrival: u32, burst: u32, priority: f64) -> RescueTask {
        RescueTask::new(id, TimePoint::from_minutes(arrival), Location::node(id))
            .with_burst(burst)
            .with_priority(priority)
    }

    #[test]
    fn priority_then_burst_then_arrival() {
        let mut q = TaskQueue::new(Policy::Hybrid);
        q.push(task("a", 0, 60, 5.0));
        q.push(task("b", 5, 30, 5.0));
        q.push(task("c", 1, 30, 5.0));
        q.push(task("d", 9, 90, 7.0));
        q.push(task("e", 0, 10, 2.0));
        q.sort(54);
        assert_eq!(q.ids(), vec!["d", "c", "b", "a", "e"]);
    }

    #[test]
    fn fcfs_ties_by_id() {
        let mut q = TaskQueue::new(Policy::Fcfs);
        q.push(task("10", 5, 1, 9.0));
        q.push(task("9", 5, 1, 1.0));
        q.push(task("1", 7, 1, 1.0));
        q.sort(54);
        assert_eq!(q.ids(), vec!["9", "10", "1"]);
    }

    #[test]
    fn missing_burst_uses_fallback() {
        let mut q = TaskQueue::new(Policy::Priority);
        let mut open = task("open", 0, 1, 5.0);
        open.burst = None;
        q.push(task("fixed", 0, 40, 5.0));
        q.push(open);
        q.sort(30);
        assert_eq!(q.ids(), vec!["open", "fixed"]);
        q.sort(50);
        assert_eq!(q.ids(), vec!["fixed", "open"]);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("HYBRID".parse::<Policy>().unwrap(), Policy::Hybrid);
        assert!("sjf".parse::<Policy>().is_err());
        assert_eq!(serde_json::to_string(&Policy::Fcfs).unwrap(), "\"fcfs\"");
    }
}
