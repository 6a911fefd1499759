//! Waiting-time and turnaround summaries.

use serde::{Deserialize, Serialize};

use crate::task::ScheduleEntry;
use crate::time::TimePoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskMetric {
    pub task_id: String,
    pub waiting: u32,
    pub turnaround: u32,
    pub completion: TimePoint,
}

/// Metrics over completed tasks, in minutes.
///
/// `awt_series[k - 1]` is the mean waiting time over the first `k` tasks to
/// finish (ordered by completion time, ties by dispatch order).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub completed: usize,
    pub per_task: Vec<TaskMetric>,
    pub awt_series: Vec<f64>,
    pub max_avg_wt: f64,
    pub mean_avg_wt: f64,
    pub mean_waiting: f64,
    pub mean_turnaround: f64,
}

/// Running accumulator; feed tasks in completion order.
#[derive(Clone, Debug, Default)]
pub struct MetricsAccumulator {
    report: MetricsReport,
    wait_sum: u64,
    turnaround_sum: u64,
    series_sum: f64,
}

impl MetricsAccumulator {
    pub fn record(&mut self, entry: &ScheduleEntry) {
        let r = &mut self.report;
        r.completed += 1;
        self.wait_sum += u64::from(entry.waiting_time);
        self.turnaround_sum += u64::from(entry.turnaround_time);
        let awt = self.wait_sum as f64 / r.completed as f64;
        r.awt_series.push(awt);
        self.series_sum += awt;
        r.max_avg_wt = r.max_avg_wt.max(awt);
        r.mean_avg_wt = self.series_sum / r.completed as f64;
        r.mean_waiting = awt;
        r.mean_turnaround = self.turnaround_sum as f64 / r.completed as f64;
        r.per_task.push(TaskMetric {
            task_id: entry.task_id.clone(),
            waiting: entry.waiting_time,
            turnaround: entry.turnaround_time,
            completion: entry.completion(),
        });
    }

    pub fn finish(self) -> MetricsReport {
        self.report
    }
}

impl MetricsReport {
    /// Recomputes the report from schedule rows given in dispatch order.
    pub fn from_entries(entries: &[ScheduleEntry]) -> Self {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by_key(|&i| (entries[i].completion(), i));
        let mut acc = MetricsAccumulator::default();
        for i in order {
            acc.record(&entries[i]);
        }
        acc.finish()
    }

    pub fn to_hours(&self) -> HoursSummary {
        HoursSummary {
            max_avg_wt: self.max_avg_wt / 60.0,
            mean_avg_wt: self.mean_avg_wt / 60.0,
            mean_waiting: self.mean_waiting / 60.0,
            mean_turnaround: self.mean_turnaround / 60.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoursSummary {
    pub max_avg_wt: f64,
    pub mean_avg_wt: f64,
    pub mean_waiting: f64,
    pub mean_turnaround: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, start: u32, route: u32, wait: u32, burst: u32) -> ScheduleEntry {
        ScheduleEntry {
            task_id: id.into(),
            unit_id: "u".into(),
            mission_id: "m".into(),
            arrival: TimePoint::from_minutes(start + route - wait),
            priority: 1.0,
            start_time: TimePoint::from_minutes(start),
            route_distance: 0.0,
            route_duration: route,
            waiting_time: wait,
            burst_used: burst,
            turnaround_time: wait + burst,
        }
    }

    #[test]
    fn empty_report_is_zero() {
        let r = MetricsReport::from_entries(&[]);
        assert_eq!(r.completed, 0);
        assert_eq!(r.mean_waiting, 0.0);
        assert!(r.awt_series.is_empty());
    }

    #[test]
    fn series_follows_completion_order() {
        // b finishes first (t=30), then a (t=100)
        let entries = vec![entry("a", 50, 0, 30, 50), entry("b", 10, 0, 10, 20)];
        let r = MetricsReport::from_entries(&entries);
        assert_eq!(r.per_task[0].task_id, "b");
        assert_eq!(r.awt_series, vec![10.0, 20.0]);
        assert_eq!(r.max_avg_wt, 20.0);
        assert_eq!(r.mean_avg_wt, 15.0);
        assert_eq!(r.mean_waiting, 20.0);
        assert_eq!(r.mean_turnaround, 55.0);
        assert_eq!(r.to_hours().mean_waiting, 20.0 / 60.0);
    }
}
