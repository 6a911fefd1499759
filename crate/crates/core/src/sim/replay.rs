//! Replaying a scenario and rendering the result.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::{HoursSummary, MetricsReport};
use crate::sched::{Policy, Schedule, Unschedulable};
use crate::sim::scenario::Scenario;
use crate::task::{Mission, ScheduleEntry};

pub const SCHEDULE_FORMAT: &str = "rescue-schedule/1";

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayOutput {
    pub scenario: String,
    pub units: usize,
    pub schedule: Schedule,
    /// Metrics rebuilt from the rows alone, independent of the event loop.
    pub recomputed: MetricsReport,
}

pub fn replay(scenario: &Scenario, policy: Policy) -> Result<ReplayOutput> {
    let schedule = scenario.run(policy)?;
    let recomputed = MetricsReport::from_entries(&schedule.entries);
    Ok(ReplayOutput {
        scenario: scenario.name.clone(),
        units: scenario.units.len(),
        schedule,
        recomputed,
    })
}

impl ReplayOutput {
    pub fn metrics_agree(&self) -> bool {
        let a = &self.schedule.metrics;
        let b = &self.recomputed;
        let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
        a.completed == b.completed
            && a.per_task == b.per_task
            && a.awt_series.len() == b.awt_series.len()
            && a.awt_series.iter().zip(&b.awt_series).all(|(x, y)| close(*x, *y))
            && close(a.mean_waiting, b.mean_waiting)
            && close(a.mean_turnaround, b.mean_turnaround)
            && close(a.max_avg_wt, b.max_avg_wt)
            && close(a.mean_avg_wt, b.mean_avg_wt)
    }

    pub fn document(&self) -> ScheduleDocument {
        let m = &self.recomputed;
        ScheduleDocument {
            format: SCHEDULE_FORMAT.to_string(),
            scenario: self.scenario.clone(),
            policy: self.schedule.policy,
            units: self.units,
            summary: Summary {
                completed: m.completed,
                mean_wait_min: m.mean_waiting,
                mean_turnaround_min: m.mean_turnaround,
                max_avg_wt_min: m.max_avg_wt,
                mean_avg_wt_min: m.mean_avg_wt,
                hours: m.to_hours(),
            },
            awt_series: m.awt_series.clone(),
            entries: self.schedule.entries.clone(),
            missions: self.schedule.missions.clone(),
            unschedulable: self.schedule.unschedulable.clone(),
            pending: self.schedule.pending.clone(),
            final_burst_estimate: self.schedule.final_burst_estimate,
        }
    }

    pub fn summary_line(&self) -> String {
        let m = &self.recomputed;
        format!(
            "policy={} units={} completed={} mean_wait_min={:.1} mean_turnaround_min={:.1} max_avg_wt_min={:.1} mean_avg_wt_min={:.1}",
            self.schedule.policy.name(),
            self.units,
            m.completed,
            m.mean_waiting,
            m.mean_turnaround,
            m.max_avg_wt,
            m.mean_avg_wt
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub completed: usize,
    pub mean_wait_min: f64,
    pub mean_turnaround_min: f64,
    pub max_avg_wt_min: f64,
    pub mean_avg_wt_min: f64,
    pub hours: HoursSummary,
}

/// JSON written by `replay --out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub format: String,
    pub scenario: String,
    pub policy: Policy,
    pub units: usize,
    pub summary: Summary,
    pub awt_series: Vec<f64>,
    pub entries: Vec<ScheduleEntry>,
    pub missions: Vec<Mission>,
    pub unschedulable: Vec<Unschedulable>,
    pub pending: Vec<String>,
    pub final_burst_estimate: f64,
}

/// Fixed-width table of schedule rows.
pub fn render_table(entries: &[ScheduleEntry]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:<6} {:<8} {:>7} {:>5} {:>6} {:>7} {:>5} {:>5} {:>5} {:>6}",
        "task", "unit", "mission", "arrival", "prio", "start", "dist", "route", "wait", "burst", "turn"
    );
    for e in entries {
        let _ = writeln!(
            out,
            "{:<6} {:<6} {:<8} {:>7} {:>5} {:>6} {:>7.2} {:>5} {:>5} {:>5} {:>6}",
            e.task_id,
            e.unit_id,
            e.mission_id,
            e.arrival.to_string(),
            format!("{:.2}", e.priority).trim_end_matches('0').trim_end_matches('.'),
            e.start_time.to_string(),
            e.route_distance,
            e.route_duration,
            e.waiting_time,
            e.burst_used,
            e.turnaround_time
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_round_trips() {
        let s = Scenario::from_json(
            r#"{"units": [{"id": "1"}], "tasks": [
                {"id": "1", "arrival": "10:00", "burst": 20, "distance_from_base": 2}
            ]}"#,
        )
        .unwrap();
        let out = replay(&s, Policy::Fcfs).unwrap();
        assert!(out.metrics_agree());
        let doc = out.document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: ScheduleDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
        assert_eq!(doc.summary.mean_wait_min, 6.0);
        assert!(out.summary_line().contains("mean_wait_min=6.0"));
        assert!(render_table(&doc.entries).lines().nth(1).unwrap().starts_with("1 "));
    }
}
