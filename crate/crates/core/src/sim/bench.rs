//! Policy × fleet-size comparisons over seeded workloads.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sched::Policy;
use crate::sim::replay::replay;
use crate::sim::scenario::Scenario;
use crate::sim::workload::{generate, WorkloadSpec};

fn default_seeds() -> Vec<u64> {
    vec![42]
}

fn default_policies() -> Vec<Policy> {
    Policy::ALL.to_vec()
}

fn default_unit_counts() -> Vec<usize> {
    vec![10, 20]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    pub workload: WorkloadSpec,
    /// Overrides `workload.seed`; one workload per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_policies")]
    pub policies: Vec<Policy>,
    #[serde(default = "default_unit_counts")]
    pub unit_counts: Vec<usize>,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            workload: WorkloadSpec::default(),
            seeds: default_seeds(),
            policies: default_policies(),
            unit_counts: default_unit_counts(),
        }
    }
}

impl BenchSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(vec![format!("bench spec JSON: {e}")]))
    }
}

/// One (seed, policy, unit count) run. Summary values are in hours; the
/// series stays in minutes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub seed: u64,
    pub policy: Policy,
    pub units: usize,
    pub completed: usize,
    pub max_avg_wt: f64,
    pub mean_avg_wt: f64,
    pub mean_waiting: f64,
    pub mean_turnaround: f64,
    pub awt_series: Vec<f64>,
}

/// Seed-averaged results for one (policy, unit count), in hours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub policy: Policy,
    pub units: usize,
    pub seeds: usize,
    pub max_avg_wt: f64,
    pub mean_avg_wt: f64,
    pub mean_turnaround: f64,
}

pub const BENCH_FORMAT: &str = "rescue-bench/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub format: String,
    pub rows: Vec<BenchRow>,
    pub cells: Vec<BenchCell>,
}

pub fn bench(spec: &BenchSpec) -> Result<BenchReport> {
    if spec.seeds.is_empty() || spec.policies.is_empty() || spec.unit_counts.is_empty() {
        return Err(Error::InvalidConfig("bench needs at least one seed, policy and unit count".into()));
    }
    if spec.unit_counts.contains(&0) {
        return Err(Error::InvalidConfig("unit counts must be positive".into()));
    }
    let per_seed: Vec<Vec<BenchCell>> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let workload = WorkloadSpec { seed, ..spec.workload.clone() };
            let base = Scenario::from_file(&generate(&workload)?)?;
            let mut cells = Vec::new();
            for &policy in &spec.policies {
                for &units in &spec.unit_counts {
                    let out = replay(&base.with_unit_count(units)?, policy)?;
                    let h = out.recomputed.to_hours();
                    cells.push(BenchCell {
                        seed,
                        policy,
                        units,
                        completed: out.recomputed.completed,
                        max_avg_wt: h.max_avg_wt,
                        mean_avg_wt: h.mean_avg_wt,
                        mean_waiting: h.mean_waiting,
                        mean_turnaround: h.mean_turnaround,
                        awt_series: out.recomputed.awt_series,
                    });
                }
            }
            Ok(cells)
        })
        .collect::<Result<_>>()?;
    let cells: Vec<BenchCell> = per_seed.into_iter().flatten().collect();

    let mut rows = Vec::new();
    for &policy in &spec.policies {
        for &units in &spec.unit_counts {
            let group: Vec<&BenchCell> = cells.iter().filter(|c| c.policy == policy && c.units == units).collect();
            let n = group.len() as f64;
            let avg = |f: fn(&BenchCell) -> f64| group.iter().map(|c| f(c)).sum::<f64>() / n;
            rows.push(BenchRow {
                policy,
                units,
                seeds: group.len(),
                max_avg_wt: avg(|c| c.max_avg_wt),
                mean_avg_wt: avg(|c| c.mean_avg_wt),
                mean_turnaround: avg(|c| c.mean_turnaround),
            });
        }
    }
    Ok(BenchReport { format: BENCH_FORMAT.to_string(), rows, cells })
}

impl BenchReport {
    pub fn cell(&self, seed: u64, policy: Policy, units: usize) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.seed == seed && c.policy == policy && c.units == units)
    }

    /// Long-format CSV of every AWT(k) series: `seed,policy,units,k,awt_min`.
    pub fn series_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["seed", "policy", "units", "k", "awt_min"]).map_err(io)?;
        for c in &self.cells {
            for (k, v) in c.awt_series.iter().enumerate() {
                w.write_record([
                    c.seed.to_string(),
                    c.policy.name().to_string(),
                    c.units.to_string(),
                    (k + 1).to_string(),
                    format!("{v:.4}"),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Text table, one row per (policy, unit count), values in hours.
pub fn render_bench_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>6} {:>6} {:>12} {:>12} {:>14}",
        "policy", "units", "seeds", "max_avg_wt_h", "mean_avg_wt_h", "mean_turn_h"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>6} {:>12.2} {:>12.2} {:>14.2}",
            r.policy.name(),
            r.units,
            r.seeds,
            r.max_avg_wt,
            r.mean_avg_wt,
            r.mean_turnaround
        );
    }
    out
}
