//! Scenario replay, seeded workload generation and policy benchmarking.

pub mod bench;
pub mod replay;
pub mod scenario;
pub mod workload;

pub use bench::{bench, render_bench_table, BenchCell, BenchReport, BenchRow, BenchSpec};
pub use replay::{render_table, replay, ReplayOutput, ScheduleDocument};
pub use scenario::{Scenario, ScenarioConfig, ScenarioFile, TaskSpec, UnitSpec};
pub use workload::{generate, WorkloadSpec};
