//! Rescue dispatch core.
//!
//! Scores rescue requests into priorities, predicts mission service times,
//! and schedules rescue units under travel, preparation, capability and
//! capacity constraints with FCFS, priority, or multi-task hybrid policies.
//! The [`sim`] module replays scenario files and benchmarks policies over
//! seeded synthetic workloads.

// NaN must fail these checks, so the negated form is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burst;
pub mod error;
pub mod geo;
pub mod labels;
pub mod metrics;
pub mod priority;
pub mod scalar;
pub mod sched;
pub mod sim;
pub mod task;
pub mod time;

use num_rational::Ratio;

pub use burst::{BurstPredictor, Observation};
pub use error::{Error, Result};
pub use geo::{DistanceMatrix, DistanceModel, GeoPoint, Location};
pub use labels::{Label, LabelVector};
pub use metrics::MetricsReport;
pub use priority::{rebalance, score, EnvVector, PriorityScore, WeightConfig};
pub use scalar::Scalar;
pub use sched::{
    schedule, schedule_fcfs, schedule_hybrid, schedule_priority, DispatchContext, EnvUpdate, Policy, Schedule,
    SchedulerConfig,
};
pub use task::{Mission, PrioritySource, RescueTask, RescueUnit, ScheduleEntry};
pub use time::{travel_minutes, TimePoint};

/// Exact rational scalar for zero-tolerance checks.
pub type Exact = Ratio<i64>;

pub type Weights = WeightConfig<f64>;
pub type ExactWeights = WeightConfig<Exact>;
pub type Env = EnvVector<f64>;
pub type Score = PriorityScore<f64>;
pub type Predictor = BurstPredictor<f64>;
pub type ExactPredictor = BurstPredictor<Exact>;
