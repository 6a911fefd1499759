//! Dispatch service: HTTP endpoints over an event-sourced dispatch state.
//!
//! Every accepted mutation appends one event to a JSONL log and is then
//! applied to the in-memory state; restarting replays the log.

// NaN must fail these checks, so the negated form is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod api;
pub mod clock;
pub mod dispatcher;
pub mod error;
pub mod log;
pub mod state;

pub use api::{router, serve};
pub use clock::{Clock, ManualClock, SystemClock};
pub use dispatcher::{queue_order, Dispatcher, Preview, PreviewRequest, ScheduleView, TaskRequest, UnitRequest};
pub use error::{Result, ServiceError};
pub use state::{DispatchState, EventKind, Genesis, LogEvent};
