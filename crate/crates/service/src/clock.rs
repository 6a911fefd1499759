//! Injectable time source. Minutes are scenario minutes (see `TimePoint`).

use std::sync::atomic::{AtomicU32, Ordering};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rescue_core::TimePoint;

pub trait Clock: Send + Sync {
    fn now(&self) -> TimePoint;
    /// Milliseconds since the Unix epoch, recorded in the log for auditing.
    fn wall_ms(&self) -> u64;
}

/// Real time, counted from `start` when the service came up.
pub struct SystemClock {
    start: TimePoint,
    origin: Instant,
}

impl SystemClock {
    pub fn starting_at(start: TimePoint) -> Self {
        SystemClock { start, origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> TimePoint {
        self.start + (self.origin.elapsed().as_secs() / 60) as u32
    }

    fn wall_ms(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
    }
}

/// Virtual time that only moves when told to.
#[derive(Default)]
pub struct ManualClock(AtomicU32);

impl ManualClock {
    pub fn new(at: TimePoint) -> Self {
        ManualClock(AtomicU32::new(at.minutes()))
    }

    pub fn set(&self, at: TimePoint) {
        self.0.store(at.minutes(), Ordering::SeqCst);
    }

    pub fn advance(&self, minutes: u32) {
        self.0.fetch_add(minutes, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> TimePoint {
        TimePoint::from_minutes(self.0.load(Ordering::SeqCst))
    }

    fn wall_ms(&self) -> u64 {
        u64::from(self.0.load(Ordering::SeqCst)) * 60_000
    }
}
