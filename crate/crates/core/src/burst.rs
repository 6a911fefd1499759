//! Exponential-averaging prediction of mission service (burst) time.
//!
//! After each observed completion `T_n` the estimate moves to
//! `alpha * T_n + (1 - alpha) * BT_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    pub predicted: T,
    pub actual: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurstPredictor<T = f64> {
    alpha: T,
    seed: T,
    estimate: T,
    history: Vec<Observation<T>>,
}

impl<T: Scalar> BurstPredictor<T> {
    /// Starts from an assumed service time, with the default alpha of 1/2.
    pub fn bootstrap(seed_estimate: T) -> Result<Self> {
        Self::with_alpha(seed_estimate, T::one() / (T::one() + T::one()))
    }

    pub fn with_alpha(seed_estimate: T, alpha: T) -> Result<Self> {
        if !(seed_estimate > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "seed burst estimate must be positive, got {seed_estimate:?}"
            )));
        }
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(Error::InvalidConfig(format!("alpha must lie in [0, 1], got {alpha:?}")));
        }
        Ok(BurstPredictor {
            alpha,
            seed: seed_estimate,
            estimate: seed_estimate,
            history: Vec::new(),
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn seed(&self) -> T {
        self.seed
    }

    /// Current prediction for the next mission.
    pub fn estimate(&self) -> T {
        self.estimate
    }

    pub fn history(&self) -> &[Observation<T>] {
        &self.history
    }

    /// Folds one actual completion time into the estimate and returns it.
    pub fn observe(&mut self, actual: T) -> Result<T> {
        if !(actual > T::zero()) {
            return Err(Error::Observation(format!(
                "actual burst must be positive, got {actual:?}"
            )));
        }
        self.history.push(Observation {
            predicted: self.estimate,
            actual,
        });
        self.estimate = self.alpha * actual + (T::one() - self.alpha) * self.estimate;
        Ok(self.estimate)
    }

    /// Mean absolute error of the predictions made so far (`None` before the
    /// first observation).
    pub fn mean_abs_error(&self) -> Option<f64> {
        if self.history.is_empty() {
            return None;
        }
        let total: f64 = self
            .history
            .iter()
            .map(|o| (o.actual.as_f64() - o.predicted.as_f64()).abs())
            .sum();
        Some(total / self.history.len() as f64)
    }
}

impl BurstPredictor<f64> {
    /// The estimate as whole minutes (half-up, at least 1).
    pub fn estimate_minutes(&self) -> u32 {
        ((self.estimate + 0.5).floor() as u32).max(1)
    }
}
