//! Rescue priority: a weighted sum of label flags and environmental
//! conditions, clamped into `[base_priority, max_priority]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelVector, WEIGHT_SIGNALS};
use crate::scalar::{clamp, Scalar};
use crate::task::{PrioritySource, RescueTask};

/// Environmental conditions at a task location, keyed by condition name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnvVector<T = f64>(BTreeMap<String, T>);

impl<T: Scalar> EnvVector<T> {
    pub fn new() -> Self {
        EnvVector(BTreeMap::new())
    }

    pub fn with(mut self, key: &str, value: T) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn set(&mut self, key: &str, value: T) {
        self.0.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<T> {
        self.0.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        match self.0.iter().find(|(_, v)| v.is_negative() || v.as_f64().is_nan()) {
            Some((k, v)) => Err(Error::InvalidConfig(format!(
                "environment value `{k}` must be non-negative, got {v:?}"
            ))),
            None => Ok(()),
        }
    }
}

impl<T> FromIterator<(String, T)> for EnvVector<T> {
    fn from_iter<I: IntoIterator<Item = (String, T)>>(iter: I) -> Self {
        EnvVector(iter.into_iter().collect())
    }
}

fn default_base<T: Scalar>() -> T {
    T::one()
}

fn default_max<T: Scalar>() -> T {
    T::lit(10.0)
}

/// Label weights, environmental weights and clamping bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct WeightConfig<T = f64> {
    #[serde(default, alias = "labels")]
    pub label_weights: BTreeMap<String, T>,
    #[serde(default, alias = "env")]
    pub env_weights: BTreeMap<String, T>,
    #[serde(default = "default_base")]
    pub base_priority: T,
    #[serde(default = "default_max")]
    pub max_priority: T,
}

impl<T: Scalar> WeightConfig<T> {
    /// The demonstration weights of the Port Arthur walkthrough.
    pub fn demo() -> Self {
        let labels = [
            ("flood", 1.5),
            ("water_needed", 1.5),
            ("dcew", 2.0),
            ("sick_or_injured", 2.5),
        ];
        let env = [
            ("storm", 1.0),
            ("road_damaged", 1.0),
            ("forecast_storm", 0.5),
            ("forecast_flood", 0.5),
        ];
        WeightConfig {
            label_weights: labels.iter().map(|&(k, v)| (k.to_string(), T::lit(v))).collect(),
            env_weights: env.iter().map(|&(k, v)| (k.to_string(), T::lit(v))).collect(),
            base_priority: T::one(),
            max_priority: T::lit(10.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (k, w) in &self.label_weights {
            if !WEIGHT_SIGNALS.contains(&k.as_str()) {
                problems.push(format!("unknown label weight `{k}`"));
            }
            if w.is_negative() {
                problems.push(format!("label weight `{k}` is negative"));
            }
        }
        for (k, w) in &self.env_weights {
            if w.is_negative() {
                problems.push(format!("env weight `{k}` is negative"));
            }
        }
        if self.base_priority > self.max_priority {
            problems.push("base_priority exceeds max_priority".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }

    /// Every weight and both bounds multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        WeightConfig {
            label_weights: self.label_weights.iter().map(|(n, &w)| (n.clone(), w * k)).collect(),
            env_weights: self.env_weights.iter().map(|(n, &w)| (n.clone(), w * k)).collect(),
            base_priority: self.base_priority * k,
            max_priority: self.max_priority * k,
        }
    }
}

impl<T: Scalar> Default for WeightConfig<T> {
    fn default() -> Self {
        Self::demo()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriorityScore<T = f64>(T);

impl<T: Scalar> PriorityScore<T> {
    pub fn value(self) -> T {
        self.0
    }
}

/// Weighted sum before clamping.
pub fn raw_score<T: Scalar>(labels: &LabelVector, env: &EnvVector<T>, w: &WeightConfig<T>) -> Result<T> {
    env.validate()?;
    let mut total = T::zero();
    for (key, value) in env.iter() {
        let weight = w
            .env_weights
            .get(key)
            .ok_or_else(|| Error::MissingEnvWeight(key.to_string()))?;
        total = total + value * *weight;
    }
    for (signal, &weight) in &w.label_weights {
        if labels.signal(signal).unwrap_or(false) {
            total = total + weight;
        }
    }
    Ok(total)
}

pub fn score<T: Scalar>(
    labels: &LabelVector,
    env: &EnvVector<T>,
    w: &WeightConfig<T>,
) -> Result<PriorityScore<T>> {
    let raw = raw_score(labels, env, w)?;
    Ok(PriorityScore(clamp(raw, w.base_priority, w.max_priority)))
}

/// Recomputes the priority of every queued task from its latest environment.
///
/// `env_feed` holds the most recent condition report per task id; tasks
/// without a report keep their own `env`. Tasks whose priority was set
/// explicitly are passed through unchanged.
pub fn rebalance(
    queue: &[RescueTask],
    env_feed: &BTreeMap<String, EnvVector>,
    w: &WeightConfig,
) -> Result<Vec<RescueTask>> {
    queue
        .iter()
        .map(|task| {
            let mut task = task.clone();
            if let Some(env) = env_feed.get(&task.id) {
                task.env = env.clone();
            }
            if task.priority_source == PrioritySource::Scored {
                task.priority = score(&task.labels, &task.env, w)?.value();
            }
            Ok(task)
        })
        .collect()
}
