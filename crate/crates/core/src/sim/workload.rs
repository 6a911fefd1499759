//! Seeded synthetic workloads.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, Location, EARTH_RADIUS_MILES};
use crate::labels::{Label, LabelVector};
use crate::priority::EnvVector;
use crate::sim::scenario::{ScenarioConfig, ScenarioFile, TaskSpec, UnitSpec, SCENARIO_FORMAT};
use crate::time::TimePoint;

/// Env key carrying the generated ambient severity.
pub const CONDITIONS_KEY: &str = "conditions";

fn default_hourly_rates() -> Vec<f64> {
    // night lull, morning surge, steady afternoon, evening surge; two days
    let day = [
        2.0, 1.5, 1.0, 1.0, 1.5, 2.5, 4.0, 5.0, 5.5, 5.0, 4.5, 4.0, //
        4.0, 4.0, 4.5, 5.0, 5.5, 6.0, 5.5, 4.5, 4.0, 3.5, 3.0, 2.5,
    ];
    day.repeat(2)
}

fn default_label_probabilities() -> BTreeMap<Label, f64> {
    BTreeMap::from([
        (Label::RescueNeeded, 0.9),
        (Label::Flood, 0.5),
        (Label::WaterNeeded, 0.3),
        (Label::Dcew, 0.15),
        (Label::Injured, 0.1),
        (Label::Sick, 0.1),
    ])
}

fn default_config() -> ScenarioConfig {
    let mut config = ScenarioConfig::default();
    config.weights.env_weights.insert(CONDITIONS_KEY.to_string(), 1.0);
    config
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadSpec {
    pub seed: u64,
    pub count: usize,
    pub start: TimePoint,
    /// Relative arrival rate for each hour after `start`; the horizon is
    /// its length.
    pub hourly_rates: Vec<f64>,
    pub burst_mean: f64,
    pub burst_sd: f64,
    pub label_probabilities: BTreeMap<Label, f64>,
    /// `conditions` is drawn uniformly from this range.
    pub env_range: (f64, f64),
    pub base: GeoPoint,
    /// Unclustered tasks land uniformly in this disk around `base`.
    pub radius_miles: f64,
    pub clusters: usize,
    pub cluster_radius_miles: f64,
    /// Share of tasks drawn from clusters.
    pub cluster_share: f64,
    pub units: usize,
    pub config: ScenarioConfig,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            seed: 42,
            count: 550,
            start: TimePoint::ZERO,
            hourly_rates: default_hourly_rates(),
            burst_mean: 54.0,
            burst_sd: 15.0,
            label_probabilities: default_label_probabilities(),
            env_range: (0.5, 2.5),
            base: GeoPoint { lat: 29.8849, lon: -93.9399 },
            radius_miles: 8.0,
            clusters: 6,
            cluster_radius_miles: 0.8,
            cluster_share: 0.8,
            units: 10,
            config: default_config(),
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.count == 0 {
            problems.push("count: must be positive".to_string());
        }
        if self.hourly_rates.is_empty()
            || self.hourly_rates.iter().any(|r| !(r.is_finite() && *r >= 0.0))
            || self.hourly_rates.iter().sum::<f64>() <= 0.0
        {
            problems.push("hourly_rates: need non-negative rates with a positive total".to_string());
        }
        if !(self.burst_mean.is_finite() && self.burst_mean > 0.0) {
            problems.push("burst_mean: must be positive".to_string());
        }
        if !(self.burst_sd.is_finite() && self.burst_sd >= 0.0) {
            problems.push("burst_sd: must be non-negative".to_string());
        }
        for (label, p) in &self.label_probabilities {
            if !(0.0..=1.0).contains(p) {
                problems.push(format!("label_probabilities.{}: must lie in [0, 1]", label.name()));
            }
        }
        let (lo, hi) = self.env_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            problems.push("env_range: need 0 <= low <= high".to_string());
        }
        if self.base.validate().is_err() {
            problems.push("base: invalid coordinates".to_string());
        }
        if !(self.radius_miles.is_finite() && self.radius_miles > 0.0) {
            problems.push("radius_miles: must be positive".to_string());
        }
        if !(self.cluster_radius_miles.is_finite() && self.cluster_radius_miles >= 0.0) {
            problems.push("cluster_radius_miles: must be non-negative".to_string());
        }
        if !(0.0..=1.0).contains(&self.cluster_share) {
            problems.push("cluster_share: must lie in [0, 1]".to_string());
        }
        if self.cluster_share > 0.0 && self.clusters == 0 {
            problems.push("clusters: cluster_share > 0 needs at least one cluster".to_string());
        }
        if self.units == 0 {
            problems.push("units: must be positive".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Workload(problems.join("; ")))
        }
    }
}

/// Uniform point in a disk of `radius` miles around `center`.
fn disk_point(rng: &mut impl Rng, center: GeoPoint, radius: f64) -> GeoPoint {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * 2.0 * PI;
    offset(center, r * theta.cos(), r * theta.sin())
}

fn offset(center: GeoPoint, east_miles: f64, north_miles: f64) -> GeoPoint {
    let miles_per_degree = EARTH_RADIUS_MILES * PI / 180.0;
    GeoPoint {
        lat: center.lat + north_miles / miles_per_degree,
        lon: center.lon + east_miles / (miles_per_degree * center.lat.to_radians().cos()),
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn generate(spec: &WorkloadSpec) -> Result<ScenarioFile> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let hours = WeightedIndex::new(&spec.hourly_rates).map_err(|e| Error::Workload(format!("hourly_rates: {e}")))?;
    let burst = Normal::new(spec.burst_mean, spec.burst_sd).map_err(|e| Error::Workload(format!("burst: {e}")))?;

    let centers: Vec<GeoPoint> = (0..spec.clusters)
        .map(|_| disk_point(&mut rng, spec.base, spec.radius_miles))
        .collect();

    let mut arrivals: Vec<u32> = (0..spec.count)
        .map(|_| spec.start.minutes() + hours.sample(&mut rng) as u32 * 60 + rng.random_range(0..60))
        .collect();
    arrivals.sort_unstable();

    let (env_lo, env_hi) = spec.env_range;
    let mut tasks = Vec::with_capacity(spec.count);
    for (i, at) in arrivals.into_iter().enumerate() {
        let minutes = loop {
            let b = burst.sample(&mut rng).round();
            if b >= 1.0 {
                break b as u32;
            }
        };
        let mut labels = LabelVector::default();
        for (label, p) in &spec.label_probabilities {
            if rng.random::<f64>() < *p {
                labels.set(*label, true);
            }
        }
        let conditions = if env_hi > env_lo { rng.random_range(env_lo..env_hi) } else { env_lo };
        let env = EnvVector::new().with(CONDITIONS_KEY, round2(conditions));
        let point = if !centers.is_empty() && rng.random::<f64>() < spec.cluster_share {
            let c = centers[rng.random_range(0..centers.len())];
            disk_point(&mut rng, c, spec.cluster_radius_miles)
        } else {
            disk_point(&mut rng, spec.base, spec.radius_miles)
        };
        tasks.push(TaskSpec {
            id: (i + 1).to_string(),
            arrival: TimePoint::from_minutes(at),
            text: None,
            labels,
            env,
            priority: None,
            burst: Some(minutes),
            actual_burst: None,
            distance_from_base: None,
            location: Some(Location::Point(GeoPoint { lat: round6(point.lat), lon: round6(point.lon) })),
            required_capabilities: Vec::new(),
            demand: None,
        });
    }

    Ok(ScenarioFile {
        format: SCENARIO_FORMAT.to_string(),
        name: format!("synthetic-{}", spec.seed),
        epoch: None,
        start: Some(spec.start),
        config: spec.config.clone(),
        base: Some(spec.base),
        units: (1..=spec.units).map(|i| UnitSpec { id: i.to_string(), ..UnitSpec::default() }).collect(),
        tasks,
        distance_matrix: None,
        env_updates: Vec::new(),
    })
}
