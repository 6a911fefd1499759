//! Locations and the distance model.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius used for every great-circle computation.
pub const EARTH_RADIUS_MILES: f64 = 3958.8;

/// Matrix key of the shared rescue base.
pub const BASE_NODE: &str = "base";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        let p = GeoPoint { lat, lon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lat.abs() <= 90.0) || !(self.lon.abs() <= 180.0) {
            return Err(Error::Location(format!(
                "coordinates out of range: ({}, {})",
                self.lat, self.lon
            )));
        }
        Ok(())
    }

    pub fn miles_to(&self, other: &GeoPoint) -> f64 {
        great_circle(self.lat, self.lon, other.lat, other.lon, EARTH_RADIUS_MILES)
    }
}

/// Haversine distance between two (lat, lon) pairs given in degrees.
pub fn great_circle<T: Float>(lat1: T, lon1: T, lat2: T, lon2: T, radius: T) -> T {
    let two = T::one() + T::one();
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / two).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / two).sin().powi(2);
    // clamp guards asin against a = 1 + ulp for antipodal points
    two * radius * a.sqrt().min(T::one()).asin()
}

/// Where a task happens or a unit is based.
///
/// Serialized untagged: `{"lat": .., "lon": ..}` or a matrix key such as `"t7"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Point(GeoPoint),
    Node(String),
}

impl Location {
    pub fn node(key: impl Into<String>) -> Self {
        Location::Node(key.into())
    }

    pub fn base() -> Self {
        Location::Node(BASE_NODE.to_string())
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Point(p) => write!(f, "({:.5}, {:.5})", p.lat, p.lon),
            Location::Node(k) => f.write_str(k),
        }
    }
}

/// Pairwise miles between named nodes. Lookups are symmetric: an entry stored
/// under either `[a][b]` or `[b][a]` answers both directions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceMatrix(BTreeMap<String, BTreeMap<String, f64>>);

impl DistanceMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: &str, b: &str, miles: f64) {
        self.0
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string(), miles);
        self.0
            .entry(b.to_string())
            .or_default()
            .insert(a.to_string(), miles);
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        if a == b {
            return Some(0.0);
        }
        self.0
            .get(a)
            .and_then(|row| row.get(b))
            .or_else(|| self.0.get(b).and_then(|row| row.get(a)))
            .copied()
    }

    pub fn contains_node(&self, key: &str) -> bool {
        self.0.contains_key(key) || self.0.values().any(|row| row.contains_key(key))
    }

    /// Checks non-negativity, zero diagonal and symmetry of stored pairs.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (a, row) in &self.0 {
            for (b, &d) in row {
                if !(d >= 0.0) || !d.is_finite() {
                    problems.push(format!("distance_matrix[{a}][{b}] = {d} is not a non-negative number"));
                }
                if a == b && d != 0.0 {
                    problems.push(format!("distance_matrix[{a}][{a}] must be 0"));
                }
                if let Some(back) = self.0.get(b).and_then(|r| r.get(a)) {
                    if (back - d).abs() > 1e-9 {
                        problems.push(format!(
                            "distance_matrix is asymmetric for {a}/{b}: {d} vs {back}"
                        ));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Either great-circle distances over coordinates or an explicit matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum DistanceModel {
    Coordinates,
    Matrix(DistanceMatrix),
}

impl DistanceModel {
    pub fn distance(&self, a: &Location, b: &Location) -> Result<f64> {
        match (self, a, b) {
            (DistanceModel::Coordinates, Location::Point(p), Location::Point(q)) => Ok(p.miles_to(q)),
            (DistanceModel::Matrix(m), Location::Node(x), Location::Node(y)) => {
                m.get(x, y).ok_or_else(|| Error::DistanceLookup {
                    from: x.clone(),
                    to: y.clone(),
                })
            }
            (DistanceModel::Coordinates, _, _) => Err(Error::Location(format!(
                "coordinates mode cannot resolve {a} -> {b}"
            ))),
            (DistanceModel::Matrix(_), _, _) => Err(Error::Location(format!(
                "matrix mode cannot resolve {a} -> {b}"
            ))),
        }
    }

    pub fn can_resolve(&self, loc: &Location) -> bool {
        match (self, loc) {
            (DistanceModel::Coordinates, Location::Point(p)) => p.validate().is_ok(),
            (DistanceModel::Matrix(m), Location::Node(k)) => m.contains_node(k),
            _ => false,
        }
    }
}
