//! Minute-granular scenario clock.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Minutes since the scenario epoch.
///
/// Displayed and parsed as `HH:MM`; hours are not wrapped at 24 so multi-day
/// scenarios keep a single monotone clock (`27:05` is 03:05 on day two).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(u32);

impl TimePoint {
    pub const ZERO: TimePoint = TimePoint(0);

    pub const fn from_minutes(minutes: u32) -> Self {
        TimePoint(minutes)
    }

    pub const fn hm(hours: u32, minutes: u32) -> Self {
        TimePoint(hours * 60 + minutes)
    }

    pub const fn minutes(self) -> u32 {
        self.0
    }

    /// Whole minutes elapsed since `earlier`, or `None` if `earlier` is later.
    pub fn checked_since(self, earlier: TimePoint) -> Option<u32> {
        self.0.checked_sub(earlier.0)
    }

    /// Minutes since `earlier`, saturating at zero.
    pub fn since(self, earlier: TimePoint) -> u32 {
        self.0.saturating_sub(earlier.0)
    }
}

impl Add<u32> for TimePoint {
    type Output = TimePoint;

    fn add(self, minutes: u32) -> TimePoint {
        TimePoint(self.0 + minutes)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl FromStr for TimePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Time(s.to_string());
        let s = s.trim();
        match s.split_once(':') {
            Some((h, m)) => {
                if h.is_empty() || m.len() != 2 {
                    return Err(bad());
                }
                let h: u32 = h.parse().map_err(|_| bad())?;
                let m: u32 = m.parse().map_err(|_| bad())?;
                if m >= 60 {
                    return Err(bad());
                }
                h.checked_mul(60)
                    .and_then(|v| v.checked_add(m))
                    .map(TimePoint)
                    .ok_or_else(bad)
            }
            None => s.parse().map(TimePoint).map_err(|_| bad()),
        }
    }
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct TimeVisitor;

        impl Visitor<'_> for TimeVisitor {
            type Value = TimePoint;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"HH:MM\" or a non-negative number of minutes")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<TimePoint, E> {
                u32::try_from(v)
                    .map(TimePoint)
                    .map_err(|_| E::custom("minutes out of range"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<TimePoint, E> {
                u32::try_from(v)
                    .map(TimePoint)
                    .map_err(|_| E::custom("time must be non-negative"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<TimePoint, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(TimeVisitor)
    }
}

/// Travel time in whole minutes, rounded half-up once per leg.
pub fn travel_minutes(distance_miles: f64, speed_mph: f64) -> Result<u32> {
    if !(speed_mph > 0.0) || !speed_mph.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "speed must be positive, got {speed_mph}"
        )));
    }
    if !(distance_miles >= 0.0) || !distance_miles.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "distance must be non-negative, got {distance_miles}"
        )));
    }
    let exact = distance_miles * 60.0 / speed_mph;
    // 1e-9 absorbs representation error such as 2.2 * 3 = 6.6000000000000005
    // or 4.5 * 3 landing just below 13.5.
    Ok((exact + 0.5 + 1e-9).floor() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn travel_minutes_matches_published_legs() {
        assert_eq!(travel_minutes(5.1, 20.0).unwrap(), 15);
        assert_eq!(travel_minutes(2.2, 20.0).unwrap(), 7);
        assert_eq!(travel_minutes(0.0, 20.0).unwrap(), 0);
        assert_eq!(travel_minutes(4.5, 20.0).unwrap(), 14);
        assert_eq!(travel_minutes(7.7, 20.0).unwrap(), 23);
        assert_eq!(travel_minutes(1.8, 20.0).unwrap(), 5);
    }

    #[test]
    fn travel_minutes_rejects_bad_speed() {
        assert!(matches!(travel_minutes(1.0, 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(travel_minutes(1.0, -3.0), Err(Error::InvalidConfig(_))));
        assert!(travel_minutes(-1.0, 20.0).is_err());
    }

    #[test]
    fn parse_and_format() {
        let t: TimePoint = "12:13".parse().unwrap();
        assert_eq!(t.minutes(), 733);
        assert_eq!(t.to_string(), "12:13");
        assert_eq!("905".parse::<TimePoint>().unwrap(), TimePoint::hm(15, 5));
        assert_eq!(TimePoint::from_minutes(27 * 60 + 5).to_string(), "27:05");
        for bad in ["", "12:3", "12:60", "ab:00", "-5", "1:2:3"] {
            assert!(bad.parse::<TimePoint>().is_err(), "{bad}");
        }
    }

    #[test]
    fn serde_accepts_both_forms() {
        let a: TimePoint = serde_json::from_str("\"14:00\"").unwrap();
        let b: TimePoint = serde_json::from_str("840").unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"14:00\"");
        assert!(serde_json::from_str::<TimePoint>("-1").is_err());
    }

    #[test]
    fn since_is_non_negative() {
        let early = TimePoint::hm(12, 0);
        let late = TimePoint::hm(14, 0);
        assert_eq!(late.checked_since(early), Some(120));
        assert_eq!(early.checked_since(late), None);
        assert_eq!(early.since(late), 0);
    }

    proptest! {
        #[test]
        fn hhmm_round_trips(m in 0u32..2_000_000) {
            let t = TimePoint::from_minutes(m);
            prop_assert_eq!(t.to_string().parse::<TimePoint>().unwrap(), t);
        }

        #[test]
        fn travel_is_monotone(a in 0.0f64..500.0, b in 0.0f64..500.0, speed in 1.0f64..80.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(travel_minutes(lo, speed).unwrap() <= travel_minutes(hi, speed).unwrap());
        }
    }
}
