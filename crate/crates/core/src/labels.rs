//! The six classifier output heads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    RescueNeeded,
    Flood,
    WaterNeeded,
    Dcew,
    Injured,
    Sick,
}

impl Label {
    pub const ALL: [Label; 6] = [
        Label::RescueNeeded,
        Label::Flood,
        Label::WaterNeeded,
        Label::Dcew,
        Label::Injured,
        Label::Sick,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Label::RescueNeeded => "rescue_needed",
            Label::Flood => "flood",
            Label::WaterNeeded => "water_needed",
            Label::Dcew => "dcew",
            Label::Injured => "injured",
            Label::Sick => "sick",
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Label::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .or(match s {
                "decw" => Some(Label::Dcew),
                _ => None,
            })
            .ok_or_else(|| format!("unknown label `{s}`"))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Merged signal for "Sick or Injured"; set when either head fires.
pub const SICK_OR_INJURED: &str = "sick_or_injured";

/// Names accepted as label-weight keys.
pub const WEIGHT_SIGNALS: [&str; 7] = [
    "rescue_needed",
    "flood",
    "water_needed",
    "dcew",
    "injured",
    "sick",
    SICK_OR_INJURED,
];

fn flag<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Bool(bool),
        Int(u8),
    }
    match Raw::deserialize(d)? {
        Raw::Bool(b) => Ok(b),
        Raw::Int(0) => Ok(false),
        Raw::Int(1) => Ok(true),
        Raw::Int(n) => Err(serde::de::Error::custom(format!("label flag must be 0 or 1, got {n}"))),
    }
}

fn ser_flag<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*v))
}

/// Binary flags for the six heads. Serialized as 0/1; missing keys read as 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelVector {
    #[serde(default, deserialize_with = "flag", serialize_with = "ser_flag")]
    pub rescue_needed: bool,
    #[serde(default, deserialize_with = "flag", serialize_with = "ser_flag")]
    pub flood: bool,
    #[serde(default, deserialize_with = "flag", serialize_with = "ser_flag")]
    pub water_needed: bool,
    #[serde(default, deserialize_with = "flag", serialize_with = "ser_flag", alias = "decw")]
    pub dcew: bool,
    #[serde(default, deserialize_with = "flag", serialize_with = "ser_flag")]
    pub injured: bool,
    #[serde(default, deserialize_with = "flag", serialize_with = "ser_flag")]
    pub sick: bool,
}

impl LabelVector {
    pub fn all() -> Self {
        Self::from_array([true; 6])
    }

    pub fn from_array(flags: [bool; 6]) -> Self {
        let [rescue_needed, flood, water_needed, dcew, injured, sick] = flags;
        LabelVector {
            rescue_needed,
            flood,
            water_needed,
            dcew,
            injured,
            sick,
        }
    }

    pub fn to_array(self) -> [bool; 6] {
        [
            self.rescue_needed,
            self.flood,
            self.water_needed,
            self.dcew,
            self.injured,
            self.sick,
        ]
    }

    pub fn get(&self, label: Label) -> bool {
        self.to_array()[label.index()]
    }

    pub fn set(&mut self, label: Label, on: bool) {
        let mut flags = self.to_array();
        flags[label.index()] = on;
        *self = Self::from_array(flags);
    }

    pub fn with(mut self, label: Label) -> Self {
        self.set(label, true);
        self
    }

    /// Value of a weight signal, or `None` for an unknown signal name.
    pub fn signal(&self, name: &str) -> Option<bool> {
        if name == SICK_OR_INJURED {
            return Some(self.sick || self.injured);
        }
        name.parse::<Label>().ok().map(|l| self.get(l))
    }

    pub fn count(&self) -> usize {
        self.to_array().iter().filter(|&&b| b).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_zero_one() {
        let v: LabelVector = serde_json::from_str(r#"{"flood":1,"sick":true,"decw":1}"#).unwrap();
        assert!(v.flood && v.sick && v.dcew && !v.water_needed);
        assert_eq!(
            serde_json::to_string(&LabelVector::default().with(Label::Flood)).unwrap(),
            r#"{"rescue_needed":0,"flood":1,"water_needed":0,"dcew":0,"injured":0,"sick":0}"#
        );
        assert!(serde_json::from_str::<LabelVector>(r#"{"flood":2}"#).is_err());
        assert!(serde_json::from_str::<LabelVector>(r#"{"fire":1}"#).is_err());
    }

    #[test]
    fn merged_signal() {
        let v = LabelVector::default().with(Label::Injured);
        assert_eq!(v.signal(SICK_OR_INJURED), Some(true));
        assert_eq!(v.signal("sick"), Some(false));
        assert_eq!(v.signal("bogus"), None);
        assert_eq!(LabelVector::all().count(), 6);
    }
}
