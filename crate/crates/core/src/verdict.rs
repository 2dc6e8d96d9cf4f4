use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::Expert;

/// Three-valued output of a comparison test, serialized as `0`, `0.5`, `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Expert0,
    Inconclusive,
    Expert1,
}

impl Verdict {
    pub const ALL: [Verdict; 3] = [Verdict::Expert0, Verdict::Inconclusive, Verdict::Expert1];

    /// Numeric value in `{0, 1/2, 1}`.
    pub fn value(self) -> f64 {
        match self {
            Verdict::Expert0 => 0.0,
            Verdict::Inconclusive => 0.5,
            Verdict::Expert1 => 1.0,
        }
    }

    /// Swaps the two experts; inconclusive is a fixed point.
    pub fn complement(self) -> Self {
        match self {
            Verdict::Expert0 => Verdict::Expert1,
            Verdict::Inconclusive => Verdict::Inconclusive,
            Verdict::Expert1 => Verdict::Expert0,
        }
    }

    pub fn expert(self) -> Option<Expert> {
        match self {
            Verdict::Expert0 => Some(Expert::Zero),
            Verdict::Inconclusive => None,
            Verdict::Expert1 => Some(Expert::One),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Expert0 => "expert0",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Expert1 => "expert1",
        }
    }

    /// Inverse of [`Verdict::label`].
    pub fn from_label(s: &str) -> Option<Self> {
        Verdict::ALL.into_iter().find(|v| v.label() == s)
    }
}

impl From<Expert> for Verdict {
    fn from(e: Expert) -> Self {
        match e {
            Expert::Zero => Verdict::Expert0,
            Expert::One => Verdict::Expert1,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        match v {
            x if x == 0.0 => Ok(Verdict::Expert0),
            x if x == 0.5 => Ok(Verdict::Inconclusive),
            x if x == 1.0 => Ok(Verdict::Expert1),
            other => Err(serde::de::Error::custom(format!(
                "verdict must be 0, 0.5 or 1, got {other}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_an_involution() {
        for v in Verdict::ALL {
            assert_eq!(v.complement().complement(), v);
            assert_eq!(v.value() + v.complement().value(), 1.0);
        }
        assert_eq!(Verdict::Inconclusive.complement(), Verdict::Inconclusive);
    }

    #[test]
    fn serializes_as_number() {
        let s = serde_json::to_string(&[Verdict::Expert0, Verdict::Inconclusive, Verdict::Expert1])
            .unwrap();
        assert_eq!(s, "[0.0,0.5,1.0]");
        let back: Vec<Verdict> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Verdict::ALL.to_vec());
        assert!(serde_json::from_str::<Verdict>("0.25").is_err());
    }

    #[test]
    fn labels_round_trip() {
        for v in Verdict::ALL {
            assert_eq!(Verdict::from_label(v.label()), Some(v));
        }
        assert_eq!(Verdict::from_label("expert2"), None);
    }
}
