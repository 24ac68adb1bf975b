use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `ℕ ∪ {∞}`. Variant order gives `Fin(_) < Inf`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

pub use ExtNat::{Fin, Inf};

impl ExtNat {
    pub const ZERO: ExtNat = Fin(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fin(n) => Some(n),
            Inf => None,
        }
    }

    /// Guarded subtraction: `None` on underflow or on `∞ − ∞`.
    pub fn checked_sub(self, rhs: ExtNat) -> Option<ExtNat> {
        match (self, rhs) {
            (Fin(a), Fin(b)) => a.checked_sub(b).map(Fin),
            (Inf, Fin(_)) => Some(Inf),
            (_, Inf) => None,
        }
    }

    pub fn scale(self, k: u64) -> ExtNat {
        match self {
            Fin(n) => Fin(n * k),
            Inf if k == 0 => Fin(0),
            Inf => Inf,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a + b),
            _ => Inf,
        }
    }
}

impl std::iter::Sum for ExtNat {
    fn sum<I: Iterator<Item = ExtNat>>(iter: I) -> ExtNat {
        iter.fold(Fin(0), |a, b| a + b)
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> ExtNat {
        Fin(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Fin(n) => s.serialize_u64(*n),
            Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ExtNat, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Fin(n)),
            Raw::Str(s) if s == "inf" => Ok(Inf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a nonnegative integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_saturation() {
        assert!(Fin(1_000_000) < Inf);
        assert_eq!(Fin(2) + Inf, Inf);
        assert_eq!(Fin(2) + Fin(3), Fin(5));
        assert_eq!(Inf.scale(0), Fin(0));
    }

    #[test]
    fn guarded_subtraction() {
        assert_eq!(Fin(3).checked_sub(Fin(1)), Some(Fin(2)));
        assert_eq!(Fin(1).checked_sub(Fin(3)), None);
        assert_eq!(Inf.checked_sub(Fin(3)), Some(Inf));
        assert_eq!(Inf.checked_sub(Inf), None);
    }

    #[test]
    fn json() {
        assert_eq!(serde_json::to_string(&vec![Fin(2), Inf]).unwrap(), "[2,\"inf\"]");
        let v: Vec<ExtNat> = serde_json::from_str("[0,\"inf\"]").unwrap();
        assert_eq!(v, vec![Fin(0), Inf]);
        assert!(serde_json::from_str::<ExtNat>("\"infinity\"").is_err());
    }
}
