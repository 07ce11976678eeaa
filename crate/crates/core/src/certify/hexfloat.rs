//! Bit-exact float serialization: `0x` followed by the 16 hex digits of the
//! IEEE-754 bit pattern.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::interval::{Box2, Interval};

#[derive(Clone, Copy, PartialEq)]
pub struct HexF64(pub f64);

impl HexF64 {
    pub fn encode(x: f64) -> String {
        format!("0x{:016x}", x.to_bits())
    }

    pub fn decode(s: &str) -> Option<f64> {
        let digits = s.strip_prefix("0x")?;
        if digits.len() != 16 {
            return None;
        }
        u64::from_str_radix(digits, 16).ok().map(f64::from_bits)
    }
}

impl fmt::Debug for HexF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", HexF64::encode(self.0), self.0)
    }
}

impl From<f64> for HexF64 {
    fn from(x: f64) -> Self {
        HexF64(x)
    }
}

impl Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&HexF64::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = HexF64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a string 0x followed by 16 hex digits")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<HexF64, E> {
                HexF64::decode(s)
                    .map(HexF64)
                    .ok_or_else(|| E::custom(format!("bad float bit pattern `{s}`")))
            }
        }
        d.deserialize_str(V)
    }
}

/// An interval as `[lo, hi]` bit patterns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexInterval(pub [HexF64; 2]);

impl HexInterval {
    pub fn get(&self) -> Option<Interval> {
        Interval::try_new(self.0[0].0, self.0[1].0)
    }
}

impl From<Interval> for HexInterval {
    fn from(x: Interval) -> Self {
        HexInterval([HexF64(x.lo()), HexF64(x.hi())])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexBox {
    pub r3: HexInterval,
    pub r5: HexInterval,
}

impl HexBox {
    pub fn get(&self) -> Option<Box2> {
        Some(Box2::new(self.r3.get()?, self.r5.get()?))
    }
}

impl From<Box2> for HexBox {
    fn from(b: Box2) -> Self {
        HexBox { r3: b.r3.into(), r5: b.r5.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        for x in [0.0, -0.0, 1.0, 0.1, f64::MIN_POSITIVE, 1e-300, f64::INFINITY, -2.5] {
            let s = serde_json::to_string(&HexF64(x)).unwrap();
            let back: HexF64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back.0.to_bits(), x.to_bits());
        }
        assert_eq!(HexF64::encode(1.0), "0x3ff0000000000000");
    }

    #[test]
    fn rejects_garbage() {
        assert!(serde_json::from_str::<HexF64>("\"0x3ff\"").is_err());
        assert!(serde_json::from_str::<HexF64>("\"1.0\"").is_err());
        assert!(serde_json::from_str::<HexF64>("1.0").is_err());
        let inverted = HexInterval([HexF64(2.0), HexF64(1.0)]);
        assert!(inverted.get().is_none());
    }
}
