//! Open intervals with possibly infinite endpoints.
//!
//! Serialized endpoints use the strings "inf" / "-inf" instead of IEEE
//! infinities so every emitted JSON document stays standard-compliant.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Open interval (lo, hi); endpoints may be infinite but not NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "interval endpoints must not be NaN");
        assert!(lo < hi, "interval requires lo < hi, got ({lo}, {hi})");
        Interval { lo, hi }
    }

    pub fn real_line() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

pub(crate) fn serialize_endpoint<S: Serializer>(value: f64, ser: S) -> Result<S::Ok, S::Error> {
    if value == f64::INFINITY {
        ser.serialize_str("inf")
    } else if value == f64::NEG_INFINITY {
        ser.serialize_str("-inf")
    } else {
        ser.serialize_f64(value)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum EndpointRepr {
    Number(f64),
    Text(String),
}

pub(crate) fn parse_endpoint(repr: EndpointRepr) -> Result<f64, String> {
    match repr {
        EndpointRepr::Number(v) => Ok(v),
        EndpointRepr::Text(s) => match s.as_str() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            other => Err(format!("unrecognized interval endpoint {other:?}")),
        },
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &EndpointField(self.lo))?;
        st.serialize_field("hi", &EndpointField(self.hi))?;
        st.end()
    }
}

struct EndpointField(f64);

impl Serialize for EndpointField {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        serialize_endpoint(self.0, ser)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: EndpointRepr,
            hi: EndpointRepr,
        }
        let raw = Raw::deserialize(de)?;
        let lo = parse_endpoint(raw.lo).map_err(D::Error::custom)?;
        let hi = parse_endpoint(raw.hi).map_err(D::Error::custom)?;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(D::Error::custom(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }
}
