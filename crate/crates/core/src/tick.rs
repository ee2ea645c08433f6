//! Exact rational time.
//!
//! All timeline arithmetic is done in [`Tick`]s, which are exact rationals.
//! On the wire a tick is a string `"p/q"`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A point or span on the timeline.
pub type Tick = Ratio<i64>;

pub fn ticks(n: i64) -> Tick {
    Tick::from_integer(n)
}

/// Parse `"p/q"` or `"p"` into a tick.
pub fn parse_tick(s: &str) -> Result<Tick, ParseTickError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = i64::from_str(num).map_err(|_| ParseTickError(s.to_string()))?;
    let den = i64::from_str(den).map_err(|_| ParseTickError(s.to_string()))?;
    if den == 0 {
        return Err(ParseTickError(s.to_string()));
    }
    Ok(Tick::new(num, den))
}

/// Always `"p/q"`, even for integers.
pub fn format_tick(t: &Tick) -> String {
    format!("{}/{}", t.numer(), t.denom())
}

pub fn tick_to_f64(t: &Tick) -> f64 {
    *t.numer() as f64 / *t.denom() as f64
}

pub fn is_nonnegative(t: &Tick) -> bool {
    t.is_zero() || t.is_positive()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTickError(pub String);

impl fmt::Display for ParseTickError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}, expected \"p/q\"", self.0)
    }
}

impl std::error::Error for ParseTickError {}

/// Serde adapter for `#[serde(with = "crate::tick::serde_tick")]`.
pub mod serde_tick {
    use super::*;

    pub fn serialize<S: Serializer>(t: &Tick, s: S) -> Result<S::Ok, S::Error> {
        format_tick(t).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Tick, D::Error> {
        let s = String::deserialize(d)?;
        parse_tick(&s).map_err(serde::de::Error::custom)
    }
}
