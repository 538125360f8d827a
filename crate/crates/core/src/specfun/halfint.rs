use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer or half-integer stored as twice its value, so `3/2` is `HalfInt(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice_value: i32) -> Self {
        HalfInt(twice_value)
    }

    pub const fn int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// `2j + 1` as an integer.
    pub const fn multiplicity(self) -> i32 {
        self.0 + 1
    }
}

impl From<i32> for HalfInt {
    fn from(v: i32) -> Self {
        HalfInt::int(v)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: Self) -> Self {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: Self) -> Self {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> Self {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid half-integer literal `{0}`")]
pub struct ParseHalfIntError(String);

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseHalfIntError(s.to_string());
        if let Some((num, den)) = t.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| err())?;
            match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt::int(num)),
                _ => Err(err()),
            }
        } else if let Ok(v) = t.parse::<i32>() {
            Ok(HalfInt::int(v))
        } else {
            let v: f64 = t.parse().map_err(|_| err())?;
            let twice = 2.0 * v;
            if twice.fract() != 0.0 || twice.abs() > f64::from(i32::MAX) {
                return Err(err());
            }
            Ok(HalfInt(twice as i32))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let text = match Repr::deserialize(deserializer)? {
            Repr::Int(v) => v.to_string(),
            Repr::Float(v) => v.to_string(),
            Repr::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}
