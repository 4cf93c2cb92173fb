use std::cmp::Ordering;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::graph::Cost;

/// Exact quotient `num / den` of two costs, compared by cross-multiplication.
/// A zero denominator with positive numerator stands for `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactRatio {
    num: Cost,
    den: Cost,
}

impl ExactRatio {
    /// Sign of the denominator is folded into the numerator.
    pub fn new(num: Cost, den: Cost) -> Self {
        if den < 0 {
            ExactRatio {
                num: -num,
                den: -den,
            }
        } else {
            ExactRatio { num, den }
        }
    }

    pub fn infinity() -> Self {
        ExactRatio { num: 1, den: 0 }
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn num(&self) -> Cost {
        self.num
    }

    pub fn den(&self) -> Cost {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        if self.den == 0 {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => {
                let lhs = self.num as i128 * other.den as i128;
                let rhs = other.num as i128 * self.den as i128;
                lhs.cmp(&rhs)
            }
        }
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for ExactRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExactRatio", 2)?;
        s.serialize_field("num", &self.num)?;
        s.serialize_field("den", &self.den)?;
        s.end()
    }
}
