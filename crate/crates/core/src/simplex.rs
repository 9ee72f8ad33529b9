//! Points of the probability simplex and the tail direction of an event.
//!
//! A [`SimplexPoint`] is the open form: `k` nonnegative coordinates with sum at
//! most one. A [`CompletedPoint`] carries the extra slack coordinate at index 0
//! so that all `k + 1` coordinates sum to one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on coordinate sums when validating simplex membership.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Default slack on the partial-order precondition of the bounds (strict).
pub const ORDER_TOLERANCE: f64 = 0.0;

/// Tolerance used by numerical property assertions.
pub const NUMERIC_TOLERANCE: f64 = 1e-12;

/// Which side of the partial order an event looks at.
///
/// `Lower` is `{ mean <= z }` and `Upper` is `{ mean >= z }`, both read
/// coordinatewise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailDirection {
    Lower,
    Upper,
}

impl TailDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            TailDirection::Lower => "lower",
            TailDirection::Upper => "upper",
        }
    }

    /// Whether `value` lies on this side of `threshold`.
    #[inline]
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            TailDirection::Lower => value <= threshold,
            TailDirection::Upper => value >= threshold,
        }
    }

    /// Order precondition `z <= mu` (lower) or `z >= mu` (upper) with slack.
    #[inline]
    pub fn admits(self, z: f64, mu: f64, slack: f64) -> bool {
        match self {
            TailDirection::Lower => z <= mu + slack,
            TailDirection::Upper => z >= mu - slack,
        }
    }
}

impl fmt::Display for TailDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TailDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lower" | "le" | "<=" => Ok(TailDirection::Lower),
            "upper" | "ge" | ">=" => Ok(TailDirection::Upper),
            other => Err(Error::InvalidArgument(format!(
                "unknown tail direction {other:?} (expected lower or upper)"
            ))),
        }
    }
}

/// `k` nonnegative coordinates summing to at most one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Validates `coords`. Coordinates within [`SUM_TOLERANCE`] below zero are
    /// clamped to zero.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSimplexPoint("no coordinates".into()));
        }
        let mut coords = coords;
        for (i, c) in coords.iter_mut().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidSimplexPoint(format!(
                    "coordinate {} is not finite",
                    i + 1
                )));
            }
            if *c < -SUM_TOLERANCE {
                return Err(Error::InvalidSimplexPoint(format!(
                    "coordinate {} is negative ({c})",
                    i + 1
                )));
            }
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        if sum > 1.0 + SUM_TOLERANCE {
            return Err(Error::InvalidSimplexPoint(format!(
                "coordinates sum to {sum}, which exceeds 1"
            )));
        }
        Ok(SimplexPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn sum(&self) -> f64 {
        self.coords.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(coords)
    }
}

/// `k + 1` nonnegative coordinates summing to one; index 0 is the slack cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CompletedPoint {
    coords: Vec<f64>,
}

impl CompletedPoint {
    /// Validates a full `k + 1` vector, completion coordinate first.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidSimplexPoint(
                "a completed point needs at least two coordinates".into(),
            ));
        }
        let mut coords = coords;
        for (i, c) in coords.iter_mut().enumerate() {
            if !c.is_finite() || *c < -SUM_TOLERANCE {
                return Err(Error::InvalidSimplexPoint(format!(
                    "coordinate {i} is invalid ({c})"
                )));
            }
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidSimplexPoint(format!(
                "coordinates sum to {sum}, expected 1"
            )));
        }
        Ok(CompletedPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The slack coordinate `1 - sum(rest)`.
    pub fn completion(&self) -> f64 {
        self.coords[0]
    }

    /// Coordinates `1..=k`.
    pub fn tail(&self) -> &[f64] {
        &self.coords[1..]
    }

    /// Number of free coordinates `k` (one less than the length).
    pub fn k(&self) -> usize {
        self.coords.len() - 1
    }

    /// Drops the completion coordinate.
    pub fn to_simplex(&self) -> SimplexPoint {
        SimplexPoint {
            coords: self.tail().to_vec(),
        }
    }
}

/// Lifts `p` to `k + 1` coordinates by prepending `1 - sum(p)`.
///
/// A completion within [`SUM_TOLERANCE`] below zero is clamped to zero.
pub fn complete(p: &SimplexPoint) -> CompletedPoint {
    let mut slack = 1.0 - p.sum();
    if slack < 0.0 {
        slack = 0.0;
    }
    let mut coords = Vec::with_capacity(p.dim() + 1);
    coords.push(slack);
    coords.extend_from_slice(p.coords());
    CompletedPoint { coords }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_fills_slack_coordinate() {
        let p = SimplexPoint::new(vec![0.3, 0.3]).unwrap();
        let c = complete(&p);
        assert_eq!(c.k(), 2);
        assert!((c.coords()[0] - 0.4).abs() < 1e-15);
        assert_eq!(&c.coords()[1..], &[0.3, 0.3]);
    }

    #[test]
    fn complete_at_vertex() {
        let c = complete(&SimplexPoint::new(vec![1.0]).unwrap());
        assert_eq!(c.coords(), &[0.0, 1.0]);
    }

    #[test]
    fn oversized_sum_rejected() {
        assert!(matches!(
            SimplexPoint::new(vec![0.6, 0.6]),
            Err(Error::InvalidSimplexPoint(_))
        ));
    }

    #[test]
    fn tiny_overshoot_is_clamped() {
        let p = SimplexPoint::new(vec![0.5, 0.5 + 1e-12]).unwrap();
        assert_eq!(complete(&p).completion(), 0.0);
        let q = SimplexPoint::new(vec![-1e-12, 0.5]).unwrap();
        assert_eq!(q.coords()[0], 0.0);
    }

    #[test]
    fn negative_and_nan_rejected() {
        assert!(SimplexPoint::new(vec![-0.1, 0.5]).is_err());
        assert!(SimplexPoint::new(vec![f64::NAN]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
    }

    #[test]
    fn completed_point_requires_unit_sum() {
        assert!(CompletedPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(CompletedPoint::new(vec![0.5, 0.4]).is_err());
        assert!(CompletedPoint::new(vec![1.0]).is_err());
    }

    #[test]
    fn direction_parsing() {
        assert_eq!(
            "lower".parse::<TailDirection>().unwrap(),
            TailDirection::Lower
        );
        assert_eq!(
            "UPPER".parse::<TailDirection>().unwrap(),
            TailDirection::Upper
        );
        assert!("sideways".parse::<TailDirection>().is_err());
    }
}
