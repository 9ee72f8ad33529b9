//! Translate-and-scale map from box-bounded data into the simplex.
//!
//! With box `[a_l, b_l]` per coordinate and `S = sum_l (b_l - a_l)`, the
//! point `x` maps to `y_l = (x_l - a_l) / S`, which is nonnegative and sums
//! to at most one. The bounds are shared by every sample.

use crate::error::{Error, Result};
use crate::simplex::SimplexPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
    total_width: f64,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidBox("no coordinates".into()));
        }
        for (i, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidBox(format!(
                    "bounds of coordinate {} are not finite",
                    i + 1
                )));
            }
            if a > b {
                return Err(Error::InvalidBox(format!(
                    "lower bound {a} exceeds upper bound {b} at coordinate {}",
                    i + 1
                )));
            }
        }
        let total_width: f64 = lower.iter().zip(&upper).map(|(a, b)| b - a).sum();
        Ok(BoxBounds {
            lower,
            upper,
            total_width,
        })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// `S = sum_l (upper_l - lower_l)`.
    pub fn total_width(&self) -> f64 {
        self.total_width
    }

    fn scale(&self) -> Result<f64> {
        if self.total_width > 0.0 {
            Ok(self.total_width)
        } else {
            Err(Error::DegenerateBox)
        }
    }
}

/// Maps an in-box point into the simplex. The box is closed.
pub fn box_to_simplex(x: &[f64], bounds: &BoxBounds) -> Result<SimplexPoint> {
    if x.len() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            actual: x.len(),
        });
    }
    let scale = bounds.scale()?;
    let mut y = Vec::with_capacity(x.len());
    for (i, ((&xl, &a), &b)) in x.iter().zip(&bounds.lower).zip(&bounds.upper).enumerate() {
        if !(a <= xl && xl <= b) {
            return Err(Error::OutOfBox { coordinate: i + 1 });
        }
        y.push((xl - a) / scale);
    }
    SimplexPoint::new(y)
}

/// Inverse of [`box_to_simplex`]: `x_l = lower_l + z_l S`, for stating
/// thresholds in data units.
pub fn simplex_to_box_threshold(z: &SimplexPoint, bounds: &BoxBounds) -> Result<Vec<f64>> {
    if z.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            actual: z.dim(),
        });
    }
    let scale = bounds.scale()?;
    Ok(z.coords()
        .iter()
        .zip(&bounds.lower)
        .map(|(zl, a)| a + zl * scale)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_is_identity() {
        let b = BoxBounds::new(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(box_to_simplex(&[0.7], &b).unwrap().coords(), &[0.7]);
    }

    #[test]
    fn square_box_halves_and_scales() {
        let b = BoxBounds::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
        let y = box_to_simplex(&[1.0, 1.0], &b).unwrap();
        assert_eq!(y.coords(), &[0.25, 0.25]);
        assert_eq!(simplex_to_box_threshold(&y, &b).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn symmetric_interval_midpoint() {
        let b = BoxBounds::new(vec![-1.0], vec![1.0]).unwrap();
        let z = SimplexPoint::new(vec![0.5]).unwrap();
        assert_eq!(simplex_to_box_threshold(&z, &b).unwrap(), vec![0.0]);
    }

    #[test]
    fn degenerate_box() {
        let b = BoxBounds::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(box_to_simplex(&[0.0, 0.0], &b), Err(Error::DegenerateBox));
        let z = SimplexPoint::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(simplex_to_box_threshold(&z, &b), Err(Error::DegenerateBox));
    }

    #[test]
    fn corners_of_the_box_are_accepted() {
        let b = BoxBounds::new(vec![-3.0, 1.0], vec![2.0, 4.0]).unwrap();
        let lo = box_to_simplex(&[-3.0, 1.0], &b).unwrap();
        assert_eq!(lo.coords(), &[0.0, 0.0]);
        let hi = box_to_simplex(&[2.0, 4.0], &b).unwrap();
        assert!((hi.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_box_reports_coordinate() {
        let b = BoxBounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(
            box_to_simplex(&[0.5, 1.5], &b),
            Err(Error::OutOfBox { coordinate: 2 })
        );
        assert_eq!(
            box_to_simplex(&[f64::NAN, 0.5], &b),
            Err(Error::OutOfBox { coordinate: 1 })
        );
    }

    #[test]
    fn inverted_bounds_rejected() {
        assert!(matches!(
            BoxBounds::new(vec![1.0], vec![0.0]),
            Err(Error::InvalidBox(_))
        ));
        assert!(BoxBounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }
}
