//! Multivariate Chernoff-Hoeffding bound for sample means of independent
//! random vectors supported in the probability simplex.
//!
//! For means `mu` and a target `z` (both lifted with their completion
//! coordinate), the tail probability of the sample mean of `n` vectors obeys
//!
//! ```text
//! Pr{ mean <= z } <= prod_{l=0..k} (mu_l / z_l)^(n z_l)   when z <= mu
//! Pr{ mean >= z } <= prod_{l=0..k} (mu_l / z_l)^(n z_l)   when z >= mu
//! ```
//!
//! The right-hand side is `exp(-n KL(z || mu))`. It arises as the minimum over
//! `t` of `exp(n M(t))`, where
//!
//! ```text
//! M(t) = -sum_l t_l z_l + ln(mu_0 + sum_l mu_l e^(t_l))
//! ```
//!
//! is minimized at `t_l = ln(z_l mu_0 / (z_0 mu_l))`.
//!
//! All evaluation happens in the natural-log domain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::{complete, CompletedPoint, SimplexPoint, TailDirection, ORDER_TOLERANCE};

/// Free Chernoff parameters `t_1..t_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ExponentArgument {
    t: Vec<f64>,
}

impl ExponentArgument {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if let Some(i) = t.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "exponent argument t_{} is not finite",
                i + 1
            )));
        }
        Ok(ExponentArgument { t })
    }

    pub fn zeros(k: usize) -> Self {
        ExponentArgument { t: vec![0.0; k] }
    }

    pub fn values(&self) -> &[f64] {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }
}

/// A tail bound in log and linear form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    /// `n * sum(per_coordinate_exponent)`, not clamped.
    pub log_bound: f64,
    /// `exp(log_bound)` clamped to `[0, 1]`.
    pub bound: f64,
    /// The terms `z_l ln(mu_l / z_l)` for `l = 0..=k`.
    pub per_coordinate_exponent: Vec<f64>,
    pub n: u64,
    pub direction: TailDirection,
    /// Some `z_l > 0` met `mu_l = 0`; the bound is exactly zero.
    pub divergence_infinite: bool,
    /// Completed mean vector the bound was evaluated at.
    pub mu: CompletedPoint,
    /// Completed target vector.
    pub z: CompletedPoint,
}

impl BoundResult {
    /// `-log_bound / n`, the divergence `KL(z || mu)`.
    pub fn exponent_rate(&self) -> f64 {
        -self.log_bound / self.n as f64
    }
}

/// `z ln(mu / z)` with the `0 ln(mu / 0) = 0` convention; `-inf` when only
/// `mu` vanishes.
#[inline]
fn exponent_term(z: f64, mu: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else if mu == 0.0 {
        f64::NEG_INFINITY
    } else {
        z * (mu / z).ln()
    }
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `KL(z || mu) = sum_l z_l ln(z_l / mu_l)` over completed vectors, in nats.
///
/// Coordinates with `z_l = 0` contribute nothing. If `z_l > 0` while
/// `mu_l = 0` the result is `f64::INFINITY`.
pub fn kl_divergence(z: &CompletedPoint, mu: &CompletedPoint) -> Result<f64> {
    check_dims(mu.coords().len(), z.coords().len())?;
    let mut total = 0.0;
    for (&zl, &ml) in z.coords().iter().zip(mu.coords()) {
        if zl == 0.0 {
            continue;
        }
        if ml == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += zl * (zl / ml).ln();
    }
    // Rounding can leave a negative residue of order 1e-17 when z == mu.
    Ok(total.max(0.0))
}

fn check_order(mu: &[f64], z: &[f64], direction: TailDirection, slack: f64) -> Result<()> {
    for (i, (&zl, &ml)) in z.iter().zip(mu).enumerate() {
        if !direction.admits(zl, ml, slack) {
            return Err(Error::PreconditionOrderViolated {
                coordinate: i + 1,
                direction,
                z: zl,
                mu: ml,
            });
        }
    }
    Ok(())
}

/// Assembles a [`BoundResult`] from completed vectors whose order
/// precondition has already been checked.
pub(crate) fn bound_from_completed(
    mu: CompletedPoint,
    z: CompletedPoint,
    n: u64,
    direction: TailDirection,
) -> BoundResult {
    let terms: Vec<f64> = z
        .coords()
        .iter()
        .zip(mu.coords())
        .map(|(&zl, &ml)| exponent_term(zl, ml))
        .collect();
    let divergence_infinite = terms.iter().any(|t| t.is_infinite());
    let log_bound = if divergence_infinite {
        f64::NEG_INFINITY
    } else {
        n as f64 * terms.iter().sum::<f64>()
    };
    BoundResult {
        log_bound,
        bound: log_bound.exp().clamp(0.0, 1.0),
        per_coordinate_exponent: terms,
        n,
        direction,
        divergence_infinite,
        mu,
        z,
    }
}

/// The simplex bound on `Pr{mean <= z}` or `Pr{mean >= z}` for `n` samples
/// with mean vector `mu`, under the strict order precondition.
pub fn theorem1_bound(
    mu: &SimplexPoint,
    z: &SimplexPoint,
    n: u64,
    direction: TailDirection,
) -> Result<BoundResult> {
    theorem1_bound_with_slack(mu, z, n, direction, ORDER_TOLERANCE)
}

/// [`theorem1_bound`] with `slack` tolerated on each order comparison.
pub fn theorem1_bound_with_slack(
    mu: &SimplexPoint,
    z: &SimplexPoint,
    n: u64,
    direction: TailDirection,
    slack: f64,
) -> Result<BoundResult> {
    check_dims(mu.dim(), z.dim())?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample count n must be positive".into(),
        ));
    }
    if slack.is_nan() || slack < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "order slack must be >= 0, got {slack}"
        )));
    }
    check_order(mu.coords(), z.coords(), direction, slack)?;
    Ok(bound_from_completed(
        complete(mu),
        complete(z),
        n,
        direction,
    ))
}

/// Per-sample Chernoff exponent `M(t)`.
///
/// The log of `mu_0 + sum_l mu_l e^(t_l)` is taken with a max shift, so large
/// `t` does not overflow.
pub fn exponent_m(t: &ExponentArgument, mu: &SimplexPoint, z: &SimplexPoint) -> Result<f64> {
    check_dims(mu.dim(), z.dim())?;
    check_dims(mu.dim(), t.dim())?;
    let mu = complete(mu);
    let linear: f64 = t.values().iter().zip(z.coords()).map(|(t, z)| t * z).sum();

    // log-weights ln(mu_l) + t_l with t_0 = 0
    let logits = std::iter::once((mu.completion(), 0.0))
        .chain(mu.tail().iter().copied().zip(t.values().iter().copied()))
        .filter(|&(m, _)| m > 0.0)
        .map(|(m, t)| m.ln() + t);
    let shift = logits.clone().fold(f64::NEG_INFINITY, f64::max);
    let lse = shift + logits.map(|v| (v - shift).exp()).sum::<f64>().ln();
    Ok(lse - linear)
}

/// Stationary point of [`exponent_m`]: `t_l = ln(z_l mu_0) - ln(z_0 mu_l)`.
pub fn optimal_t(mu: &SimplexPoint, z: &SimplexPoint) -> Result<ExponentArgument> {
    check_dims(mu.dim(), z.dim())?;
    let mu = complete(mu);
    let z = complete(z);
    for (i, (&zl, &ml)) in z.coords().iter().zip(mu.coords()).enumerate() {
        if zl <= 0.0 || ml <= 0.0 {
            return Err(Error::RequiresStrictInterior { coordinate: i });
        }
    }
    let base = z.completion().ln() - mu.completion().ln();
    let t = z
        .tail()
        .iter()
        .zip(mu.tail())
        .map(|(&zl, &ml)| (zl / ml).ln() - base)
        .collect();
    Ok(ExponentArgument { t })
}

/// `e^d - 1 - d`, nonnegative for every `d`.
fn exp_excess(d: f64) -> f64 {
    if d.abs() < 0.5 {
        // Taylor tail from the quadratic term; expm1(d) - d cancels here
        let mut term = d * d / 2.0;
        let mut sum = term;
        let mut j = 2.0;
        while term.abs() > sum.abs() * 1e-18 {
            j += 1.0;
            term *= d / j;
            sum += term;
        }
        sum
    } else {
        d.exp_m1() - d
    }
}

/// Gap of the exponential-mixture inequality
///
/// ```text
/// (1 - sum_l x_l + sum_l x_l e^(t_l)) - prod_l e^(t_l x_l)  >= 0
/// ```
///
/// Writing `x_0 = 1 - sum_l x_l`, `t_0 = 0` and `m = sum_l t_l x_l`, the gap
/// equals `e^m * sum_{l=0..k} x_l (e^(t_l - m) - 1 - (t_l - m))`, which is how
/// it is evaluated: every summand is a nonnegative product.
pub fn lemma1_gap(x: &SimplexPoint, t: &ExponentArgument) -> Result<f64> {
    check_dims(x.dim(), t.dim())?;
    let x = complete(x);
    let tv = t.values();
    let m: f64 = x.tail().iter().zip(tv).map(|(x, t)| x * t).sum();
    let excess: f64 = x.completion() * exp_excess(-m)
        + x.tail()
            .iter()
            .zip(tv)
            .map(|(&xl, &tl)| {
                if xl == 0.0 {
                    0.0
                } else {
                    xl * exp_excess(tl - m)
                }
            })
            .sum::<f64>();
    Ok(m.exp() * excess)
}
