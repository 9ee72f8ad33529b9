use serde::Serialize;

use super::log_factorial::LogFactorials;
use crate::bounds::BoundResult;
use crate::error::{Error, Result};
use crate::simplex::{CompletedPoint, TailDirection};
use crate::stream::RandomStream;

/// `k + 1` nonnegative cell counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidArgument(
                "a count vector needs at least two cells".into(),
            ));
        }
        Ok(CountVector { counts })
    }

    /// Builds a count vector and checks that it sums to `n`.
    pub fn with_total(counts: Vec<u64>, n: u64) -> Result<Self> {
        let v = CountVector::new(counts)?;
        v.expect_total(n)?;
        Ok(v)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.counts.len() - 1
    }

    fn expect_total(&self, n: u64) -> Result<()> {
        let actual = self.total();
        if actual != n {
            return Err(Error::CountMismatch {
                expected: n,
                actual,
            });
        }
        Ok(())
    }
}

/// Multinomial law with `n` trials over `k + 1` cells, cell 0 first.
#[derive(Debug, Clone)]
pub struct MultinomialSpec {
    n: u64,
    p: CompletedPoint,
    ln_p: Vec<f64>,
    cumulative: Vec<f64>,
    ln_fact: LogFactorials,
}

impl MultinomialSpec {
    /// Every cell probability must be strictly positive.
    pub fn new(n: u64, p: CompletedPoint) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("trial count n must be positive".into()));
        }
        if let Some(i) = p.coords().iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "cell probability p_{i} must be positive"
            )));
        }
        let ln_p = p.coords().iter().map(|v| v.ln()).collect();
        let cumulative = p
            .coords()
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Ok(MultinomialSpec {
            n,
            p,
            ln_p,
            cumulative,
            ln_fact: LogFactorials::new(n),
        })
    }

    pub fn from_probabilities(n: u64, p: Vec<f64>) -> Result<Self> {
        MultinomialSpec::new(n, CompletedPoint::new(p)?)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &CompletedPoint {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.p.k()
    }

    /// Means `n p_i` for every cell.
    pub fn means(&self) -> Vec<f64> {
        self.p.coords().iter().map(|&v| self.n as f64 * v).collect()
    }

    pub(crate) fn ln_p(&self) -> &[f64] {
        &self.ln_p
    }

    pub(crate) fn ln_factorial(&self, x: u64) -> f64 {
        self.ln_fact.get(x)
    }

    /// Index of the cell hit by a single trial drawn from `stream`.
    #[inline]
    pub fn sample_cell(&self, stream: &mut RandomStream) -> usize {
        let u = stream.uniform();
        match self.cumulative.iter().position(|&c| u < c) {
            Some(i) => i,
            // u landed in the rounding gap above the last partial sum
            None => self.cumulative.len() - 1,
        }
    }
}

/// `ln n! - sum ln x_i! + sum x_i ln p_i`.
pub fn multinomial_log_pmf(spec: &MultinomialSpec, x: &CountVector) -> Result<f64> {
    if x.counts().len() != spec.k() + 1 {
        return Err(Error::DimensionMismatch {
            expected: spec.k() + 1,
            actual: x.counts().len(),
        });
    }
    x.expect_total(spec.n)?;
    let mut acc = spec.ln_factorial(spec.n);
    for (&xi, &lp) in x.counts().iter().zip(spec.ln_p()) {
        acc -= spec.ln_factorial(xi);
        if xi > 0 {
            acc += xi as f64 * lp;
        }
    }
    Ok(acc)
}

/// Count-form bound `prod_i (n p_i / z_i)^(z_i)` on `Pr{X <= z}` or
/// `Pr{X >= z}`, where the order is checked on cells `1..=k`.
///
/// Cells with `z_i = 0` contribute a factor of one.
pub fn multinomial_bound(
    spec: &MultinomialSpec,
    z: &CountVector,
    direction: TailDirection,
) -> Result<BoundResult> {
    if z.counts().len() != spec.k() + 1 {
        return Err(Error::DimensionMismatch {
            expected: spec.k() + 1,
            actual: z.counts().len(),
        });
    }
    z.expect_total(spec.n)?;
    let n = spec.n as f64;
    let means = spec.means();
    for (i, (&count, &mean)) in z.counts().iter().zip(&means).enumerate().skip(1) {
        let zi = count as f64;
        if !direction.admits(zi, mean, 0.0) {
            return Err(Error::PreconditionOrderViolated {
                coordinate: i,
                direction,
                z: zi,
                mu: mean,
            });
        }
    }

    let mut log_bound = 0.0;
    let mut terms = Vec::with_capacity(spec.k() + 1);
    for (&zi, &mi) in z.counts().iter().zip(&means) {
        let term = if zi == 0 {
            0.0
        } else {
            let zi = zi as f64;
            zi * (mi / zi).ln()
        };
        log_bound += term;
        terms.push(term / n);
    }
    let z_point = CompletedPoint::new(z.counts().iter().map(|&c| c as f64 / n).collect())?;
    Ok(BoundResult {
        log_bound,
        bound: log_bound.exp().clamp(0.0, 1.0),
        per_coordinate_exponent: terms,
        n: spec.n,
        direction,
        divergence_infinite: false,
        mu: spec.p.clone(),
        z: z_point,
    })
}

/// Sum of `n` independent single-trial draws.
pub fn sample_multinomial(spec: &MultinomialSpec, stream: &mut RandomStream) -> CountVector {
    let mut counts = vec![0u64; spec.k() + 1];
    for _ in 0..spec.n {
        counts[spec.sample_cell(stream)] += 1;
    }
    CountVector { counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(n: u64, p: &[f64]) -> MultinomialSpec {
        MultinomialSpec::from_probabilities(n, p.to_vec()).unwrap()
    }

    fn counts(c: &[u64]) -> CountVector {
        CountVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn log_pmf_examples() {
        let lp = multinomial_log_pmf(&spec(1, &[0.4, 0.6]), &counts(&[1, 0])).unwrap();
        assert_relative_eq!(lp, 0.4f64.ln(), max_relative = 1e-15);
        let lp = multinomial_log_pmf(&spec(2, &[0.5, 0.5]), &counts(&[1, 1])).unwrap();
        assert_relative_eq!(lp, 0.5f64.ln(), max_relative = 1e-15);
        let lp = multinomial_log_pmf(&spec(3, &[0.5, 0.3, 0.2]), &counts(&[1, 1, 1])).unwrap();
        assert_relative_eq!(lp, -1.714_798_428_091_926_7, max_relative = 1e-14);
    }

    #[test]
    fn log_pmf_count_mismatch() {
        let r = multinomial_log_pmf(&spec(3, &[0.5, 0.5]), &counts(&[1, 1]));
        assert_eq!(
            r,
            Err(Error::CountMismatch {
                expected: 3,
                actual: 2
            })
        );
    }

    #[test]
    fn zero_probability_cell_rejected() {
        assert!(MultinomialSpec::from_probabilities(3, vec![1.0, 0.0]).is_err());
        assert!(MultinomialSpec::from_probabilities(0, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn bound_at_integral_mean_is_one() {
        let b = multinomial_bound(
            &spec(10, &[0.5, 0.5]),
            &counts(&[5, 5]),
            TailDirection::Lower,
        )
        .unwrap();
        assert_eq!(b.bound, 1.0);
        let b = multinomial_bound(
            &spec(12, &[0.25, 0.25, 0.5]),
            &counts(&[3, 3, 6]),
            TailDirection::Upper,
        )
        .unwrap();
        assert_eq!(b.bound, 1.0);
    }

    #[test]
    fn bound_matches_scalar_example() {
        let b = multinomial_bound(
            &spec(10, &[0.5, 0.5]),
            &counts(&[7, 3]),
            TailDirection::Lower,
        )
        .unwrap();
        assert_relative_eq!(b.bound, 0.439_187_528_538_054_25, max_relative = 1e-13);
        let sum: f64 = b.per_coordinate_exponent.iter().sum();
        assert_relative_eq!(b.log_bound, 10.0 * sum, max_relative = 1e-14);
    }

    #[test]
    fn bound_order_violation() {
        let r = multinomial_bound(
            &spec(10, &[0.5, 0.5]),
            &counts(&[3, 7]),
            TailDirection::Lower,
        );
        assert!(matches!(
            r,
            Err(Error::PreconditionOrderViolated { coordinate: 1, .. })
        ));
    }

    #[test]
    fn zero_count_factor_is_one() {
        // Pr{X_1 >= 4} with n = 4: only the z_1 = 4 cell contributes, giving p_1^4
        let b = multinomial_bound(
            &spec(4, &[0.6, 0.4]),
            &counts(&[0, 4]),
            TailDirection::Upper,
        )
        .unwrap();
        assert_relative_eq!(b.bound, 0.4f64.powi(4), max_relative = 1e-14);
    }

    #[test]
    fn sampler_is_deterministic() {
        let s = spec(50, &[0.2, 0.3, 0.5]);
        let a = sample_multinomial(&s, &mut RandomStream::new(11));
        let b = sample_multinomial(&s, &mut RandomStream::new(11));
        assert_eq!(a, b);
        assert_eq!(a.total(), 50);
    }

    #[test]
    fn near_degenerate_cell_never_drawn() {
        let eps = 1e-20;
        let s = spec(5, &[1.0 - 2.0 * eps, eps, eps]);
        let mut stream = RandomStream::new(3);
        for _ in 0..1000 {
            assert_eq!(sample_multinomial(&s, &mut stream).counts(), &[5, 0, 0]);
        }
    }
}
