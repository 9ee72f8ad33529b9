//! Exact multinomial tail probabilities by enumerating the composition
//! lattice.
//!
//! Events constrain cells `1..=k`; cell 0 absorbs whatever count remains.
//! Compositions are visited in reverse-lexicographic order. Lower-tail
//! branches stop at the threshold; upper-tail branches are cut as soon as the
//! remaining count cannot cover the thresholds of the cells still to come.

use crate::distributions::{CountVector, MultinomialSpec};
use crate::error::{Error, Result};
use crate::simplex::{complete, SimplexPoint, TailDirection};

use super::CompensatedSum;

/// Largest lattice an exact call may enumerate unless overridden.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 20_000_000;

/// Environment variable that overrides [`DEFAULT_ENUMERATION_BUDGET`].
pub const BUDGET_ENV_VAR: &str = "SIMPLEX_BOUNDS_ENUM_BUDGET";

/// The budget from [`BUDGET_ENV_VAR`] if set and parseable, else the default.
pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

/// `C(n + k, k)`, the number of compositions of `n` into `k + 1` parts,
/// saturating at `u128::MAX`.
pub fn lattice_size(n: u64, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // C(n + i, i) = C(n + i - 1, i - 1) * (n + i) / i, exact at every step
        acc = match acc.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

struct Enumeration<'a> {
    spec: &'a MultinomialSpec,
    thresholds: &'a [u64],
    // suffix_need[i] = sum of thresholds of cells i.. (upper tail only)
    suffix_need: Vec<u64>,
    direction: TailDirection,
    sum: CompensatedSum,
}

impl Enumeration<'_> {
    // `cell` indexes thresholds (cell i + 1 of the spec)
    fn visit(&mut self, cell: usize, remaining: u64, partial: f64) {
        if cell == self.thresholds.len() {
            let log_term = partial - self.spec.ln_factorial(remaining)
                + remaining as f64 * self.spec.ln_p()[0];
            self.sum.add(log_term.exp());
            return;
        }
        let ln_p = self.spec.ln_p()[cell + 1];
        let (lo, hi) = match self.direction {
            TailDirection::Lower => (0, self.thresholds[cell].min(remaining)),
            TailDirection::Upper => {
                let need_after = self.suffix_need[cell + 1];
                if remaining < self.suffix_need[cell] {
                    return;
                }
                (self.thresholds[cell], remaining - need_after)
            }
        };
        for x in (lo..=hi).rev() {
            let contribution = x as f64 * ln_p - self.spec.ln_factorial(x);
            self.visit(cell + 1, remaining - x, partial + contribution);
        }
    }
}

fn check_budget(n: u64, k: usize, budget: u64) -> Result<()> {
    let required = lattice_size(n, k);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            allowed: budget,
        });
    }
    Ok(())
}

/// `Pr{X_i <= t_i for all i}` (lower) or `Pr{X_i >= t_i for all i}` (upper)
/// over cells `i = 1..=k`, for arbitrary thresholds `t` (length `k`).
pub fn multinomial_tail_with_thresholds(
    spec: &MultinomialSpec,
    thresholds: &[u64],
    direction: TailDirection,
    budget: u64,
) -> Result<f64> {
    if thresholds.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            actual: thresholds.len(),
        });
    }
    check_budget(spec.n(), spec.k(), budget)?;
    let mut suffix_need = vec![0u64; thresholds.len() + 1];
    for i in (0..thresholds.len()).rev() {
        suffix_need[i] = suffix_need[i + 1].saturating_add(thresholds[i]);
    }
    let mut e = Enumeration {
        spec,
        thresholds,
        suffix_need,
        direction,
        sum: CompensatedSum::default(),
    };
    e.visit(0, spec.n(), spec.ln_factorial(spec.n()));
    Ok(e.sum.value())
}

/// Exact `Pr{X <= z}` or `Pr{X >= z}` on cells `1..=k`; `z[0]` is ignored.
pub fn multinomial_exact_tail(
    spec: &MultinomialSpec,
    z: &CountVector,
    direction: TailDirection,
) -> Result<f64> {
    multinomial_exact_tail_with_budget(spec, z, direction, default_budget())
}

pub fn multinomial_exact_tail_with_budget(
    spec: &MultinomialSpec,
    z: &CountVector,
    direction: TailDirection,
    budget: u64,
) -> Result<f64> {
    if z.total() != spec.n() {
        return Err(Error::CountMismatch {
            expected: spec.n(),
            actual: z.total(),
        });
    }
    multinomial_tail_with_thresholds(spec, &z.counts()[1..], direction, budget)
}

/// Total probability mass over the whole lattice; one up to rounding.
pub fn multinomial_total_mass(spec: &MultinomialSpec, budget: u64) -> Result<f64> {
    let all = vec![spec.n(); spec.k()];
    multinomial_tail_with_thresholds(spec, &all, TailDirection::Lower, budget)
}

/// Count thresholds equivalent to `mean_l <= z_l` (lower) or `mean_l >= z_l`
/// (upper) for a mean of `n` one-hot vectors, using the same floating-point
/// comparison `c / n` as the Monte Carlo event test.
pub fn count_thresholds(z: &SimplexPoint, n: u64, direction: TailDirection) -> Vec<u64> {
    let nf = n as f64;
    z.coords()
        .iter()
        .map(|&zl| {
            let guess = (zl * nf).floor().clamp(0.0, nf) as u64;
            match direction {
                TailDirection::Lower => {
                    // largest c with c / n <= z
                    let mut c = guess;
                    while c < n && ((c + 1) as f64 / nf) <= zl {
                        c += 1;
                    }
                    while c > 0 && (c as f64 / nf) > zl {
                        c -= 1;
                    }
                    c
                }
                TailDirection::Upper => {
                    // smallest c with c / n >= z
                    let mut c = guess;
                    while c > 0 && ((c - 1) as f64 / nf) >= zl {
                        c -= 1;
                    }
                    while c <= n && (c as f64 / nf) < zl {
                        c += 1;
                    }
                    c
                }
            }
        })
        .collect()
}

/// Exact tail of the mean of `n` vertex-valued vectors with mean `mu`: each
/// sample is the unit vector `e_l` with probability `mu_l`, or zero with
/// probability `mu_0`. This is the extremal simplex law for a given mean, and
/// its sample mean is a scaled multinomial count.
pub fn vertex_exact_tail(
    mu: &SimplexPoint,
    z: &SimplexPoint,
    n: u64,
    direction: TailDirection,
    budget: u64,
) -> Result<f64> {
    if mu.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            actual: z.dim(),
        });
    }
    let spec = MultinomialSpec::new(n, complete(mu))?;
    let thresholds = count_thresholds(z, n, direction);
    multinomial_tail_with_thresholds(&spec, &thresholds, direction, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::multinomial_log_pmf;

    fn spec(n: u64, p: &[f64]) -> MultinomialSpec {
        MultinomialSpec::from_probabilities(n, p.to_vec()).unwrap()
    }

    fn counts(c: &[u64]) -> CountVector {
        CountVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice_size(3, 2), 10);
        assert_eq!(lattice_size(20, 3), 1771);
        assert_eq!(lattice_size(0, 5), 1);
        assert_eq!(lattice_size(u64::MAX, 40), u128::MAX);
    }

    #[test]
    fn single_trial_misses_cell_one() {
        let s = spec(1, &[0.35, 0.65]);
        let p = multinomial_exact_tail(&s, &counts(&[1, 0]), TailDirection::Lower).unwrap();
        assert!((p - 0.35).abs() < 1e-15);
    }

    #[test]
    fn two_heads() {
        let s = spec(2, &[0.5, 0.5]);
        let p = multinomial_exact_tail(&s, &counts(&[0, 2]), TailDirection::Upper).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn matches_brute_force_small_case() {
        // 0.2^3 + 3 * 0.2^2 * 0.5 = 0.068 over {x_1 = 0, x_2 <= 1}
        let s = spec(3, &[0.2, 0.3, 0.5]);
        let p = multinomial_exact_tail(&s, &counts(&[2, 0, 1]), TailDirection::Lower).unwrap();
        assert!((p - 0.068).abs() < 1e-15);

        // brute force over every composition through the pmf itself
        let mut brute = 0.0;
        for x1 in 0..=3u64 {
            for x2 in 0..=3 - x1 {
                if x1 == 0 && x2 <= 1 {
                    let x = counts(&[3 - x1 - x2, x1, x2]);
                    brute += multinomial_log_pmf(&s, &x).unwrap().exp();
                }
            }
        }
        assert!((p - brute).abs() < 1e-15);
    }

    #[test]
    fn upper_pruning_matches_brute_force() {
        let s = spec(6, &[0.1, 0.2, 0.3, 0.4]);
        let t = [1u64, 2, 2];
        let p = multinomial_tail_with_thresholds(&s, &t, TailDirection::Upper, 1000).unwrap();
        let mut brute = 0.0;
        for x1 in 0..=6u64 {
            for x2 in 0..=6 - x1 {
                for x3 in 0..=6 - x1 - x2 {
                    if x1 >= 1 && x2 >= 2 && x3 >= 2 {
                        let x = counts(&[6 - x1 - x2 - x3, x1, x2, x3]);
                        brute += multinomial_log_pmf(&s, &x).unwrap().exp();
                    }
                }
            }
        }
        assert!((p - brute).abs() < 1e-14, "{p} vs {brute}");
    }

    #[test]
    fn unreachable_upper_event_is_empty() {
        let s = spec(4, &[0.5, 0.25, 0.25]);
        let p = multinomial_tail_with_thresholds(&s, &[3, 2], TailDirection::Upper, 100).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn full_lattice_has_unit_mass() {
        let s = spec(12, &[0.1, 0.2, 0.3, 0.4]);
        let m = multinomial_total_mass(&s, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let s = spec(100, &[0.25, 0.25, 0.25, 0.25]);
        let r = multinomial_exact_tail_with_budget(
            &s,
            &counts(&[25, 25, 25, 25]),
            TailDirection::Lower,
            1000,
        );
        assert_eq!(
            r,
            Err(Error::BudgetExceeded {
                required: 176_851,
                allowed: 1000
            })
        );
    }

    #[test]
    fn thresholds_follow_float_comparison() {
        let z = SimplexPoint::new(vec![0.3, 0.1]).unwrap();
        assert_eq!(count_thresholds(&z, 10, TailDirection::Lower), vec![3, 1]);
        assert_eq!(count_thresholds(&z, 10, TailDirection::Upper), vec![3, 1]);
        let z = SimplexPoint::new(vec![0.25, 0.0]).unwrap();
        assert_eq!(count_thresholds(&z, 10, TailDirection::Lower), vec![2, 0]);
        assert_eq!(count_thresholds(&z, 10, TailDirection::Upper), vec![3, 0]);
    }

    #[test]
    fn vertex_tail_equals_binomial_cdf() {
        let mu = SimplexPoint::new(vec![0.4]).unwrap();
        let z = SimplexPoint::new(vec![0.2]).unwrap();
        let p = vertex_exact_tail(&mu, &z, 5, TailDirection::Lower, 100).unwrap();
        let direct = 0.6f64.powi(5) + 5.0 * 0.4 * 0.6f64.powi(4);
        assert!((p - direct).abs() < 1e-15);
    }
}
