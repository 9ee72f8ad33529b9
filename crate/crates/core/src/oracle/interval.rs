use statrs::function::beta::inv_beta_reg;

use crate::error::{Error, Result};

/// Two-sided Clopper-Pearson interval for `hits` successes in `trials`.
///
/// The limits are beta quantiles: `Beta(h, t - h + 1)` at `(1 - c) / 2` and
/// `Beta(h + 1, t - h)` at `(1 + c) / 2`.
pub fn clopper_pearson(hits: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || hits > trials {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= hits <= trials and trials > 0, got {hits}/{trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let tail = (1.0 - confidence) / 2.0;
    let (h, t) = (hits as f64, trials as f64);
    let low = if hits == 0 {
        0.0
    } else {
        inv_beta_reg(h, t - h + 1.0, tail)
    };
    let high = if hits == trials {
        1.0
    } else {
        inv_beta_reg(h + 1.0, t - h, 1.0 - tail)
    };
    Ok((low.clamp(0.0, 1.0), high.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Pr{Bin(n, p) >= h}, summed term by term
    fn upper_tail(h: u64, n: u64, p: f64) -> f64 {
        let mut total = 0.0;
        for j in h..=n {
            let ln_c: f64 = (1..=n).map(|i| (i as f64).ln()).sum::<f64>()
                - (1..=j).map(|i| (i as f64).ln()).sum::<f64>()
                - (1..=n - j).map(|i| (i as f64).ln()).sum::<f64>();
            total += (ln_c + j as f64 * p.ln() + (n - j) as f64 * (1.0 - p).ln()).exp();
        }
        total
    }

    #[test]
    fn extreme_counts_have_closed_forms() {
        let (lo, hi) = clopper_pearson(0, 10, 0.99).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.005f64.powf(0.1))).abs() < 1e-10);
        let (lo, hi) = clopper_pearson(10, 10, 0.99).unwrap();
        assert_eq!(hi, 1.0);
        assert!((lo - 0.005f64.powf(0.1)).abs() < 1e-10);
    }

    #[test]
    fn limits_solve_the_binomial_tail_equations() {
        for (h, n) in [(3u64, 20u64), (17, 40), (1, 500), (250, 500)] {
            let (lo, hi) = clopper_pearson(h, n, 0.99).unwrap();
            let frac = h as f64 / n as f64;
            assert!(lo < frac && frac < hi);
            // Pr{Bin(n, lo) >= h} = 0.005 and Pr{Bin(n, hi) <= h} = 0.005
            assert!((upper_tail(h, n, lo) - 0.005).abs() < 1e-8);
            assert!((1.0 - upper_tail(h + 1, n, hi) - 0.005).abs() < 1e-8);
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(clopper_pearson(3, 2, 0.99).is_err());
        assert!(clopper_pearson(0, 0, 0.99).is_err());
        assert!(clopper_pearson(1, 2, 1.0).is_err());
    }
}
