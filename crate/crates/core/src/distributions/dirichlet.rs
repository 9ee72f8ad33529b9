use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::bounds::{theorem1_bound, BoundResult};
use crate::error::{Error, Result};
use crate::simplex::{complete, CompletedPoint, SimplexPoint, TailDirection};
use crate::stream::RandomStream;

#[derive(Debug, Clone)]
pub struct DirichletSpec {
    alpha: Vec<f64>,
    // shape alpha_i when alpha_i >= 1, else alpha_i + 1 (boosted below)
    gammas: Vec<Gamma<f64>>,
    boosted: bool,
}

impl DirichletSpec {
    /// Concentration parameters `alpha_0..alpha_k`, all positive.
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidSpec(
                "a Dirichlet law needs at least two concentration parameters".into(),
            ));
        }
        if let Some(i) = alpha.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidSpec(format!(
                "concentration alpha_{i} must be positive and finite"
            )));
        }
        let boosted = alpha.iter().any(|&a| a < 1.0);
        let gammas = alpha
            .iter()
            .map(|&a| {
                let shape = if boosted && a < 1.0 { a + 1.0 } else { a };
                Gamma::new(shape, 1.0).map_err(|e| Error::InvalidSpec(e.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(DirichletSpec {
            alpha,
            gammas,
            boosted,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn k(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Means `alpha_i / sum(alpha)`, completion coordinate first.
    pub fn mean(&self) -> CompletedPoint {
        let total: f64 = self.alpha.iter().sum();
        CompletedPoint::new(self.alpha.iter().map(|a| a / total).collect())
            .expect("normalized positive weights form a completed point")
    }

    /// `ln f(x) = sum_i (alpha_i - 1) ln x_i - ln B(alpha)`.
    pub fn log_density(&self, x: &CompletedPoint) -> Result<f64> {
        if x.coords().len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                actual: x.coords().len(),
            });
        }
        let total: f64 = self.alpha.iter().sum();
        let ln_beta = self.alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>() - ln_gamma(total);
        let mut acc = -ln_beta;
        for (&xi, &a) in x.coords().iter().zip(&self.alpha) {
            if a != 1.0 {
                acc += (a - 1.0) * xi.ln();
            }
        }
        Ok(acc)
    }

    /// Draws into `out` (length `k + 1`).
    pub(crate) fn sample_into(&self, stream: &mut RandomStream, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.alpha.len());
        if !self.boosted {
            let mut total = 0.0;
            for (o, g) in out.iter_mut().zip(&self.gammas) {
                *o = g.sample(stream);
                total += *o;
            }
            for o in out.iter_mut() {
                *o /= total;
            }
            return;
        }
        // Log domain: for alpha < 1, G(alpha) = G(alpha + 1) U^(1 / alpha), whose
        // linear value underflows for small alpha.
        let mut max = f64::NEG_INFINITY;
        for ((o, g), &a) in out.iter_mut().zip(&self.gammas).zip(&self.alpha) {
            let mut v = g.sample(stream).ln();
            if a < 1.0 {
                // 1 - U lies in (0, 1], keeping the log finite
                v += (1.0 - stream.uniform()).ln() / a;
            }
            *o = v;
            max = max.max(v);
        }
        let mut total = 0.0;
        for o in out.iter_mut() {
            *o = (*o - max).exp();
            total += *o;
        }
        for o in out.iter_mut() {
            *o /= total;
        }
    }
}

/// Normalized independent gamma draws with shapes `alpha_i`.
pub fn sample_dirichlet(spec: &DirichletSpec, stream: &mut RandomStream) -> CompletedPoint {
    let mut out = vec![0.0; spec.alpha.len()];
    spec.sample_into(stream, &mut out);
    CompletedPoint::new(out).expect("normalized gamma draws form a completed point")
}

/// Bound on the tail of the mean of `n` independent Dirichlet vectors.
///
/// `z` and its completion must be strictly positive.
pub fn dirichlet_bound(
    spec: &DirichletSpec,
    z: &SimplexPoint,
    n: u64,
    direction: TailDirection,
) -> Result<BoundResult> {
    if z.dim() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            actual: z.dim(),
        });
    }
    if let Some(i) = complete(z).coords().iter().position(|&v| v <= 0.0) {
        return Err(Error::RequiresStrictInterior { coordinate: i });
    }
    theorem1_bound(&spec.mean().to_simplex(), z, n, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sp(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mean_is_normalized_alpha() {
        let d = DirichletSpec::new(vec![1.0, 2.0, 5.0]).unwrap();
        let m = d.mean();
        assert_relative_eq!(m.coords()[2], 0.625, max_relative = 1e-15);
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert!(DirichletSpec::new(vec![1.0]).is_err());
        assert!(DirichletSpec::new(vec![1.0, 0.0]).is_err());
        assert!(DirichletSpec::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn bound_at_mean_is_one() {
        let d = DirichletSpec::new(vec![2.0, 3.0, 5.0]).unwrap();
        let z = d.mean().to_simplex();
        assert_eq!(
            dirichlet_bound(&d, &z, 7, TailDirection::Lower)
                .unwrap()
                .bound,
            1.0
        );
    }

    #[test]
    fn uniform_bound_example() {
        let d = DirichletSpec::new(vec![1.0, 1.0]).unwrap();
        let b = dirichlet_bound(&d, &sp(&[0.25]), 2, TailDirection::Lower).unwrap();
        assert_relative_eq!(b.bound, 0.769_800_358_919_501_02, max_relative = 1e-13);
        assert_eq!(b.mu.coords(), &[0.5, 0.5]);
    }

    #[test]
    fn bound_precondition_and_interior() {
        let d = DirichletSpec::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            dirichlet_bound(&d, &sp(&[0.75]), 2, TailDirection::Lower),
            Err(Error::PreconditionOrderViolated { .. })
        ));
        assert!(matches!(
            dirichlet_bound(&d, &sp(&[0.0]), 2, TailDirection::Lower),
            Err(Error::RequiresStrictInterior { coordinate: 1 })
        ));
        assert!(matches!(
            dirichlet_bound(&d, &sp(&[1.0]), 2, TailDirection::Upper),
            Err(Error::RequiresStrictInterior { coordinate: 0 })
        ));
    }

    #[test]
    fn log_density_values() {
        let flat = DirichletSpec::new(vec![1.0, 1.0, 1.0]).unwrap();
        let x = CompletedPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        // uniform on the 2-simplex has density 2! = 2
        assert_relative_eq!(
            flat.log_density(&x).unwrap(),
            2f64.ln(),
            max_relative = 1e-14
        );
        let beta22 = DirichletSpec::new(vec![2.0, 2.0]).unwrap();
        let half = CompletedPoint::new(vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(
            beta22.log_density(&half).unwrap(),
            1.5f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn samples_are_deterministic_and_normalized() {
        for alpha in [
            vec![1.0, 1.0],
            vec![0.3, 2.0, 0.05],
            vec![4.0, 1.5, 2.5, 9.0],
        ] {
            let d = DirichletSpec::new(alpha).unwrap();
            let mut a = RandomStream::new(8);
            let mut b = RandomStream::new(8);
            for _ in 0..200 {
                let x = sample_dirichlet(&d, &mut a);
                let y = sample_dirichlet(&d, &mut b);
                assert_eq!(x, y);
                let s: f64 = x.coords().iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(x.coords().iter().all(|v| *v >= 0.0));
            }
        }
    }

    #[test]
    fn tiny_alpha_does_not_produce_nan() {
        let d = DirichletSpec::new(vec![1e-3, 1e-3, 1e-3]).unwrap();
        let mut s = RandomStream::new(2);
        for _ in 0..1000 {
            let x = sample_dirichlet(&d, &mut s);
            assert!(x.coords().iter().all(|v| v.is_finite()));
        }
    }
}
