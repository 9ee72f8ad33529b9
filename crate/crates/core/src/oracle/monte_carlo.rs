//! Seeded Monte Carlo estimates of sample-mean tail probabilities.
//!
//! Trial `i` draws everything from `RandomStream::new(seed).substream(i)`, so
//! the hit count, and with it the whole estimate, does not depend on how the
//! trials are split across workers.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DirichletSpec, MultinomialSpec};
use crate::error::{Error, Result};
use crate::simplex::{complete, CompletedPoint, SimplexPoint, TailDirection};
use crate::stream::RandomStream;

use super::interval::clopper_pearson;

/// Confidence level of the reported interval unless configured otherwise.
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// Smallest trial count accepted by [`mc_mean_tail`].
pub const MIN_TRIALS: u64 = 100;

// Trials handed to a worker at a time.
const TRIAL_CHUNK: u64 = 256;

/// A law on the simplex that can be sampled for the Monte Carlo oracle.
pub trait MeanModel: Send + Sync {
    /// Stable identifier, recorded alongside estimates.
    fn id(&self) -> String;

    /// Number of free coordinates `k`.
    fn dim(&self) -> usize;

    /// Writes one draw in completed form (`k + 1` coordinates, slack first).
    fn sample(&self, stream: &mut RandomStream, out: &mut [f64]);
}

/// Borrowed handle to a sampler model.
pub type SamplerHandle<'a> = &'a dyn MeanModel;

/// Deterministic draw at a fixed point.
#[derive(Debug, Clone)]
pub struct PointMass {
    point: CompletedPoint,
}

impl PointMass {
    pub fn new(point: &SimplexPoint) -> Self {
        PointMass {
            point: complete(point),
        }
    }
}

impl MeanModel for PointMass {
    fn id(&self) -> String {
        format!("point{:?}", self.point.tail())
    }

    fn dim(&self) -> usize {
        self.point.k()
    }

    fn sample(&self, _stream: &mut RandomStream, out: &mut [f64]) {
        out.copy_from_slice(self.point.coords());
    }
}

#[derive(Debug, Clone)]
pub struct DirichletModel {
    spec: DirichletSpec,
}

impl DirichletModel {
    pub fn new(spec: DirichletSpec) -> Self {
        DirichletModel { spec }
    }
}

impl MeanModel for DirichletModel {
    fn id(&self) -> String {
        format!("dirichlet{:?}", self.spec.alpha())
    }

    fn dim(&self) -> usize {
        self.spec.k()
    }

    fn sample(&self, stream: &mut RandomStream, out: &mut [f64]) {
        self.spec.sample_into(stream, out);
    }
}

/// One-hot draws: unit vector `e_l` with probability `p_l`, the zero vector
/// with probability `p_0`. The mean of `n` draws is a multinomial count over
/// `n`.
#[derive(Debug, Clone)]
pub struct CategoricalModel {
    spec: MultinomialSpec,
}

impl CategoricalModel {
    pub fn new(p: CompletedPoint) -> Result<Self> {
        Ok(CategoricalModel {
            spec: MultinomialSpec::new(1, p)?,
        })
    }
}

impl MeanModel for CategoricalModel {
    fn id(&self) -> String {
        format!("categorical{:?}", self.spec.p().coords())
    }

    fn dim(&self) -> usize {
        self.spec.k()
    }

    fn sample(&self, stream: &mut RandomStream, out: &mut [f64]) {
        out.fill(0.0);
        out[self.spec.sample_cell(stream)] = 1.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub confidence: f64,
}

impl McSettings {
    pub fn new(trials: u64, seed: u64) -> Self {
        McSettings {
            trials,
            seed,
            workers: 1,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub trials: u64,
    pub hits: u64,
    pub seed: u64,
    pub model: String,
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    model: SamplerHandle<'_>,
    root: &RandomStream,
    index: u64,
    n: u64,
    z: &[f64],
    direction: TailDirection,
    draw: &mut [f64],
    sum: &mut [f64],
) -> bool {
    let mut stream = root.substream(index);
    sum.fill(0.0);
    for _ in 0..n {
        model.sample(&mut stream, draw);
        for (s, d) in sum.iter_mut().zip(draw.iter()) {
            *s += d;
        }
    }
    let nf = n as f64;
    sum[1..]
        .iter()
        .zip(z)
        .all(|(&s, &zl)| direction.holds(s / nf, zl))
}

/// Estimates `Pr{mean <= z}` or `Pr{mean >= z}` for the mean of `n` draws of
/// `model`, with a Clopper-Pearson interval.
pub fn mc_mean_tail(
    model: SamplerHandle<'_>,
    n: u64,
    z: &SimplexPoint,
    direction: TailDirection,
    settings: &McSettings,
) -> Result<TailEstimate> {
    let k = model.dim();
    if k == 0 || k != z.dim() {
        return Err(Error::InvalidModel(format!(
            "model {} has dimension {k}, target has {}",
            model.id(),
            z.dim()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample count n must be positive".into(),
        ));
    }
    if settings.trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_TRIALS} trials required, got {}",
            settings.trials
        )));
    }
    if settings.workers == 0 {
        return Err(Error::InvalidArgument(
            "worker count must be positive".into(),
        ));
    }

    let root = RandomStream::new(settings.seed);
    let z = z.coords();
    let buffers = || (vec![0.0; k + 1], vec![0.0; k + 1]);
    let trial = |(draw, sum): &mut (Vec<f64>, Vec<f64>), i: u64| {
        run_trial(model, &root, i, n, z, direction, draw, sum) as u64
    };

    let hits: u64 = if settings.workers == 1 {
        let mut bufs = buffers();
        (0..settings.trials).map(|i| trial(&mut bufs, i)).sum()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(settings.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start workers: {e}")))?;
        let chunks = settings.trials.div_ceil(TRIAL_CHUNK);
        pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map_init(buffers, |bufs, c| {
                    let end = ((c + 1) * TRIAL_CHUNK).min(settings.trials);
                    (c * TRIAL_CHUNK..end).map(|i| trial(bufs, i)).sum::<u64>()
                })
                .sum()
        })
    };

    let (ci_low, ci_high) = clopper_pearson(hits, settings.trials, settings.confidence)?;
    let p_hat = hits as f64 / settings.trials as f64;
    Ok(TailEstimate {
        p_hat,
        ci_low: ci_low.min(p_hat),
        ci_high: ci_high.max(p_hat),
        confidence: settings.confidence,
        trials: settings.trials,
        hits,
        seed: settings.seed,
        model: model.id(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn point_mass_upper_at_itself_always_hits() {
        // dyadic coordinates keep the running sum exact
        let mu = sp(&[0.25, 0.5]);
        let est = mc_mean_tail(
            &PointMass::new(&mu),
            8,
            &mu,
            TailDirection::Upper,
            &McSettings::new(500, 1),
        )
        .unwrap();
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.ci_high, 1.0);
    }

    #[test]
    fn uniform_marginal_half() {
        let model = DirichletModel::new(DirichletSpec::new(vec![1.0, 1.0]).unwrap());
        let est = mc_mean_tail(
            &model,
            1,
            &sp(&[0.5]),
            TailDirection::Lower,
            &McSettings::new(20_000, 7),
        )
        .unwrap();
        assert!(est.ci_low <= 0.5 && 0.5 <= est.ci_high, "{est:?}");
        assert_eq!(est.p_hat, est.hits as f64 / 20_000.0);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let model = DirichletModel::new(DirichletSpec::new(vec![0.7, 1.2, 2.0]).unwrap());
        let z = sp(&[0.3, 0.5]);
        let base = McSettings::new(3_000, 99);
        let one = mc_mean_tail(&model, 4, &z, TailDirection::Lower, &base).unwrap();
        for w in [2, 4, 16] {
            let other =
                mc_mean_tail(&model, 4, &z, TailDirection::Lower, &base.with_workers(w)).unwrap();
            assert_eq!(one, other);
        }
    }

    #[test]
    fn dimension_and_argument_checks() {
        let model = DirichletModel::new(DirichletSpec::new(vec![1.0, 1.0]).unwrap());
        let s = McSettings::new(1000, 1);
        assert!(matches!(
            mc_mean_tail(&model, 2, &sp(&[0.1, 0.1]), TailDirection::Lower, &s),
            Err(Error::InvalidModel(_))
        ));
        assert!(mc_mean_tail(
            &model,
            2,
            &sp(&[0.1]),
            TailDirection::Lower,
            &McSettings::new(10, 1)
        )
        .is_err());
        assert!(mc_mean_tail(&model, 0, &sp(&[0.1]), TailDirection::Lower, &s).is_err());
    }

    #[test]
    fn categorical_model_is_one_hot() {
        let m = CategoricalModel::new(CompletedPoint::new(vec![0.2, 0.3, 0.5]).unwrap()).unwrap();
        let mut s = RandomStream::new(0);
        let mut out = [0.0; 3];
        for _ in 0..100 {
            m.sample(&mut s, &mut out);
            assert_eq!(out.iter().sum::<f64>(), 1.0);
            assert!(out.iter().all(|v| *v == 0.0 || *v == 1.0));
        }
    }
}
