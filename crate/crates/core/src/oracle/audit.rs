//! Batch comparison of emitted bounds against tail oracles.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{theorem1_bound, BoundResult};
use crate::distributions::{
    dirichlet_bound, multinomial_bound, CountVector, DirichletSpec, MultinomialSpec,
};
use crate::error::{Error, Result};
use crate::simplex::{SimplexPoint, TailDirection, NUMERIC_TOLERANCE};

use super::exact::{multinomial_exact_tail_with_budget, vertex_exact_tail};
use super::monte_carlo::{mc_mean_tail, DirichletModel, McSettings, TailEstimate};

#[derive(Debug, Clone)]
pub enum AuditKind {
    /// Exact enumeration of the count vector's tail.
    Multinomial {
        spec: MultinomialSpec,
        z: CountVector,
    },
    /// Exact tail under the vertex law with mean `mu`.
    General {
        mu: SimplexPoint,
        z: SimplexPoint,
        n: u64,
    },
    /// Monte Carlo estimate of the mean of `n` Dirichlet vectors.
    Dirichlet {
        spec: DirichletSpec,
        z: SimplexPoint,
        n: u64,
        mc: McSettings,
    },
}

#[derive(Debug, Clone)]
pub struct AuditCase {
    pub id: String,
    pub direction: TailDirection,
    pub kind: AuditKind,
}

impl AuditCase {
    pub fn family(&self) -> &'static str {
        match self.kind {
            AuditKind::Multinomial { .. } => "multinomial",
            AuditKind::General { .. } => "general",
            AuditKind::Dirichlet { .. } => "dirichlet",
        }
    }

    pub fn bound(&self) -> Result<BoundResult> {
        match &self.kind {
            AuditKind::Multinomial { spec, z } => multinomial_bound(spec, z, self.direction),
            AuditKind::General { mu, z, n } => theorem1_bound(mu, z, *n, self.direction),
            AuditKind::Dirichlet { spec, z, n, .. } => dirichlet_bound(spec, z, *n, self.direction),
        }
    }

    pub fn oracle(&self, budget: u64) -> Result<OracleValue> {
        match &self.kind {
            AuditKind::Multinomial { spec, z } => {
                multinomial_exact_tail_with_budget(spec, z, self.direction, budget)
                    .map(|value| OracleValue::Exact { value })
            }
            AuditKind::General { mu, z, n } => vertex_exact_tail(mu, z, *n, self.direction, budget)
                .map(|value| OracleValue::Exact { value }),
            AuditKind::Dirichlet { spec, z, n, mc } => {
                let model = DirichletModel::new(spec.clone());
                mc_mean_tail(&model, *n, z, self.direction, mc).map(OracleValue::MonteCarlo)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleValue {
    Exact { value: f64 },
    MonteCarlo(TailEstimate),
}

impl OracleValue {
    /// Value compared against the bound: the exact probability, or the lower
    /// confidence limit of an estimate.
    pub fn reference(&self) -> f64 {
        match self {
            OracleValue::Exact { value } => *value,
            OracleValue::MonteCarlo(e) => e.ci_low,
        }
    }

    /// Whether `bound` is inconsistent with this oracle value.
    pub fn refutes(&self, bound: f64) -> bool {
        match self {
            OracleValue::Exact { value } => *value > bound + NUMERIC_TOLERANCE,
            OracleValue::MonteCarlo(e) => e.ci_low > bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub case_id: String,
    pub family: &'static str,
    pub direction: TailDirection,
    pub bound: Option<BoundResult>,
    pub oracle: Option<OracleValue>,
    /// `bound - oracle.reference()`.
    pub margin: Option<f64>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSettings {
    pub budget: u64,
}

impl Default for AuditSettings {
    fn default() -> Self {
        AuditSettings {
            budget: super::exact::default_budget(),
        }
    }
}

fn skipped(case: &AuditCase, bound: Option<BoundResult>, err: &Error) -> AuditRow {
    AuditRow {
        case_id: case.id.clone(),
        family: case.family(),
        direction: case.direction,
        bound,
        oracle: None,
        margin: None,
        verdict: Verdict::Skip,
        note: Some(err.to_string()),
    }
}

/// Runs every case; a case whose bound or oracle errors becomes a SKIP row.
pub fn domination_audit(cases: &[AuditCase], settings: &AuditSettings) -> AuditReport {
    domination_audit_with(cases, settings, |_, bound| bound)
}

/// [`domination_audit`] with `adjust` applied to each bound before the
/// verdict, so a harness can check that corrupted bounds are caught.
pub fn domination_audit_with<F>(
    cases: &[AuditCase],
    settings: &AuditSettings,
    adjust: F,
) -> AuditReport
where
    F: Fn(&AuditCase, f64) -> f64 + Sync,
{
    let rows = cases
        .par_iter()
        .map(|case| {
            let bound = match case.bound() {
                Ok(b) => b,
                Err(e) => return skipped(case, None, &e),
            };
            let oracle = match case.oracle(settings.budget) {
                Ok(o) => o,
                Err(e) => return skipped(case, Some(bound), &e),
            };
            let checked = adjust(case, bound.bound);
            let verdict = if oracle.refutes(checked) {
                Verdict::Fail
            } else {
                Verdict::Pass
            };
            AuditRow {
                case_id: case.id.clone(),
                family: case.family(),
                direction: case.direction,
                margin: Some(checked - oracle.reference()),
                bound: Some(bound),
                oracle: Some(oracle),
                verdict,
                note: None,
            }
        })
        .collect();
    AuditReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_grid(n: u64) -> Vec<AuditCase> {
        let third = 1.0 / 3.0;
        let spec = MultinomialSpec::from_probabilities(n, vec![third; 3]).unwrap();
        let mut cases = Vec::new();
        for z1 in 0..=n {
            for z2 in 0..=n - z1 {
                let z = CountVector::new(vec![n - z1 - z2, z1, z2]).unwrap();
                cases.push(AuditCase {
                    id: format!("n{n}-{z1}-{z2}"),
                    direction: TailDirection::Lower,
                    kind: AuditKind::Multinomial {
                        spec: spec.clone(),
                        z,
                    },
                });
            }
        }
        cases
    }

    #[test]
    fn uniform_lower_grid_passes() {
        let settings = AuditSettings { budget: 1_000_000 };
        for n in [5, 10, 20] {
            let report = domination_audit(&uniform_grid(n), &settings);
            assert!(report.passed());
            // points violating the order precondition are skipped, the rest pass
            assert!(report.count(Verdict::Pass) > 0);
            for row in report.rows.iter().filter(|r| r.verdict == Verdict::Skip) {
                assert!(row.note.as_deref().unwrap().contains("order precondition"));
            }
        }
    }

    #[test]
    fn integral_mean_is_trivial_pass() {
        let spec = MultinomialSpec::from_probabilities(6, vec![0.5, 0.5]).unwrap();
        let case = AuditCase {
            id: "mean".into(),
            direction: TailDirection::Upper,
            kind: AuditKind::Multinomial {
                spec,
                z: CountVector::new(vec![3, 3]).unwrap(),
            },
        };
        let report = domination_audit(&[case], &AuditSettings::default());
        assert_eq!(report.rows[0].verdict, Verdict::Pass);
        assert_eq!(report.rows[0].bound.as_ref().unwrap().bound, 1.0);
    }

    #[test]
    fn corrupted_bound_is_detected() {
        let cases = uniform_grid(10);
        let report = domination_audit_with(&cases, &AuditSettings::default(), |_, b| b * 1e-6);
        assert!(report.count(Verdict::Fail) > 0);
        assert!(!report.passed());
    }

    #[test]
    fn budget_errors_become_skip_rows() {
        let spec = MultinomialSpec::from_probabilities(50, vec![0.25; 4]).unwrap();
        let case = AuditCase {
            id: "big".into(),
            direction: TailDirection::Lower,
            kind: AuditKind::Multinomial {
                spec,
                z: CountVector::new(vec![20, 10, 10, 10]).unwrap(),
            },
        };
        let report = domination_audit(&[case], &AuditSettings { budget: 10 });
        let row = &report.rows[0];
        assert_eq!(row.verdict, Verdict::Skip);
        assert!(row.bound.is_some());
        assert!(row.note.as_deref().unwrap().contains("budget"));
    }

    #[test]
    fn general_and_dirichlet_cases() {
        let cases = vec![
            AuditCase {
                id: "g".into(),
                direction: TailDirection::Lower,
                kind: AuditKind::General {
                    mu: SimplexPoint::new(vec![0.3, 0.3]).unwrap(),
                    z: SimplexPoint::new(vec![0.2, 0.2]).unwrap(),
                    n: 10,
                },
            },
            AuditCase {
                id: "d".into(),
                direction: TailDirection::Upper,
                kind: AuditKind::Dirichlet {
                    spec: DirichletSpec::new(vec![1.0, 1.0]).unwrap(),
                    z: SimplexPoint::new(vec![0.6]).unwrap(),
                    n: 3,
                    mc: McSettings::new(5_000, 3),
                },
            },
        ];
        let report = domination_audit(&cases, &AuditSettings::default());
        assert!(
            report.rows.iter().all(|r| r.verdict == Verdict::Pass),
            "{report:?}"
        );
        assert_eq!(report.rows[0].case_id, "g");
        assert_eq!(report.rows[1].family, "dirichlet");
    }
}
