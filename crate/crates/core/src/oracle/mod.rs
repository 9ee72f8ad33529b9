//! Ground-truth tail probabilities: exact multinomial enumeration and seeded
//! Monte Carlo with Clopper-Pearson intervals, plus batch audits of bounds
//! against them.

mod audit;
mod exact;
mod interval;
mod monte_carlo;

pub use audit::{
    domination_audit, domination_audit_with, AuditCase, AuditKind, AuditReport, AuditRow,
    AuditSettings, OracleValue, Verdict,
};
pub use exact::{
    count_thresholds, default_budget, lattice_size, multinomial_exact_tail,
    multinomial_exact_tail_with_budget, multinomial_tail_with_thresholds, multinomial_total_mass,
    vertex_exact_tail, BUDGET_ENV_VAR, DEFAULT_ENUMERATION_BUDGET,
};
pub use interval::clopper_pearson;
pub use monte_carlo::{
    mc_mean_tail, CategoricalModel, DirichletModel, McSettings, MeanModel, PointMass,
    SamplerHandle, TailEstimate, DEFAULT_CONFIDENCE, MIN_TRIALS,
};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::CompensatedSum;

    #[test]
    fn compensated_sum_recovers_lost_bits() {
        let mut s = CompensatedSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
