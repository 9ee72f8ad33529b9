use serde_json::{json, Value};

use simplex_bounds::distributions::{
    dirichlet_bound, multinomial_bound, CountVector, DirichletSpec, MultinomialSpec,
};
use simplex_bounds::oracle::{
    default_budget, mc_mean_tail, multinomial_exact_tail_with_budget, vertex_exact_tail,
    CategoricalModel, DirichletModel, McSettings, MeanModel, OracleValue, Verdict,
};
use simplex_bounds::{
    complete, theorem1_bound, theorem1_bound_with_slack, BoundResult, CompletedPoint, Error,
    SimplexPoint, TailDirection,
};

use crate::args::{
    DirichletArgs, Family, GeneralArgs, GeneralOracleArgs, McArgs, MultinomialArgs,
    MultinomialOracleArgs,
};
use crate::output::{ints, num, nums, Record};
use crate::{EXIT_OK, EXIT_PRECONDITION};

/// A record to print and the exit code that goes with it.
#[derive(Debug)]
pub struct Outcome {
    pub record: Record,
    pub code: i32,
}

fn is_precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::PreconditionOrderViolated { .. } | Error::RequiresStrictInterior { .. }
    )
}

fn require_positive_n(n: u64) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("--n must be positive".into()));
    }
    Ok(())
}

/// Fills the bound fields of `rec`. Precondition failures leave the bound
/// null and mark the record; other errors are returned.
fn fill_bound(
    rec: &mut Record,
    result: Result<BoundResult, Error>,
) -> Result<Option<BoundResult>, Error> {
    match result {
        Ok(b) => {
            rec.set("precondition_ok", true)
                .set("bound", num(b.bound))
                .set("log_bound", num(b.log_bound))
                .set("exponent_terms", nums(&b.per_coordinate_exponent))
                .set("kl_divergence", num(0.0 - b.log_bound / b.n as f64))
                .set("divergence_infinite", b.divergence_infinite)
                .set("mu_completed", nums(b.mu.coords()))
                .set("z_completed", nums(b.z.coords()))
                .set("error", Value::Null);
            Ok(Some(b))
        }
        Err(e) if is_precondition(&e) => {
            rec.set("precondition_ok", false)
                .set("bound", Value::Null)
                .set("log_bound", Value::Null)
                .set("exponent_terms", Value::Null)
                .set("kl_divergence", Value::Null)
                .set("divergence_infinite", Value::Null)
                .set("mu_completed", Value::Null)
                .set("z_completed", Value::Null)
                .set("error", e.to_string());
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn header(command: &str, family: &str, direction: TailDirection, inputs: Value) -> Record {
    let mut rec = Record::new();
    rec.set("command", command)
        .set("family", family)
        .set("direction", direction.as_str())
        .set("inputs", inputs);
    rec
}

fn code_for(bound: &Option<BoundResult>) -> i32 {
    if bound.is_some() {
        EXIT_OK
    } else {
        EXIT_PRECONDITION
    }
}

pub fn oracle_json(o: &OracleValue) -> Value {
    match o {
        OracleValue::Exact { value } => json!({ "kind": "exact", "value": num(*value) }),
        OracleValue::MonteCarlo(e) => json!({
            "kind": "monte_carlo",
            "p_hat": num(e.p_hat),
            "ci_low": num(e.ci_low),
            "ci_high": num(e.ci_high),
            "confidence": num(e.confidence),
            "trials": e.trials,
            "hits": e.hits,
            "seed": e.seed,
            "model": e.model,
        }),
    }
}

fn attach_oracle(rec: &mut Record, bound: &Option<BoundResult>, oracle: &OracleValue) {
    rec.set("oracle", oracle_json(oracle));
    match bound {
        Some(b) => {
            let verdict = if oracle.refutes(b.bound) {
                Verdict::Fail
            } else {
                Verdict::Pass
            };
            rec.set("margin", num(b.bound - oracle.reference()))
                .set("verdict", verdict.as_str());
        }
        None => {
            rec.set("margin", Value::Null)
                .set("verdict", Verdict::Skip.as_str());
        }
    }
}

/// Count vector from `k` cells (slack cell completed) or all `k + 1` cells.
pub fn counts_from_input(z: &[u64], n: u64, k: usize) -> Result<CountVector, Error> {
    if z.len() == k + 1 {
        CountVector::with_total(z.to_vec(), n)
    } else if z.len() == k {
        let used = z
            .iter()
            .try_fold(0u64, |a, &c| a.checked_add(c))
            .unwrap_or(u64::MAX);
        if used > n {
            return Err(Error::CountMismatch {
                expected: n,
                actual: used,
            });
        }
        let mut counts = Vec::with_capacity(k + 1);
        counts.push(n - used);
        counts.extend_from_slice(z);
        CountVector::new(counts)
    } else {
        Err(Error::DimensionMismatch {
            expected: k,
            actual: z.len(),
        })
    }
}

fn general_inputs(a: &GeneralArgs) -> Value {
    json!({ "mu": nums(&a.mu), "z": nums(&a.z), "n": a.n, "slack": num(a.slack) })
}

fn general_bound(
    a: &GeneralArgs,
) -> Result<(SimplexPoint, SimplexPoint, Result<BoundResult, Error>), Error> {
    require_positive_n(a.n)?;
    let mu = SimplexPoint::new(a.mu.clone())?;
    let z = SimplexPoint::new(a.z.clone())?;
    let result = theorem1_bound_with_slack(&mu, &z, a.n, a.dir.into(), a.slack);
    Ok((mu, z, result))
}

fn multinomial_parts(a: &MultinomialArgs) -> Result<(MultinomialSpec, CountVector), Error> {
    require_positive_n(a.n)?;
    let spec = MultinomialSpec::from_probabilities(a.n, a.p.clone())?;
    let z = counts_from_input(&a.z, a.n, spec.k())?;
    Ok((spec, z))
}

fn multinomial_inputs(a: &MultinomialArgs, z: &CountVector) -> Value {
    json!({ "n": a.n, "p": nums(&a.p), "z": ints(z.counts()) })
}

pub fn bound_general(a: &GeneralArgs) -> Result<Outcome, Error> {
    let (_, _, result) = general_bound(a)?;
    let mut rec = header("bound", "general", a.dir.into(), general_inputs(a));
    let b = fill_bound(&mut rec, result)?;
    Ok(Outcome {
        code: code_for(&b),
        record: rec,
    })
}

pub fn bound_multinomial(a: &MultinomialArgs) -> Result<Outcome, Error> {
    let (spec, z) = multinomial_parts(a)?;
    let dir = a.dir.into();
    let mut rec = header("bound", "multinomial", dir, multinomial_inputs(a, &z));
    let b = fill_bound(&mut rec, multinomial_bound(&spec, &z, dir))?;
    Ok(Outcome {
        code: code_for(&b),
        record: rec,
    })
}

pub fn bound_dirichlet(a: &DirichletArgs) -> Result<Outcome, Error> {
    require_positive_n(a.n)?;
    let spec = DirichletSpec::new(a.alpha.clone())?;
    let z = SimplexPoint::new(a.z.clone())?;
    let dir = a.dir.into();
    let inputs = json!({ "alpha": nums(&a.alpha), "z": nums(&a.z), "n": a.n });
    let mut rec = header("bound", "dirichlet", dir, inputs);
    let b = fill_bound(&mut rec, dirichlet_bound(&spec, &z, a.n, dir))?;
    Ok(Outcome {
        code: code_for(&b),
        record: rec,
    })
}

pub fn oracle_multinomial(a: &MultinomialOracleArgs) -> Result<Outcome, Error> {
    let inner = &a.inner;
    let (spec, z) = multinomial_parts(inner)?;
    let dir = inner.dir.into();
    let budget = a.budget.unwrap_or_else(default_budget);
    let value = multinomial_exact_tail_with_budget(&spec, &z, dir, budget)?;
    let mut rec = header("oracle", "multinomial", dir, multinomial_inputs(inner, &z));
    let b = fill_bound(&mut rec, multinomial_bound(&spec, &z, dir))?;
    attach_oracle(&mut rec, &b, &OracleValue::Exact { value });
    Ok(Outcome {
        code: code_for(&b),
        record: rec,
    })
}

pub fn oracle_general(a: &GeneralOracleArgs) -> Result<Outcome, Error> {
    let inner = &a.inner;
    let (mu, z, result) = general_bound(inner)?;
    let dir = inner.dir.into();
    let budget = a.budget.unwrap_or_else(default_budget);
    let value = vertex_exact_tail(&mu, &z, inner.n, dir, budget)?;
    let mut rec = header("oracle", "general", dir, general_inputs(inner));
    let b = fill_bound(&mut rec, result)?;
    attach_oracle(&mut rec, &b, &OracleValue::Exact { value });
    Ok(Outcome {
        code: code_for(&b),
        record: rec,
    })
}

fn missing(flag: &str, family: &str) -> Error {
    Error::InvalidArgument(format!("--{flag} is required for --family {family}"))
}

pub fn monte_carlo(command: &str, a: &McArgs, seed: u64) -> Result<Outcome, Error> {
    require_positive_n(a.n)?;
    let z = SimplexPoint::new(a.z.clone())?;
    let dir: TailDirection = a.dir.into();
    let (family, model, params, bound): (&str, Box<dyn MeanModel>, Value, _) = match a.family {
        Family::General => {
            let mu = SimplexPoint::new(a.mu.clone().ok_or_else(|| missing("mu", "general"))?)?;
            let bound = theorem1_bound(&mu, &z, a.n, dir);
            let params = json!({ "mu": nums(mu.coords()) });
            (
                "general",
                Box::new(CategoricalModel::new(complete(&mu))?),
                params,
                bound,
            )
        }
        Family::Multinomial => {
            let p = CompletedPoint::new(a.p.clone().ok_or_else(|| missing("p", "multinomial"))?)?;
            let bound = theorem1_bound(&p.to_simplex(), &z, a.n, dir);
            let params = json!({ "p": nums(p.coords()) });
            (
                "multinomial",
                Box::new(CategoricalModel::new(p)?),
                params,
                bound,
            )
        }
        Family::Dirichlet => {
            let spec = DirichletSpec::new(
                a.alpha
                    .clone()
                    .ok_or_else(|| missing("alpha", "dirichlet"))?,
            )?;
            let bound = dirichlet_bound(&spec, &z, a.n, dir);
            let params = json!({ "alpha": nums(spec.alpha()) });
            (
                "dirichlet",
                Box::new(DirichletModel::new(spec)),
                params,
                bound,
            )
        }
    };
    let settings = McSettings {
        trials: a.trials,
        seed,
        workers: a.workers,
        confidence: a.confidence,
    };
    if !(settings.confidence > 0.0 && settings.confidence < 1.0) {
        return Err(Error::InvalidArgument(
            "--confidence must lie in (0, 1)".into(),
        ));
    }
    let estimate = mc_mean_tail(model.as_ref(), a.n, &z, dir, &settings)?;
    let mut inputs = params;
    inputs["z"] = nums(z.coords());
    inputs["n"] = a.n.into();
    let mut rec = header(command, family, dir, inputs);
    let b = fill_bound(&mut rec, bound)?;
    attach_oracle(&mut rec, &b, &OracleValue::MonteCarlo(estimate));
    Ok(Outcome {
        code: code_for(&b),
        record: rec,
    })
}
