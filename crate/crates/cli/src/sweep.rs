//! Audit sweeps over parameter grids read from a JSON config.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use simplex_bounds::distributions::{DirichletSpec, MultinomialSpec};
use simplex_bounds::oracle::{
    default_budget, domination_audit, lattice_size, AuditCase, AuditKind, AuditRow, AuditSettings,
    McSettings, OracleValue, Verdict, DEFAULT_CONFIDENCE,
};
use simplex_bounds::{Error, SimplexPoint, TailDirection};

use crate::output::{ints, num, nums, opt_num, write_csv, Record};
use crate::CliError;

/// Largest number of z points one grid entry may generate.
pub const MAX_GENERATED_POINTS: u128 = 1_000_000;

pub const REPORT_COLUMNS: &[&str] = &[
    "row",
    "case_id",
    "family",
    "direction",
    "n",
    "params",
    "z",
    "bound",
    "log_bound",
    "oracle_kind",
    "oracle_value",
    "ci_low",
    "ci_high",
    "trials",
    "seed",
    "margin",
    "verdict",
    "note",
];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub grids: Vec<GridEntry>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub trials: u64,
    pub seed: u64,
    pub budget: Option<u64>,
    pub workers: usize,
    pub confidence: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            trials: 100_000,
            seed: 0,
            budget: None,
            workers: 1,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFamily {
    General,
    Multinomial,
    Dirichlet,
}

/// One grid entry as written in the config. Exactly one of `mu`, `p`,
/// `alpha` is expected, matching `family`.
///
/// `z` is kept as raw JSON: serde's buffered enum decoding does not cope with
/// the arbitrary-precision numbers used for output.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEntry {
    pub family: GridFamily,
    #[serde(default)]
    pub mu: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub alpha: Option<Vec<Vec<f64>>>,
    pub n: Vec<u64>,
    pub z: Value,
    pub directions: Vec<TailDirection>,
    #[serde(default)]
    pub skip_on_violation: bool,
}

/// Targets in mean space: explicit `k`-vectors or a regular lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum RealTargets {
    Points(Vec<Vec<f64>>),
    Step(f64),
}

/// Count targets: explicit vectors (`k` or `k + 1` cells) or every
/// composition of `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum CountTargets {
    All,
    Points(Vec<Vec<u64>>),
}

fn config_err(gi: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("grid {gi}: {msg}"))
}

fn step_of(gi: usize, z: &Value) -> Result<Option<f64>, CliError> {
    match z {
        Value::Object(map) => {
            if map.len() != 1 || !map.contains_key("step") {
                return Err(config_err(gi, "z object must be {\"step\": <number>}"));
            }
            map["step"]
                .as_f64()
                .map(Some)
                .ok_or_else(|| config_err(gi, "z step must be a number"))
        }
        _ => Ok(None),
    }
}

fn real_targets_of(gi: usize, z: &Value) -> Result<RealTargets, CliError> {
    if let Some(step) = step_of(gi, z)? {
        return Ok(RealTargets::Step(step));
    }
    serde_json::from_value::<Vec<Vec<f64>>>(z.clone())
        .map(RealTargets::Points)
        .map_err(|_| config_err(gi, "z must be a list of points or {\"step\": <number>}"))
}

fn count_targets_of(gi: usize, z: &Value) -> Result<CountTargets, CliError> {
    if z.as_str() == Some("all") {
        return Ok(CountTargets::All);
    }
    serde_json::from_value::<Vec<Vec<u64>>>(z.clone())
        .map(CountTargets::Points)
        .map_err(|_| config_err(gi, "z must be \"all\" or a list of count vectors"))
}

fn params_of(gi: usize, g: &GridEntry) -> Result<&[Vec<f64>], CliError> {
    let (wanted, name) = match g.family {
        GridFamily::General => (&g.mu, "mu"),
        GridFamily::Multinomial => (&g.p, "p"),
        GridFamily::Dirichlet => (&g.alpha, "alpha"),
    };
    let given = [g.mu.is_some(), g.p.is_some(), g.alpha.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    match wanted {
        Some(v) if given == 1 => Ok(v),
        _ => Err(config_err(
            gi,
            format!("this family takes exactly one parameter list, `{name}`"),
        )),
    }
}

impl SweepConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

struct PlannedCase {
    case: AuditCase,
    n: u64,
    params: Vec<f64>,
    z: Value,
}

/// Grid cases in config order. Generated targets that violate a
/// precondition are dropped; explicit ones are kept (and later skipped) only
/// when their grid allows it.
struct Planner<'a> {
    oracle: &'a OracleConfig,
    cases: Vec<PlannedCase>,
}

impl Planner<'_> {
    fn push(
        &mut self,
        mut planned: PlannedCase,
        explicit: bool,
        skip_ok: bool,
    ) -> Result<(), CliError> {
        if let AuditKind::Dirichlet { mc, .. } = &mut planned.case.kind {
            mc.seed = self.oracle.seed.wrapping_add(self.cases.len() as u64);
        }
        match planned.case.bound() {
            Ok(_) => {}
            Err(Error::PreconditionOrderViolated { .. } | Error::RequiresStrictInterior { .. }) => {
                if !explicit {
                    return Ok(());
                }
                if !skip_ok {
                    return Err(CliError::Config(format!(
                        "case {} violates its precondition and its grid does not set skip_on_violation",
                        planned.case.id
                    )));
                }
            }
            Err(e) => {
                return Err(CliError::Config(format!("case {}: {e}", planned.case.id)));
            }
        }
        self.cases.push(planned);
        Ok(())
    }

    fn mc(&self) -> McSettings {
        McSettings {
            trials: self.oracle.trials,
            seed: self.oracle.seed,
            workers: self.oracle.workers,
            confidence: self.oracle.confidence,
        }
    }
}

fn step_points(k: usize, step: f64) -> Result<Vec<Vec<f64>>, CliError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(CliError::Config(format!(
            "z step must lie in (0, 1], got {step}"
        )));
    }
    let m = (1.0 / step + 1e-9).floor() as u64;
    if lattice_size(m, k) > MAX_GENERATED_POINTS {
        return Err(CliError::Config(format!(
            "z step {step} generates too many points for k = {k}"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(k: usize, left: u64, step: f64, current: &mut Vec<u64>, out: &mut Vec<Vec<f64>>) {
        if current.len() == k {
            out.push(current.iter().map(|&j| j as f64 * step).collect());
            return;
        }
        for j in 0..=left {
            current.push(j);
            rec(k, left - j, step, current, out);
            current.pop();
        }
    }
    rec(k, m, step, &mut current, &mut out);
    // drop lattice points pushed over the simplex by rounding
    out.retain(|p| p.iter().sum::<f64>() <= 1.0 + 1e-12);
    Ok(out)
}

fn compositions(n: u64, cells: usize) -> Result<Vec<Vec<u64>>, CliError> {
    if lattice_size(n, cells - 1) > MAX_GENERATED_POINTS {
        return Err(CliError::Config(format!(
            "z = \"all\" generates too many points for n = {n}, k = {}",
            cells - 1
        )));
    }
    fn rec(left: u64, cells: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if current.len() + 1 == cells {
            current.push(left);
            out.push(current.clone());
            current.pop();
            return;
        }
        for c in 0..=left {
            current.push(c);
            rec(left - c, cells, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, cells, &mut Vec::new(), &mut out);
    // slack cell first, remaining cells in lexicographic order
    for v in &mut out {
        v.rotate_right(1);
    }
    Ok(out)
}

fn real_targets(z: &RealTargets, k: usize) -> Result<(Vec<Vec<f64>>, bool), CliError> {
    match z {
        RealTargets::Points(p) => Ok((p.clone(), true)),
        RealTargets::Step(step) => Ok((step_points(k, *step)?, false)),
    }
}

fn point(v: &[f64], id: &str) -> Result<SimplexPoint, CliError> {
    SimplexPoint::new(v.to_vec()).map_err(|e| CliError::Config(format!("case {id}: {e}")))
}

fn plan(config: &SweepConfig) -> Result<Vec<PlannedCase>, CliError> {
    let mut planner = Planner {
        oracle: &config.oracle,
        cases: Vec::new(),
    };
    for (gi, g) in config.grids.iter().enumerate() {
        let params = params_of(gi, g)?;
        match g.family {
            GridFamily::General => {
                let z_spec = real_targets_of(gi, &g.z)?;
                for (pi, mu) in params.iter().enumerate() {
                    let mu_point = point(mu, &format!("g{gi}-p{pi}"))?;
                    let (targets, explicit) = real_targets(&z_spec, mu.len())?;
                    for &n in &g.n {
                        for (zi, z) in targets.iter().enumerate() {
                            for &direction in &g.directions {
                                let id = format!("g{gi}-p{pi}-n{n}-z{zi}-{direction}");
                                let kind = AuditKind::General {
                                    mu: mu_point.clone(),
                                    z: point(z, &id)?,
                                    n,
                                };
                                planner.push(
                                    PlannedCase {
                                        case: AuditCase {
                                            id,
                                            direction,
                                            kind,
                                        },
                                        n,
                                        params: mu.clone(),
                                        z: nums(z),
                                    },
                                    explicit,
                                    g.skip_on_violation,
                                )?;
                            }
                        }
                    }
                }
            }
            GridFamily::Multinomial => {
                let z_spec = count_targets_of(gi, &g.z)?;
                for (pi, p) in params.iter().enumerate() {
                    for &n in &g.n {
                        let spec = MultinomialSpec::from_probabilities(n, p.clone())
                            .map_err(|e| CliError::Config(format!("g{gi}-p{pi}-n{n}: {e}")))?;
                        let (targets, explicit) = match &z_spec {
                            CountTargets::All => (compositions(n, p.len())?, false),
                            CountTargets::Points(pts) => (pts.clone(), true),
                        };
                        for (zi, z) in targets.iter().enumerate() {
                            for &direction in &g.directions {
                                let id = format!("g{gi}-p{pi}-n{n}-z{zi}-{direction}");
                                let counts = crate::commands::counts_from_input(z, n, spec.k())
                                    .map_err(|e| CliError::Config(format!("case {id}: {e}")))?;
                                let z_value = ints(counts.counts());
                                let kind = AuditKind::Multinomial {
                                    spec: spec.clone(),
                                    z: counts,
                                };
                                planner.push(
                                    PlannedCase {
                                        case: AuditCase {
                                            id,
                                            direction,
                                            kind,
                                        },
                                        n,
                                        params: p.clone(),
                                        z: z_value,
                                    },
                                    explicit,
                                    g.skip_on_violation,
                                )?;
                            }
                        }
                    }
                }
            }
            GridFamily::Dirichlet => {
                let z_spec = real_targets_of(gi, &g.z)?;
                for (pi, alpha) in params.iter().enumerate() {
                    let spec = DirichletSpec::new(alpha.clone())
                        .map_err(|e| CliError::Config(format!("g{gi}-p{pi}: {e}")))?;
                    let (targets, explicit) = real_targets(&z_spec, spec.k())?;
                    for &n in &g.n {
                        for (zi, z) in targets.iter().enumerate() {
                            for &direction in &g.directions {
                                let id = format!("g{gi}-p{pi}-n{n}-z{zi}-{direction}");
                                let kind = AuditKind::Dirichlet {
                                    spec: spec.clone(),
                                    z: point(z, &id)?,
                                    n,
                                    mc: planner.mc(),
                                };
                                planner.push(
                                    PlannedCase {
                                        case: AuditCase {
                                            id,
                                            direction,
                                            kind,
                                        },
                                        n,
                                        params: alpha.clone(),
                                        z: nums(z),
                                    },
                                    explicit,
                                    g.skip_on_violation,
                                )?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(planner.cases)
}

fn validate(config: &SweepConfig) -> Result<(), CliError> {
    let o = &config.oracle;
    if !(o.confidence > 0.0 && o.confidence < 1.0) {
        return Err(CliError::Config(
            "oracle.confidence must lie in (0, 1)".into(),
        ));
    }
    if o.workers == 0 {
        return Err(CliError::Config("oracle.workers must be positive".into()));
    }
    for (gi, g) in config.grids.iter().enumerate() {
        if g.n.contains(&0) {
            return Err(config_err(gi, "n must be positive"));
        }
        if g.directions.is_empty() {
            return Err(config_err(gi, "no directions given"));
        }
    }
    Ok(())
}

fn row_record(index: usize, planned: &PlannedCase, row: &AuditRow) -> Record {
    let mut r = Record::new();
    r.set("row", index as u64)
        .set("case_id", row.case_id.clone())
        .set("family", row.family)
        .set("direction", row.direction.as_str())
        .set("n", planned.n)
        .set("params", nums(&planned.params))
        .set("z", planned.z.clone())
        .set("bound", opt_num(row.bound.as_ref().map(|b| b.bound)))
        .set(
            "log_bound",
            opt_num(row.bound.as_ref().map(|b| b.log_bound)),
        );
    match &row.oracle {
        Some(OracleValue::Exact { value }) => {
            r.set("oracle_kind", "exact")
                .set("oracle_value", num(*value))
                .set("ci_low", Value::Null)
                .set("ci_high", Value::Null)
                .set("trials", Value::Null)
                .set("seed", Value::Null);
        }
        Some(OracleValue::MonteCarlo(e)) => {
            r.set("oracle_kind", "monte_carlo")
                .set("oracle_value", num(e.p_hat))
                .set("ci_low", num(e.ci_low))
                .set("ci_high", num(e.ci_high))
                .set("trials", e.trials)
                .set("seed", e.seed);
        }
        None => {
            for key in [
                "oracle_kind",
                "oracle_value",
                "ci_low",
                "ci_high",
                "trials",
                "seed",
            ] {
                r.set(key, Value::Null);
            }
        }
    }
    r.set("margin", opt_num(row.margin))
        .set("verdict", row.verdict.as_str())
        .set("note", row.note.clone().map_or(Value::Null, Value::String));
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub name: Option<String>,
    pub rows: Vec<Record>,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

impl SweepReport {
    pub fn summary(&self) -> String {
        let name = self.name.as_deref().unwrap_or("sweep");
        format!(
            "{name}: {} rows, PASS {} FAIL {} SKIP {}",
            self.rows.len(),
            self.pass,
            self.fail,
            self.skip
        )
    }

    pub fn to_json_string(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(Record::to_json).collect();
        let mut text =
            serde_json::to_string_pretty(&Value::Array(rows)).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        write_csv(&mut buf, REPORT_COLUMNS, &self.rows)?;
        Ok(buf)
    }
}

/// Plans and runs every case of `config`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, CliError> {
    validate(config)?;
    let planned = plan(config)?;
    let cases: Vec<AuditCase> = planned.iter().map(|p| p.case.clone()).collect();
    let settings = AuditSettings {
        budget: config.oracle.budget.unwrap_or_else(default_budget),
    };
    let report = domination_audit(&cases, &settings);
    let rows = planned
        .iter()
        .zip(&report.rows)
        .enumerate()
        .map(|(i, (p, row))| row_record(i, p, row))
        .collect();
    Ok(SweepReport {
        name: config.name.clone(),
        rows,
        pass: report.count(Verdict::Pass),
        fail: report.count(Verdict::Fail),
        skip: report.count(Verdict::Skip),
    })
}
