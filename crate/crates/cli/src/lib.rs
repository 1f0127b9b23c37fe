//! Batch front end: run configuration, dispatch to the checks in `pinchlab`,
//! report assembly, emission and persistence.

pub mod emit;

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use pinchlab::campaign::{hex_digest, mc_campaign, sub_seed, CampaignConfig, SourceKind};
use pinchlab::estimates::{
    coefficient1, coefficient2, convex_coefficients, eigen_gap_lemma, equality_case,
    sample_traceless, SamplerKind,
};
use pinchlab::functional::{
    f_norm_expansion, grad_q2, optimal_b, optimize_q2, q_value, reduced_q2, s_coefficient,
    sample_coefficients, sample_gradient_model, FCoefficients, OptimizeStrategy,
};
use pinchlab::models::{
    comparison_table, model, pinching_threshold, shipped_models, soliton_identity_check,
    ModelGeometry,
};
use pinchlab::scalar::degenerate_pinching;
use pinchlab::{Arithmetic, Exact, Rational, Scalar};

pub const TOOL_VERSION: &str = concat!("pinchlab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pinchlab::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyEstimates,
    OptimizeQ2,
    ExpandFsq,
    Model,
    Models,
    Identities,
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Every field is optional so that a config file and command-line flags can
/// be layered; [`RunConfig::resolved`] fills per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arithmetic: Option<Arithmetic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<Exact>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<Exact>>,
    /// Samples per block (verify-estimates, identities) or gradient models
    /// (expand-fsq).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Coefficient vectors per gradient model (expand-fsq).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<SamplerKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<Exact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Allowed `‖argmax − claimed‖∞` in optimize-q2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// `"a1,a2,b1,b2,b3"`; restricts expand-fsq and the Q-value check to
    /// this vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Random planes for the sampling oracle in model thresholds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Deliberate corruption of the first estimate's coefficient; any
    /// nonzero value must surface as violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault_rhs1_coefficient: Option<Exact>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

fn ratios(list: &[(i64, i64)]) -> Vec<Exact> {
    list.iter().map(|&(p, q)| Exact::ratio(p, q)).collect()
}

const VERIFY_EPS: &[(i64, i64)] = &[(-1, 10), (0, 1), (1, 48), (1, 24)];
const OPTIMIZE_EPS: &[(i64, i64)] = &[(0, 1), (1, 48), (1, 24), (1, 16)];
/// `all` runs the optimizer only where the claimed maximizer is global.
const ALL_OPTIMIZE_EPS: &[(i64, i64)] = &[(1, 24), (1, 16)];
const S_VALUES: &[(i64, i64)] = &[(0, 1), (1, 2), (3, 4), (7, 8), (1, 1)];

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(self, top; command, seed, arithmetic, n, eps, s, count, coeff_count, source,
            distribution, margin, grid, half_width, tol, coeffs, model, oracle_samples, table,
            threads, out_dir, format, fault_rhs1_coefficient);
        self
    }

    /// Explicit values for everything the command reads.
    pub fn resolved(&self) -> Result<Self, CliError> {
        let mut c = self.clone();
        let cmd = c
            .command
            .ok_or_else(|| CliError::Usage("no command given".to_owned()))?;
        c.seed.get_or_insert(0);
        c.arithmetic.get_or_insert(Arithmetic::Rational);
        c.format.get_or_insert(Format::Json);
        let verify = matches!(cmd, Command::VerifyEstimates | Command::All);
        let optimize = matches!(cmd, Command::OptimizeQ2 | Command::All);
        let fsq = matches!(cmd, Command::ExpandFsq | Command::All);
        let ident = matches!(cmd, Command::Identities | Command::All);
        match cmd {
            Command::VerifyEstimates | Command::All | Command::Identities => {
                c.n.get_or_insert_with(|| vec![3, 4, 5, 6]);
            }
            Command::ExpandFsq => {
                c.n.get_or_insert_with(|| vec![4]);
            }
            _ => {}
        }
        if verify || ident || fsq {
            c.count.get_or_insert(if cmd == Command::ExpandFsq { 100 } else { 1000 });
        }
        if verify {
            c.eps.get_or_insert_with(|| ratios(VERIFY_EPS));
            c.s.get_or_insert_with(|| ratios(S_VALUES));
            c.source.get_or_insert(SourceKind::Profile);
            c.distribution.get_or_insert(SamplerKind::HalfNormal);
            c.margin.get_or_insert(Exact::ratio(1, 1_000_000));
        }
        if optimize {
            if cmd == Command::OptimizeQ2 {
                c.eps.get_or_insert_with(|| ratios(OPTIMIZE_EPS));
            }
            let d = OptimizeStrategy::default();
            c.grid.get_or_insert(d.grid);
            c.half_width.get_or_insert(d.half_width);
            c.tol.get_or_insert(1e-6);
        }
        if fsq {
            c.coeff_count.get_or_insert(10);
        }
        if matches!(cmd, Command::Models) {
            c.table.get_or_insert(false);
        }
        if cmd == Command::Model && c.model.is_none() {
            return Err(CliError::Usage("model needs a name, e.g. `model cp2`".to_owned()));
        }
        for &n in c.n.iter().flatten() {
            if !(3..=16).contains(&n) {
                return Err(CliError::Usage(format!("n = {n} is outside 3..=16")));
            }
        }
        if verify {
            check_eps_lists(c.n.as_deref().unwrap_or(&[]), c.eps.as_deref().unwrap_or(&[]))?;
        }
        if cmd == Command::Model {
            if let Some(eps) = &c.eps {
                if eps.len() != 1 {
                    return Err(CliError::Usage("model takes a single --eps".to_owned()));
                }
            }
        }
        Ok(c)
    }

    fn command(&self) -> Command {
        self.command.expect("resolved")
    }
}

/// Every `ε` must be below `1/(n(n−1))` for at least one listed `n`; blocks
/// that are invalid for a particular `n` are skipped by the campaign.
fn check_eps_lists(ns: &[usize], eps: &[Exact]) -> Result<(), CliError> {
    for e in eps {
        let r: Rational = e.get();
        if !ns.iter().any(|&n| r < degenerate_pinching::<Rational>(n)) {
            return Err(CliError::Usage(format!(
                "eps = {e} is at or above the degenerate bound 1/(n(n-1)) for every n in {ns:?}"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timing {
    pub total_seconds: f64,
    pub sections: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub violations: Vec<Value>,
    pub notes: Vec<String>,
    /// Excluded from the digest.
    pub timing: Timing,
    pub tool_version: String,
    pub exit_status: i32,
    /// SHA-256 of this report without `timing` and `digest`.
    pub digest: String,
    #[serde(skip)]
    pub gap_csv: Option<String>,
    #[serde(skip)]
    pub literature: Option<Value>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.exit_status == 0
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report is plain data")
    }

    fn compute_digest(&self) -> String {
        let mut doc = self.to_json();
        if let Value::Object(map) = &mut doc {
            map.remove("timing");
            map.remove("digest");
        }
        hex_digest(&doc)
    }
}

#[derive(Default)]
struct Sections {
    checks: Vec<Check>,
    violations: Vec<Value>,
    notes: Vec<String>,
    timing: BTreeMap<String, f64>,
    gap_csv: Option<String>,
    literature: Option<Value>,
}

impl Sections {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: Value) {
        let name = name.into();
        if !passed {
            self.violations.push(json!({ "check": name, "detail": detail }));
        }
        self.checks.push(Check { name, passed, detail });
    }

    fn timed(&mut self, label: &str, f: impl FnOnce(&mut Self) -> Result<(), CliError>) -> Result<(), CliError> {
        let t = Instant::now();
        f(self)?;
        self.timing.insert(label.to_owned(), t.elapsed().as_secs_f64());
        Ok(())
    }
}

/// Runs one configured command. `Err` means a usage or internal error
/// (exit 2); mathematical failures are reported with exit status 1.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let cfg = config.resolved()?;
    let start = Instant::now();
    let mut out = Sections::default();
    match cfg.command() {
        Command::VerifyEstimates => out.timed("verify-estimates", |o| verify_estimates(&cfg, o))?,
        Command::OptimizeQ2 => {
            let eps = cfg.eps.clone().unwrap_or_default();
            out.timed("optimize-q2", |o| optimize(&cfg, &eps, o))?
        }
        Command::ExpandFsq => out.timed("expand-fsq", |o| expand_fsq(&cfg, o))?,
        Command::Model => out.timed("model", |o| model_command(&cfg, o))?,
        Command::Models => out.timed("models", |o| models_command(&cfg, o))?,
        Command::Identities => out.timed("identities", |o| identities(&cfg, o))?,
        Command::All => {
            out.timed("verify-estimates", |o| verify_estimates(&cfg, o))?;
            out.timed("optimize-q2", |o| optimize(&cfg, &ratios(ALL_OPTIMIZE_EPS), o))?;
            out.timed("expand-fsq", |o| expand_fsq(&cfg, o))?;
            out.timed("models", |o| models_command(&cfg, o))?;
            out.timed("identities", |o| identities(&cfg, o))?;
        }
    }
    let exit_status = i32::from(!out.violations.is_empty());
    let mut report = RunReport {
        config: cfg,
        checks: out.checks,
        violations: out.violations,
        notes: out.notes,
        timing: Timing {
            total_seconds: start.elapsed().as_secs_f64(),
            sections: out.timing,
        },
        tool_version: TOOL_VERSION.to_owned(),
        exit_status,
        digest: String::new(),
        gap_csv: out.gap_csv,
        literature: out.literature,
    };
    report.digest = report.compute_digest();
    Ok(report)
}

fn verify_estimates(cfg: &RunConfig, out: &mut Sections) -> Result<(), CliError> {
    let ns = cfg.n.clone().unwrap_or_default();
    let eps = cfg.eps.clone().unwrap_or_default();
    let s = cfg.s.clone().unwrap_or_default();

    if cfg.count.unwrap_or(0) == 0 {
        return Ok(());
    }
    // Structure of the convex combination: endpoints and the cubic term.
    let mut bad = Vec::new();
    for &n in &ns {
        for e in &eps {
            let e: Rational = e.get();
            if e >= degenerate_pinching::<Rational>(n) {
                continue;
            }
            let nn = Rational::from_int(n as i64);
            for sv in &s {
                let sv: Rational = sv.get();
                let (quad, cubic) = convex_coefficients(n, &e, &sv);
                let quad_expected = coefficient2(n, &e) * (Rational::from_int(1) - sv.clone())
                    + coefficient1(n, &e) * sv.clone();
                let cubic_expected = nn.clone() * sv.clone() - Rational::from_int(n as i64 - 1);
                if quad != quad_expected || cubic != cubic_expected {
                    bad.push(json!({ "n": n, "eps": e.to_string(), "s": sv.to_string(),
                        "quadratic": quad.to_string(), "cubic": cubic.to_string() }));
                }
            }
        }
    }
    let remark = convex_coefficients(4, &Rational::from_int(0), &Rational::from_ratio(3, 4)).1;
    out.push(
        "convex coefficients",
        bad.is_empty() && remark == Rational::from_int(0),
        json!({ "mismatches": bad, "cubicAtN4Eps0S3/4": remark.to_string() }),
    );

    for src in [cfg.source.unwrap_or_default()] {
        let config = CampaignConfig {
            n: ns.clone(),
            eps: eps.clone(),
            s: s.clone(),
            count: cfg.count.unwrap_or(0),
            seed: cfg.seed.unwrap_or(0),
            source: src,
            arithmetic: cfg.arithmetic.unwrap_or(Arithmetic::Rational),
            distribution: cfg.distribution.unwrap_or_default(),
            margin: cfg.margin.clone().unwrap_or(Exact::ratio(1, 1_000_000)),
            fault_rhs1_coefficient: cfg.fault_rhs1_coefficient.clone(),
            max_dumps: 10,
            record_gaps: cfg.format == Some(Format::Csv),
        };
        let report = mc_campaign(&config)?;
        for b in &report.blocks {
            if let Some(reason) = &b.skipped {
                out.notes.push(format!("skipped n={} eps={}: {reason}", b.n, b.eps));
                continue;
            }
            if b.samples == 0 {
                continue;
            }
            let detail = serde_json::to_value(b).expect("plain data");
            out.push(
                format!("estimates n={} eps={} source={}", b.n, b.eps, source_name(src)),
                b.violations == 0 && b.uncertified == 0,
                detail,
            );
        }
        for v in &report.violations {
            out.violations.push(json!({ "check": "estimates sample", "detail": v }));
        }
        if config.record_gaps {
            out.gap_csv = Some(report.to_csv());
        }
    }
    Ok(())
}

fn source_name(s: SourceKind) -> &'static str {
    match s {
        SourceKind::Profile => "profile",
        SourceKind::Tensor => "tensor",
    }
}

fn optimize(cfg: &RunConfig, eps_list: &[Exact], out: &mut Sections) -> Result<(), CliError> {
    let strategy = OptimizeStrategy {
        grid: cfg.grid.unwrap_or(201),
        half_width: cfg.half_width.unwrap_or(10.0),
        ..OptimizeStrategy::default()
    };
    let tol = cfg.tol.unwrap_or(1e-6);

    // Exact values at the claimed optimum.
    let coeffs = match &cfg.coeffs {
        Some(s) => FCoefficients::<Rational>::parse(s)?,
        None => FCoefficients::claimed_optimum(),
    };
    let claimed = coeffs == FCoefficients::claimed_optimum();
    for e in eps_list {
        let eps: Rational = e.get();
        let qv = q_value(&coeffs, &eps);
        let expected = (Rational::from_int(48) * eps.clone() - Rational::from_int(2)) / Rational::from_int(3);
        let ok = !claimed || (qv.q1 == Rational::from_ratio(1, 3) && qv.q2 == expected);
        out.push(
            format!("q-values eps={e}"),
            ok,
            emit::q_value_json(&qv),
        );
    }
    let b = optimal_b(&Rational::from_int(1), &Rational::from_int(1));
    let twelfth = Rational::from_ratio(-1, 12);
    out.push(
        "optimal b at a=(1,1)",
        b.iter().all(|x| *x == twelfth),
        json!(b.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
    );
    let sc: Vec<_> = (0..=8)
        .map(|k| {
            let s = Rational::from_ratio(k, 8);
            let v = s_coefficient(&Rational::from_int(1), &Rational::from_int(1), &s);
            let expected = Rational::from_int(2) * (Rational::from_int(7) - Rational::from_int(8) * s.clone());
            (s, v, expected)
        })
        .collect();
    out.push(
        "s-coefficient at a=(1,1)",
        sc.iter().all(|(_, v, e)| v == e),
        json!(sc.iter().map(|(s, v, _)| json!({"s": s.to_string(), "value": v.to_string()})).collect::<Vec<_>>()),
    );

    for e in eps_list {
        let eps_f = Scalar::to_f64(&e.get::<Rational>());
        let claimed_pt = FCoefficients::<f64>::claimed_optimum();
        let grad_claimed = norm(&grad_q2(&claimed_pt, eps_f, 1e-5));
        let name = format!("optimize-q2 eps={e}");
        match optimize_q2(eps_f, &strategy) {
            Ok(o) => {
                let grad = norm(&grad_q2(&FCoefficients::from_slice(&o.argmax)?, eps_f, 1e-5));
                let delta = o.value - o.claimed_value;
                let passed = o.distance_to_claimed <= tol && delta.abs() <= 1e-9 && grad_claimed < 1e-8;
                out.push(
                    name,
                    passed,
                    json!({
                        "eps": e,
                        "argmax": o.argmax,
                        "value": o.value,
                        "gradNorm": grad,
                        "claimedValue": o.claimed_value,
                        "delta": delta,
                        "distanceToClaimed": o.distance_to_claimed,
                        "gradNormAtClaimed": grad_claimed,
                        "reducedAtClaimed": reduced_q2(&1.0, &1.0, &eps_f),
                        "halfWidth": o.half_width,
                        "widenings": o.widenings,
                        "onBoundary": o.on_boundary,
                        "evaluations": o.evaluations,
                    }),
                );
            }
            Err(err @ (pinchlab::Error::NonConvergence { .. } | pinchlab::Error::InvariantViolation { .. })) => {
                out.push(name, false, json!({ "eps": e, "error": err.to_string() }));
            }
            Err(err) => return Err(err.into()),
        }
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn expand_fsq(cfg: &RunConfig, out: &mut Sections) -> Result<(), CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let models = cfg.count.unwrap_or(0);
    let per = cfg.coeff_count.unwrap_or(1);
    let fixed = cfg.coeffs.as_deref();
    for &n in cfg.n.as_deref().unwrap_or(&[4]) {
        if n != 4 {
            out.notes.push(format!("expand-fsq: the |F|^2 formula is stated for n = 4; n = {n} skipped"));
            continue;
        }
        let block = Exact::ratio(0, 1);
        let detail = match cfg.arithmetic.unwrap_or(Arithmetic::Rational) {
            Arithmetic::Rational => fsq_block::<Rational>(seed, n, &block, models, per, fixed)?,
            Arithmetic::Float => fsq_block::<f64>(seed, n, &block, models, per, fixed)?,
        };
        let passed = detail.failures == 0;
        out.push(format!("|F|^2 expansion n={n}"), passed, serde_json::to_value(&detail).expect("plain data"));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FsqSummary {
    models: usize,
    coefficient_vectors: usize,
    expansions: usize,
    failures: usize,
    max_abs_residual: f64,
    first_failure: Option<Value>,
}

fn fsq_block<T: Scalar>(
    seed: u64,
    n: usize,
    block: &Exact,
    models: usize,
    per: usize,
    fixed: Option<&str>,
) -> Result<FsqSummary, CliError> {
    let fixed = fixed.map(FCoefficients::<T>::parse).transpose()?;
    let per = if fixed.is_some() { 1 } else { per };
    let results = (0..models)
        .into_par_iter()
        .map(|m| -> Result<Vec<(f64, bool, Option<Value>)>, pinchlab::Error> {
            let gm = sample_gradient_model::<T>(n, sub_seed(seed, n, block, m))?;
            (0..per)
                .map(|k| {
                    let c = match &fixed {
                        Some(c) => c.clone(),
                        None => sample_coefficients::<T>(sub_seed(seed ^ 0xf5, n, block, m * per + k)),
                    };
                    let e = f_norm_expansion(&gm, &c)?;
                    let res = e.residual();
                    let scale = Scalar::to_f64(&e.direct).abs();
                    let ok = res.is_negligible(scale, 1e-10);
                    let dump = (!ok).then(|| json!({ "model": m, "coeffs": c.to_json(), "residual": res.to_json() }));
                    Ok((Scalar::to_f64(&res).abs(), ok, dump))
                })
                .collect()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let flat: Vec<_> = results.into_iter().flatten().collect();
    Ok(FsqSummary {
        models,
        coefficient_vectors: per,
        expansions: flat.len(),
        failures: flat.iter().filter(|r| !r.1).count(),
        max_abs_residual: flat.iter().map(|r| r.0).fold(0.0, f64::max),
        first_failure: flat.into_iter().find_map(|r| r.2),
    })
}

fn threshold_and_identities(m: &ModelGeometry, eps: Option<&Exact>, oracle: Option<usize>, out: &mut Sections) -> Result<(), CliError> {
    let t = pinching_threshold(m, oracle)?;
    let mut detail = serde_json::to_value(&t).expect("plain data");
    if let Value::Object(map) = &mut detail {
        map.insert("model".to_owned(), m.to_json());
    }
    if let (Some(e), Value::Object(map)) = (eps, &mut detail) {
        let e: Rational = e.get();
        let meets = m.min_sec.clone() >= e.clone() * m.scalar();
        map.insert("eps".to_owned(), json!(e.to_string()));
        map.insert("pinchedAtEps".to_owned(), json!(meets));
    }
    // Pinching at 1/24 with R > 0 should force an Einstein metric.
    let rigid = !(t.branch == "positive" && t.passes_1_24) || m.einstein;
    out.push(format!("threshold {}", m.name), rigid, detail);
    match soliton_identity_check(m) {
        Ok(checks) => {
            for c in checks {
                let holds = c.holds();
                out.push(
                    format!("identity {}: {}", m.name, c.identity),
                    holds,
                    serde_json::to_value(&c).expect("plain data"),
                );
            }
        }
        Err(pinchlab::Error::NoClosedFormPotential(name)) => {
            out.notes.push(format!("{name}: not a gradient soliton; identities not evaluated"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn model_command(cfg: &RunConfig, out: &mut Sections) -> Result<(), CliError> {
    let name = cfg.model.as_deref().expect("resolved");
    let m = model(name)?;
    let eps = cfg.eps.as_ref().and_then(|e| e.first());
    threshold_and_identities(&m, eps, cfg.oracle_samples, out)
}

fn models_command(cfg: &RunConfig, out: &mut Sections) -> Result<(), CliError> {
    let models = shipped_models();
    for m in &models {
        threshold_and_identities(m, None, cfg.oracle_samples, out)?;
    }
    let mut table_models = models;
    table_models.push(model("product_spheres(1,2)")?);
    out.literature = Some(comparison_table(&table_models)?);
    Ok(())
}

fn identities(cfg: &RunConfig, out: &mut Sections) -> Result<(), CliError> {
    for m in shipped_models() {
        for c in soliton_identity_check(&m)? {
            out.push(
                format!("identity {}: {}", m.name, c.identity),
                c.holds(),
                serde_json::to_value(&c).expect("plain data"),
            );
        }
    }
    let count = cfg.count.unwrap_or(0);
    let seed = cfg.seed.unwrap_or(0);
    for &n in cfg.n.as_deref().unwrap_or(&[]) {
        let detail = match cfg.arithmetic.unwrap_or(Arithmetic::Rational) {
            Arithmetic::Rational => gap_block::<Rational>(n, count, seed)?,
            Arithmetic::Float => gap_block::<f64>(n, count, seed)?,
        };
        let passed = detail["failures"] == json!(0);
        out.push(format!("eigenvalue gap n={n}"), passed, detail);
    }
    Ok(())
}

/// Random traceless vectors (inequality; equality flag agrees with the
/// "all other entries equal" test) plus constructed equality cases.
fn gap_block<T: Scalar>(n: usize, count: usize, seed: u64) -> Result<Value, CliError> {
    let tag = Exact::ratio(-1, 1);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let random = (0..count)
        .into_par_iter()
        .map(|k| -> Result<usize, pinchlab::Error> {
            let lambda = sample_traceless::<T>(n, sub_seed(seed, n, &tag, k));
            let mut bad = 0;
            for &(i, j) in &pairs {
                let g = eigen_gap_lemma(&lambda, i, j)?;
                let scale = Scalar::to_f64(&g.lhs).abs();
                let holds = (g.lhs.clone() - g.rhs.clone()).is_nonneg_within(scale, 1e-12);
                let others: Vec<&T> = (0..n).filter(|&k| k != i && k != j).map(|k| &lambda[k]).collect();
                let flat = others.windows(2).all(|w| (w[0].clone() - w[1].clone()).is_negligible(scale, 1e-12));
                if !holds || g.equality != flat {
                    bad += 1;
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let constructed = pairs
        .par_iter()
        .enumerate()
        .map(|(p, &(i, j))| -> Result<usize, pinchlab::Error> {
            let lambda = equality_case::<T>(n, i, j, sub_seed(seed ^ 0xe9, n, &tag, p));
            Ok(usize::from(!eigen_gap_lemma(&lambda, i, j)?.equality))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let failures: usize = random.iter().sum::<usize>() + constructed.iter().sum::<usize>();
    Ok(json!({
        "n": n,
        "vectors": count,
        "pairs": pairs.len(),
        "equalityCases": constructed.len(),
        "failures": failures,
    }))
}

/// Writes `report` under `dir` as `<command>-<unix millis>-seed<seed>.json`,
/// never replacing an existing file.
pub fn persist(report: &RunReport, dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let millis = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let cmd = serde_json::to_value(report.config.command)?;
    let cmd = cmd.as_str().unwrap_or("run").to_owned();
    let seed = report.config.seed.unwrap_or(0);
    let bytes = emit::emit(report, Format::Json);
    for attempt in 0.. {
        let suffix = if attempt == 0 { String::new() } else { format!("-{attempt}") };
        let path = dir.join(format!("{cmd}-{millis}-seed{seed}{suffix}.json"));
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                f.write_all(&bytes)?;
                return Ok(path);
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("unbounded attempts")
}
