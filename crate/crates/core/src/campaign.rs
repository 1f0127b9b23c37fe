//! Seeded Monte Carlo campaigns over both estimates and their convex
//! combination.
//!
//! Sample `i` of block `(n, ε)` is generated from its own sub-seed, derived
//! from the campaign seed, the block and `i`. Samples are evaluated in
//! parallel and aggregated in index order, so reports do not depend on the
//! thread count.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimates::{
    certify, sample_sigma_profile, EstimateEvaluation, EstimateReport, EstimateSource,
    SamplerKind,
};
use crate::scalar::{degenerate_pinching, Arithmetic, Exact, Rational, Scalar};
use crate::sectional::SearchOptions;
use crate::tensor::{random_curvature, shift_to_pinching, AlgCurvTensor};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    /// Eigenbasis σ-profiles, pinched by construction.
    #[default]
    Profile,
    /// Bianchi-projected random tensors shifted to `Sec >= εR`.
    Tensor,
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "profile" => Ok(Self::Profile),
            "tensor" | "full-tensor" => Ok(Self::Tensor),
            _ => Err(Error::ParseNumber {
                input: s.to_owned(),
                reason: "source must be profile or tensor",
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub n: Vec<usize>,
    pub eps: Vec<Exact>,
    pub s: Vec<Exact>,
    /// Samples per `(n, ε)` block.
    pub count: usize,
    pub seed: u64,
    pub source: SourceKind,
    pub arithmetic: Arithmetic,
    pub distribution: SamplerKind,
    /// Tensor source: the shift leaves `Sec − εR >= margin·(1 − n(n−1)ε)`.
    pub margin: Exact,
    /// Added to the coefficient `(1 − n²ε)/n` of the first estimate. Any
    /// nonzero value should make the campaign report violations.
    pub fault_rhs1_coefficient: Option<Exact>,
    /// Cap on the number of violating samples dumped in full.
    pub max_dumps: usize,
    /// Keep per-sample gaps for CSV export.
    pub record_gaps: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            n: vec![4],
            eps: vec![Exact::ratio(0, 1), Exact::ratio(1, 48), Exact::ratio(1, 24)],
            s: [(0, 1), (1, 2), (3, 4), (7, 8), (1, 1)]
                .into_iter()
                .map(|(p, q)| Exact::ratio(p, q))
                .collect(),
            count: 1000,
            seed: 0,
            source: SourceKind::Profile,
            arithmetic: Arithmetic::Rational,
            distribution: SamplerKind::HalfNormal,
            margin: Exact::ratio(1, 1_000_000),
            fault_rhs1_coefficient: None,
            max_dumps: 10,
            record_gaps: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Totals {
    pub blocks: usize,
    pub skipped_blocks: usize,
    pub samples: usize,
    /// One check is one sample at one `s`.
    pub checks: usize,
    /// Samples failing at least one check.
    pub violations: usize,
    /// Tensor samples whose `Sec >= εR` certificate failed after the shift.
    pub uncertified: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockSummary {
    pub n: usize,
    pub eps: Exact,
    /// Set when `ε >= 1/(n(n−1))` and the block was not run.
    pub skipped: Option<String>,
    pub samples: usize,
    pub violations: usize,
    pub uncertified: usize,
    pub min_gap1: Option<Value>,
    pub min_gap2: Option<Value>,
    pub min_gap_convex: Vec<Value>,
    /// Largest `|gap1 − Σ(λ_i − λ_j)²σ̄_ij|` (profiles) and largest identity
    /// residual of the `R̄m` route; exactly 0 in rational mode.
    pub max_slack_residual: f64,
    pub max_equno_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GapRow {
    pub n: usize,
    pub eps: String,
    pub index: usize,
    pub s: String,
    pub gap1: String,
    pub gap2: String,
    pub gap_convex: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub totals: Totals,
    pub min_gap1: Option<Value>,
    pub min_gap2: Option<Value>,
    /// One entry per configured `s`, in order.
    pub min_gap_convex: Vec<Value>,
    pub blocks: Vec<BlockSummary>,
    pub violations: Vec<Value>,
    /// The sample with the smallest gap relative to its scale.
    pub worst: Option<Value>,
    /// Seconds; excluded from [`CampaignReport::digest`].
    pub wall_time: f64,
    #[serde(skip)]
    pub gaps: Vec<GapRow>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.totals.violations == 0 && self.totals.uncertified == 0
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report is plain data")
    }

    /// SHA-256 of the canonical JSON report without `wallTime`.
    pub fn digest(&self) -> String {
        let mut doc = self.to_json();
        if let Value::Object(map) = &mut doc {
            map.remove("wallTime");
        }
        hex_digest(&doc)
    }

    /// `n,eps,index,s,gap1,gap2,gap_convex`, one row per sample and `s`.
    /// Empty unless the campaign ran with `record_gaps`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,eps,index,s,gap1,gap2,gap_convex\n");
        for r in &self.gaps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n, r.eps, r.index, r.s, r.gap1, r.gap2, r.gap_convex
            );
        }
        out
    }
}

/// SHA-256 (lowercase hex) of a JSON document's canonical serialization.
pub fn hex_digest(doc: &Value) -> String {
    let bytes = serde_json::to_vec(doc).expect("serializable");
    Sha256::digest(&bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed of sample `index` in block `(n, eps)`. Depends on the values of
/// `n` and `eps`, not on their position in the config.
pub fn sub_seed(seed: u64, n: usize, eps: &Exact, index: usize) -> u64 {
    let tag = Sha256::digest(format!("{n}:{eps}").as_bytes());
    let block = u64::from_le_bytes(tag[..8].try_into().expect("8 bytes"));
    splitmix64(splitmix64(splitmix64(seed) ^ block) ^ index as u64)
}

pub fn mc_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    match config.arithmetic {
        Arithmetic::Rational => run::<Rational>(config),
        Arithmetic::Float => run::<f64>(config),
    }
}

enum Source<T> {
    Profile(crate::estimates::SigmaProfile<T>),
    Tensor(AlgCurvTensor<T>),
}

impl<T: Scalar> Source<T> {
    fn as_estimate(&self) -> EstimateSource<'_, T> {
        match self {
            Source::Profile(p) => EstimateSource::Profile(p),
            Source::Tensor(t) => EstimateSource::Tensor(t),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Source::Profile(p) => json!({ "profile": p.to_json() }),
            Source::Tensor(t) => json!({ "tensor": t.to_json() }),
        }
    }
}

fn generate<T: Scalar>(config: &CampaignConfig, n: usize, eps: &T, seed: u64) -> Result<Source<T>> {
    match config.source {
        SourceKind::Profile => {
            sample_sigma_profile(n, eps, seed, config.distribution).map(Source::Profile)
        }
        SourceKind::Tensor => {
            let raw = random_curvature::<T>(n, seed)?;
            let margin = config.margin.get::<T>();
            shift_to_pinching(&raw, eps, &margin, &SearchOptions::campaign()).map(Source::Tensor)
        }
    }
}

struct Outcome<T> {
    index: usize,
    uncertified: bool,
    reports: Vec<EstimateReport<T>>,
    scale: f64,
    /// Smallest gap over all checks divided by `scale`.
    relative_gap: f64,
}

impl<T: Scalar> Outcome<T> {
    fn passed(&self) -> bool {
        !self.uncertified && self.reports.iter().all(|r| r.passed)
    }

    fn failures(&self, s_values: &[Exact]) -> Vec<String> {
        let mut out = Vec::new();
        if self.uncertified {
            out.push("certificate Sec >= eps R".to_owned());
        }
        let Some(first) = self.reports.first() else {
            return out;
        };
        if !first.gap1.is_nonneg_within(self.scale, crate::estimates::FLOAT_GAP_TOL) {
            out.push("estimate 1".to_owned());
        }
        if !first.gap2.is_nonneg_within(self.scale, crate::estimates::FLOAT_GAP_TOL) {
            out.push("estimate 2".to_owned());
        }
        for (r, s) in self.reports.iter().zip(s_values) {
            if !r.gap_convex.is_nonneg_within(self.scale, crate::estimates::FLOAT_GAP_TOL) {
                out.push(format!("convex combination s={s}"));
            }
        }
        if !first.equno_residual.is_negligible(self.scale, crate::estimates::FLOAT_GAP_TOL) {
            out.push("equno identity".to_owned());
        }
        if let Some(res) = &first.slack_residual {
            if !res.is_negligible(self.scale, crate::estimates::FLOAT_GAP_TOL) {
                out.push("slack identity".to_owned());
            }
        }
        out
    }
}

fn evaluate<T: Scalar>(
    config: &CampaignConfig,
    eps: &T,
    s_values: &[T],
    source: &Source<T>,
    index: usize,
) -> Result<Outcome<T>> {
    let uncertified = match certify(source.as_estimate(), eps, &SearchOptions::campaign()) {
        Ok(()) => false,
        Err(Error::Uncertified { .. }) => true,
        Err(e) => return Err(e),
    };
    let mut eval = EstimateEvaluation::new(source.as_estimate(), eps);
    if let Some(delta) = &config.fault_rhs1_coefficient {
        let shift = delta.get::<T>() * eval.inv.r.clone() * eval.inv.ric_norm_sq.clone();
        eval.rhs1 = eval.rhs1.clone() + shift.clone();
        if let Some(res) = &mut eval.slack_residual {
            *res = res.clone() + shift;
        }
    }
    let reports = s_values
        .iter()
        .map(|s| eval.report(s))
        .collect::<Result<Vec<_>>>()?;
    let mut scale = eval.scale();
    for r in &reports {
        scale = scale.max(r.rhs_convex.to_f64().abs());
    }
    let relative_gap = reports
        .iter()
        .flat_map(|r| [&r.gap1, &r.gap2, &r.gap_convex])
        .map(|g| g.to_f64() / scale)
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        index,
        uncertified,
        reports,
        scale,
        relative_gap,
    })
}

fn min_into<T: Scalar>(slot: &mut Option<T>, v: &T) {
    if slot.as_ref().is_none_or(|m| v < m) {
        *slot = Some(v.clone());
    }
}

fn run<T: Scalar>(config: &CampaignConfig) -> Result<CampaignReport> {
    let start = Instant::now();
    let s_values: Vec<T> = config.s.iter().map(Exact::get).collect();
    for s in &s_values {
        if *s < T::zero() || *s > T::one() {
            return Err(Error::WeightOutOfRange(s.to_string()));
        }
    }

    let mut totals = Totals::default();
    let mut blocks = Vec::new();
    let mut global1: Option<T> = None;
    let mut global2: Option<T> = None;
    let mut global_convex: Vec<Option<T>> = vec![None; s_values.len()];
    let mut violations = Vec::new();
    let mut worst: Option<(f64, Value)> = None;
    let mut gaps = Vec::new();

    for &n in &config.n {
        for eps_exact in &config.eps {
            totals.blocks += 1;
            let eps: T = eps_exact.get();
            let mut summary = BlockSummary {
                n,
                eps: eps_exact.clone(),
                skipped: None,
                samples: 0,
                violations: 0,
                uncertified: 0,
                min_gap1: None,
                min_gap2: None,
                min_gap_convex: Vec::new(),
                max_slack_residual: 0.0,
                max_equno_residual: 0.0,
            };
            if eps >= degenerate_pinching::<T>(n) {
                totals.skipped_blocks += 1;
                summary.skipped = Some(format!("eps >= 1/{}", n * (n - 1)));
                blocks.push(summary);
                continue;
            }

            let outcomes = (0..config.count)
                .into_par_iter()
                .map(|i| {
                    let seed = sub_seed(config.seed, n, eps_exact, i);
                    let source = generate(config, n, &eps, seed)?;
                    evaluate(config, &eps, &s_values, &source, i)
                })
                .collect::<Result<Vec<_>>>()?;

            let mut min1: Option<T> = None;
            let mut min2: Option<T> = None;
            let mut min_convex: Vec<Option<T>> = vec![None; s_values.len()];
            for o in &outcomes {
                summary.samples += 1;
                totals.samples += 1;
                totals.checks += o.reports.len();
                if o.uncertified {
                    summary.uncertified += 1;
                    totals.uncertified += 1;
                }
                if let Some(first) = o.reports.first() {
                    min_into(&mut min1, &first.gap1);
                    min_into(&mut min2, &first.gap2);
                    summary.max_equno_residual = summary
                        .max_equno_residual
                        .max(first.equno_residual.to_f64().abs());
                    if let Some(res) = &first.slack_residual {
                        summary.max_slack_residual =
                            summary.max_slack_residual.max(res.to_f64().abs());
                    }
                }
                for (slot, r) in min_convex.iter_mut().zip(&o.reports) {
                    min_into(slot, &r.gap_convex);
                }
                if config.record_gaps {
                    for (r, s) in o.reports.iter().zip(&config.s) {
                        gaps.push(GapRow {
                            n,
                            eps: eps_exact.to_string(),
                            index: o.index,
                            s: s.to_string(),
                            gap1: r.gap1.to_string(),
                            gap2: r.gap2.to_string(),
                            gap_convex: r.gap_convex.to_string(),
                        });
                    }
                }
                let failed = !o.passed();
                let is_worst = worst.as_ref().is_none_or(|w| o.relative_gap < w.0);
                if failed || is_worst {
                    let dump = dump(config, n, eps_exact, &eps, o)?;
                    if failed {
                        summary.violations += 1;
                        totals.violations += 1;
                        if violations.len() < config.max_dumps {
                            violations.push(dump.clone());
                        }
                    }
                    if is_worst {
                        worst = Some((o.relative_gap, dump));
                    }
                }
            }
            if let Some(m) = &min1 {
                min_into(&mut global1, m);
            }
            if let Some(m) = &min2 {
                min_into(&mut global2, m);
            }
            for (g, m) in global_convex.iter_mut().zip(&min_convex) {
                if let Some(m) = m {
                    min_into(g, m);
                }
            }
            summary.min_gap1 = min1.as_ref().map(Scalar::to_json);
            summary.min_gap2 = min2.as_ref().map(Scalar::to_json);
            summary.min_gap_convex = min_convex
                .iter()
                .map(|m| m.as_ref().map_or(Value::Null, Scalar::to_json))
                .collect();
            blocks.push(summary);
        }
    }

    Ok(CampaignReport {
        config: config.clone(),
        totals,
        min_gap1: global1.as_ref().map(Scalar::to_json),
        min_gap2: global2.as_ref().map(Scalar::to_json),
        min_gap_convex: global_convex
            .iter()
            .map(|m| m.as_ref().map_or(Value::Null, Scalar::to_json))
            .collect(),
        blocks,
        violations,
        worst: worst.map(|w| w.1),
        wall_time: start.elapsed().as_secs_f64(),
        gaps,
    })
}

/// Full reproduction data for one sample.
fn dump<T: Scalar>(
    config: &CampaignConfig,
    n: usize,
    eps_exact: &Exact,
    eps: &T,
    o: &Outcome<T>,
) -> Result<Value> {
    let seed = sub_seed(config.seed, n, eps_exact, o.index);
    let source = generate(config, n, eps, seed)?;
    let checks: Vec<Value> = o
        .reports
        .iter()
        .zip(&config.s)
        .map(|(r, s)| {
            json!({
                "s": s,
                "rhsConvex": r.rhs_convex.to_json(),
                "gapConvex": r.gap_convex.to_json(),
                "passed": r.passed,
            })
        })
        .collect();
    let first = o.reports.first();
    Ok(json!({
        "n": n,
        "eps": eps_exact,
        "index": o.index,
        "subSeed": seed,
        "source": source.to_json(),
        "lhs": first.map(|r| r.lhs.to_json()),
        "rhs1": first.map(|r| r.rhs1.to_json()),
        "rhs2": first.map(|r| r.rhs2.to_json()),
        "gap1": first.map(|r| r.gap1.to_json()),
        "gap2": first.map(|r| r.gap2.to_json()),
        "equnoResidual": first.map(|r| r.equno_residual.to_json()),
        "slackResidual": first.and_then(|r| r.slack_residual.as_ref().map(Scalar::to_json)),
        "checks": checks,
        "failures": o.failures(&config.s),
        "relativeGap": o.relative_gap,
    }))
}
