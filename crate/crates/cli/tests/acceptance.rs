//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_DIVERGENCES` print FAIL but do not fail the
//! process; set `PINCHLAB_STRICT_ACCEPTANCE=1` to make every FAIL fatal.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde_json::Value;

use pinchlab::campaign::{mc_campaign, sub_seed, CampaignConfig, SourceKind};
use pinchlab::estimates::{
    convex_coefficients, eigen_gap_lemma, equality_case, rhs_convex, rhs_estimate1, rhs_estimate2,
    sample_sigma_profile, sample_traceless, PinchingParams, SamplerKind,
};
use pinchlab::functional::{
    f_norm_expansion, f_tensor, optimal_b, optimize_q2, q1, q2, s_coefficient, sample_coefficients,
    sample_gradient_model, FCoefficients, GradientModel, OptimizeStrategy,
};
use pinchlab::models::{model, pinching_threshold, shipped_models, soliton_identity_check, Potential};
use pinchlab::sectional::{min_sectional, SearchOptions};
use pinchlab::tensor::{random_curvature, shift_to_pinching};
use pinchlab::{AlgCurvTensor, Arithmetic, Exact, Rational, Scalar};

const KNOWN_DIVERGENCES: &[&str] = &["AC6"];

type Outcome = Result<String, String>;

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Independent oracles.

struct Brute {
    r: Rational,
    lambda: Vec<Rational>,
    lhs: Rational,
    norm: Rational,
    cubic: Rational,
}

/// Ricci, scalar curvature and the three contractions by index loops.
fn brute(rm: &AlgCurvTensor<Rational>) -> Brute {
    let n = rm.dim();
    let mut ric = vec![Rational::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                ric[i * n + k] += rm.get(i, j, k, j).clone();
            }
        }
    }
    let r: Rational = (0..n).map(|i| ric[i * n + i].clone()).sum();
    let nn = Rational::from_int(n as i64);
    let mut t = ric.clone();
    for i in 0..n {
        t[i * n + i] -= r.clone() / nn.clone();
    }
    let mut lhs = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = rm.get(i, j, k, l);
                    if !v.is_zero() {
                        lhs += v.clone() * t[i * n + k].clone() * t[j * n + l].clone();
                    }
                }
            }
        }
    }
    let norm: Rational = t.iter().map(|x| x.clone() * x.clone()).sum();
    let mut cubic = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                cubic += t[i * n + j].clone() * t[j * n + k].clone() * t[k * n + i].clone();
            }
        }
    }
    let lambda = (0..n).map(|i| t[i * n + i].clone()).collect();
    Brute { r, lambda, lhs, norm, cubic }
}

fn c1(n: i64, e: &Rational) -> Rational {
    (Rational::one() - Rational::from_int(n * n) * e.clone()) / Rational::from_int(n)
}

fn c2(n: i64, e: &Rational) -> Rational {
    (Rational::from_int(n * n - 4 * n + 2) - Rational::from_int(n * n * (n - 2) * (n - 3)) * e.clone())
        / Rational::from_int(2 * n)
}

/// `Q₂` written out term by term, in floats.
fn q2_oracle(x: &[f64; 5], eps: f64) -> f64 {
    let [a1, a2, b1, b2, b3] = *x;
    let d = 1.0 + a1 * a1 + a2 * a2;
    let p = a1 + a2 + a1 * a2;
    let bracket = a1 * (b1 + b3) + a2 * (b1 + b2) + b2 + b3
        + 8.0 * (b1 * b1 + b2 * b2 + b3 * b3)
        + 4.0 * (b1 * b2 + b1 * b3 + b2 * b3);
    p / (4.0 * d) - (1.0 - 16.0 * eps) * (d + p) / (2.0 * d) - bracket / d
}

fn fd_grad_norm(x: &[f64; 5], eps: f64) -> f64 {
    let h = 1e-5;
    let mut sq = 0.0;
    for i in 0..5 {
        let (mut up, mut down) = (*x, *x);
        up[i] += h;
        down[i] -= h;
        let g = (q2_oracle(&up, eps) - q2_oracle(&down, eps)) / (2.0 * h);
        sq += g * g;
    }
    sq.sqrt()
}

/// xorshift64* uniform in [0, 1).
struct Xs(u64);

impl Xs {
    fn next(&mut self) -> f64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        (self.0.wrapping_mul(0x2545_f491_4f6c_dd1d) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn normal(&mut self) -> f64 {
        let u = self.next().max(1e-300);
        let v = self.next();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }
}

/// Minimum of `R(x, y, x, y)` over random orthonormal pairs.
fn sampled_min_sec(rm: &AlgCurvTensor<Rational>, planes: usize, seed: u64) -> f64 {
    let n = rm.dim();
    let r: Vec<f64> = (0..n.pow(4))
        .map(|p| Scalar::to_f64(rm.get(p / n.pow(3), p / n.pow(2) % n, p / n % n, p % n)))
        .collect();
    let mut rng = Xs(seed | 1);
    let mut best = f64::INFINITY;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..planes {
        x.iter_mut().for_each(|v| *v = rng.normal());
        y.iter_mut().for_each(|v| *v = rng.normal());
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        let d: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        y.iter_mut().zip(&x).for_each(|(b, a)| *b -= d * a);
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= ny);
        let mut sec = 0.0;
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        sec += r[((i * n + j) * n + k) * n + l] * xy * x[k] * y[l];
                    }
                }
            }
        }
        best = best.min(sec);
    }
    best
}

// ---------------------------------------------------------------------------
// Criteria.

fn s_values() -> Vec<Exact> {
    [(0, 1), (1, 2), (3, 4), (7, 8), (1, 1)].iter().map(|&(p, d)| Exact::ratio(p, d)).collect()
}

fn proposition_config() -> CampaignConfig {
    CampaignConfig {
        n: vec![3, 4, 5, 6],
        eps: [(-1, 10), (0, 1), (1, 48), (1, 24)].iter().map(|&(p, d)| Exact::ratio(p, d)).collect(),
        s: s_values(),
        count: 100_000,
        seed: 2024,
        source: SourceKind::Profile,
        arithmetic: Arithmetic::Rational,
        ..CampaignConfig::default()
    }
}

const ORACLE_SUBSAMPLE: usize = 300;

/// Regenerates the first samples of every block and checks them against
/// the index-loop oracle.
fn oracle_subsample(config: &CampaignConfig, with_convex: bool) -> Result<usize, String> {
    let mut checked = 0;
    for &n in &config.n {
        for e in &config.eps {
            let eps: Rational = e.get();
            if eps >= q(1, (n * (n - 1)) as i64) {
                continue;
            }
            let ni = n as i64;
            for i in 0..ORACLE_SUBSAMPLE {
                let seed = sub_seed(config.seed, n, e, i);
                let p = sample_sigma_profile::<Rational>(n, &eps, seed, SamplerKind::HalfNormal)
                    .map_err(|err| err.to_string())?;
                let b = brute(&p.to_tensor());
                let inv = p.invariants();
                ensure(inv.lhs == b.lhs && inv.r == b.r && inv.ric_norm_sq == b.norm && inv.ric_cubic == b.cubic, || {
                    format!("invariants disagree with index loops at n={n} eps={e} i={i}")
                })?;
                let rn = b.r.clone() * b.norm.clone();
                let rhs1 = c1(ni, &eps) * rn.clone() + b.cubic.clone();
                let rhs2 = c2(ni, &eps) * rn.clone() - Rational::from_int(ni - 1) * b.cubic.clone();
                let mut slack = Rational::zero();
                for a in 0..n {
                    for c in a + 1..n {
                        let d = b.lambda[a].clone() - b.lambda[c].clone();
                        slack += d.clone() * d * (p.sigma(a, c).clone() - eps.clone() * b.r.clone());
                    }
                }
                ensure(rhs1.clone() - b.lhs.clone() == slack, || format!("slack identity fails at n={n} eps={e} i={i}"))?;
                ensure(rhs2.clone() >= b.lhs, || format!("estimate 2 fails at n={n} eps={e} i={i}"))?;
                if with_convex {
                    for s in &config.s {
                        let s: Rational = s.get();
                        let params = PinchingParams::new(eps.clone(), s.clone()).map_err(|err| err.to_string())?;
                        let lib = rhs_convex(n, &params, &inv).map_err(|err| err.to_string())?;
                        let mix = (Rational::one() - s.clone()) * rhs2.clone() + s.clone() * rhs1.clone();
                        ensure(lib == mix && mix >= b.lhs, || format!("convex bound s={s} at n={n} eps={e} i={i}"))?;
                        if s.is_zero() {
                            ensure(lib == rhs_estimate2(n, &params, &inv), || "s=0 endpoint".to_owned())?;
                        }
                        if s.is_one() {
                            ensure(lib == rhs_estimate1(n, &params, &inv), || "s=1 endpoint".to_owned())?;
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn ac1_ac2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let config = proposition_config();
    let report = match mc_campaign(&config) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let campaign_secs = start.elapsed().as_secs_f64();
    let skipped: Vec<String> = report
        .blocks
        .iter()
        .filter(|b| b.skipped.is_some())
        .map(|b| format!("n={} eps={}", b.n, b.eps))
        .collect();
    let slack_max = report.blocks.iter().map(|b| b.max_slack_residual).fold(0.0, f64::max);
    let equno_max = report.blocks.iter().map(|b| b.max_equno_residual).fold(0.0, f64::max);

    let ac1 = (|| {
        ensure(report.totals.violations == 0, || format!("{} violating samples", report.totals.violations))?;
        ensure(slack_max == 0.0 && equno_max == 0.0, || format!("slack residual {slack_max}, eigenbasis residual {equno_max}"))?;
        ensure(skipped == ["n=6 eps=1/24"], || format!("unexpected skipped blocks {skipped:?}"))?;
        ensure(campaign_secs < 60.0, || format!("campaign took {campaign_secs:.1}s (target < 60s)"))?;
        let checked = oracle_subsample(&config, false)?;
        Ok(format!(
            "{} rational profiles in {} blocks ({} skipped: eps >= 1/(n(n-1))), 0 violations, slack residual 0, {checked} re-checked by index loops, campaign {campaign_secs:.1}s",
            report.totals.samples,
            report.totals.blocks - report.totals.skipped_blocks,
            report.totals.skipped_blocks
        ))
    })();

    let ac2 = (|| {
        ensure(report.totals.violations == 0, || "convex bound violated".to_owned())?;
        for (k, m) in report.min_gap_convex.iter().enumerate() {
            let v: Rational = Rational::from_json(m).map_err(|e| e.to_string())?;
            ensure(!v.is_negative(), || format!("min convex gap {v} for s index {k}"))?;
        }
        let checked = oracle_subsample(&config, true)?;
        for s in 0..=8 {
            let s = q(s, 8);
            let (_, cubic) = convex_coefficients(4, &Rational::zero(), &s);
            ensure(cubic == -(q(3, 1) - q(4, 1) * s.clone()), || format!("cubic coefficient at s={s}"))?;
        }
        let (_, at) = convex_coefficients(4, &Rational::zero(), &q(3, 4));
        ensure(at.is_zero(), || format!("cubic coefficient at n=4, eps=0, s=3/4 is {at}"))?;
        Ok(format!(
            "{} bounds over s in {{0,1/2,3/4,7/8,1}}, 0 violations; endpoints exact on {checked} profiles; cubic coefficient 0 at n=4, eps=0, s=3/4",
            report.totals.checks
        ))
    })();
    (ac1, ac2)
}

fn ac3() -> Outcome {
    let config = CampaignConfig {
        n: vec![4],
        eps: vec![Exact::ratio(0, 1), Exact::ratio(1, 24)],
        s: s_values(),
        count: 1000,
        seed: 77,
        source: SourceKind::Tensor,
        arithmetic: Arithmetic::Float,
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = mc_campaign(&config).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(report.totals.violations == 0, || format!("{} violations", report.totals.violations))?;
    ensure(report.totals.uncertified == 0, || format!("{} uncertified", report.totals.uncertified))?;
    ensure(secs < 300.0, || format!("took {secs:.1}s"))?;
    // Re-check the hypothesis on a few regenerated tensors with random planes.
    let mut worst = f64::INFINITY;
    for e in &config.eps {
        let eps: f64 = e.get();
        for i in 0..10 {
            let seed = sub_seed(config.seed, 4, e, i);
            let raw = random_curvature::<f64>(4, seed).map_err(|e| e.to_string())?;
            let margin: f64 = config.margin.get();
            let t = shift_to_pinching(&raw, &eps, &margin, &SearchOptions::campaign()).map_err(|e| e.to_string())?;
            let r = t.scalar();
            let min = min_sectional(&t, &SearchOptions::default()).map_err(|e| e.to_string())?.value;
            ensure(min >= eps * r - 1e-10 * r.abs().max(1.0), || format!("sample {i}: min sec {min} < {eps} R"))?;
            worst = worst.min((min - eps * r) / r.abs().max(1.0));
        }
    }
    Ok(format!(
        "{} Bianchi-projected tensors (eps 0, 1/24), 0 violations, 0 uncertified, min relative pinching slack {worst:.2e} on re-check, {secs:.1}s",
        report.totals.samples
    ))
}

fn ac4() -> Outcome {
    let mut count = 0;
    let mut models = 0;
    for m in 0..1000u64 {
        let gm: GradientModel<Rational> = sample_gradient_model(4, 0xf00d ^ m).map_err(|e| e.to_string())?;
        models += 1;
        let grad_ric: Rational = (0..64).map(|p| gm.s(p / 16, p / 4 % 4, p % 4).clone()).map(|x| x.clone() * x).sum();
        let mut mixed = Rational::zero();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    mixed += gm.s(i, j, k).clone() * gm.s(i, k, j).clone();
                }
            }
        }
        let grad_r: Rational = gm.w().iter().map(|x| x.clone() * x.clone()).sum();
        for k in 0..100u64 {
            let c: FCoefficients<Rational> = sample_coefficients(m * 1000 + k);
            let (a1, a2, b1, b2, b3) = (&c.a1, &c.a2, &c.b1, &c.b2, &c.b3);
            // F by its definition, squared and summed.
            let mut direct = Rational::zero();
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        let mut f = gm.s(i, j, l).clone() + a1.clone() * gm.s(i, l, j).clone() + a2.clone() * gm.s(j, l, i).clone();
                        if i == j {
                            f += b1.clone() * gm.w()[l].clone();
                        }
                        if i == l {
                            f += b2.clone() * gm.w()[j].clone();
                        }
                        if j == l {
                            f += b3.clone() * gm.w()[i].clone();
                        }
                        direct += f.clone() * f;
                    }
                }
            }
            let bracket = a1.clone() * (b1.clone() + b3.clone()) + a2.clone() * (b1.clone() + b2.clone()) + b2.clone() + b3.clone()
                + q(8, 1) * (b1.clone() * b1.clone() + b2.clone() * b2.clone() + b3.clone() * b3.clone())
                + q(4, 1) * (b1.clone() * b2.clone() + b1.clone() * b3.clone() + b2.clone() * b3.clone());
            let expanded = (Rational::one() + a1.clone() * a1.clone() + a2.clone() * a2.clone()) * grad_ric.clone()
                + q(2, 1) * (a1.clone() + a2.clone() + a1.clone() * a2.clone()) * mixed.clone()
                + q(1, 2) * bracket * grad_r.clone();
            ensure(direct == expanded, || format!("model {m}, coefficients {k}: direct {direct} != formula {expanded}"))?;
            let lib = f_norm_expansion(&gm, &c).map_err(|e| e.to_string())?;
            ensure(lib.direct == direct && lib.residual().is_zero(), || format!("library expansion differs at model {m}"))?;
            ensure(f_tensor(&gm, &c).len() == 64, || "F has 64 entries".to_owned())?;
            count += 1;
        }
    }
    Ok(format!("{models} rational gradient models x 100 coefficient vectors = {count} expansions, residual exactly 0"))
}

fn ac5() -> Outcome {
    let claimed = FCoefficients::<Rational>::claimed_optimum();
    ensure(q1(&claimed) == q(1, 3), || format!("q1 = {}", q1(&claimed)))?;
    let eps_list = [q(0, 1), q(1, 48), q(1, 24), q(1, 16), q(-1, 10), q(7, 200), q(1, 17)];
    for e in &eps_list {
        let expected = (q(48, 1) * e.clone() - q(2, 1)) / q(3, 1);
        ensure(q2(&claimed, e) == expected, || format!("q2 at eps={e} is {}", q2(&claimed, e)))?;
    }
    ensure(q2(&claimed, &q(1, 24)).is_zero(), || "q2 at eps=1/24 is not 0".to_owned())?;
    let vertex = q(-1, 12);
    for e in &eps_list {
        let curve = |b: &Rational| q(-12, 1) * b.clone() * b.clone() - q(2, 1) * b.clone() + q(16, 1) * e.clone() - q(3, 4);
        let top = curve(&vertex);
        for k in 0..50 {
            let b = q(k - 25, 12 + k % 7);
            let c = FCoefficients::new(q(1, 1), q(1, 1), b.clone(), b.clone(), b.clone());
            let v = q2(&c, e);
            ensure(v == curve(&b), || format!("restricted curve mismatch at b={b}, eps={e}"))?;
            ensure(v <= top, || format!("b={b} beats the vertex at eps={e}"))?;
        }
        ensure(top == (q(48, 1) * e.clone() - q(2, 1)) / q(3, 1), || "vertex value".to_owned())?;
    }
    Ok("q1 = 1/3; q2 = (48eps-2)/3 at 7 rational eps; q2(1/24) = 0; restricted curve exact at 50 b, vertex -1/12".to_owned())
}

fn ac6() -> Outcome {
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    let b = optimal_b(&Rational::one(), &Rational::one());
    if b.iter().any(|x| *x != q(-1, 12)) {
        failed.push(format!("optimal_b(1,1) = {b:?}"));
    }
    let claimed = [1.0, 1.0, -1.0 / 12.0, -1.0 / 12.0, -1.0 / 12.0];
    for (label, eps) in [("0", 0.0), ("1/48", 1.0 / 48.0), ("1/24", 1.0 / 24.0), ("1/16", 1.0 / 16.0)] {
        let start = Instant::now();
        let out = optimize_q2(eps, &OptimizeStrategy::default());
        let secs = start.elapsed().as_secs_f64();
        let expected = (48.0 * eps - 2.0) / 3.0;
        let grad = fd_grad_norm(&claimed, eps);
        match out {
            Ok(o) => {
                let dist = o.argmax.iter().zip(&claimed).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
                let ok = dist <= 1e-6 && (o.value - expected).abs() <= 1e-9 && grad < 1e-8 && secs < 30.0;
                let line = format!(
                    "eps={label}: max {:.9} at ({}) vs claimed {expected:.9}, dist {dist:.1e}, grad {grad:.1e}, {secs:.2}s",
                    o.value,
                    o.argmax.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
                );
                if ok {
                    lines.push(line);
                } else {
                    failed.push(line);
                }
            }
            Err(e) => failed.push(format!("eps={label}: {e}")),
        }
    }
    if failed.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(format!("{} | passing: {}", failed.join("; "), lines.join("; ")))
    }
}

fn ac7() -> Outcome {
    let one = Rational::one();
    for k in 0..20 {
        let s = q(k, 19);
        let expected = q(2, 1) * (q(7, 1) - q(8, 1) * s.clone());
        ensure(s_coefficient(&one, &one, &s) == expected, || format!("s={s}"))?;
    }
    ensure(s_coefficient(&one, &one, &q(7, 8)).is_zero(), || "nonzero at s=7/8".to_owned())?;
    Ok("2(7-8s) exact at 20 rational s; zero at s=7/8".to_owned())
}

fn ac8() -> Outcome {
    let sphere = pinching_threshold(&model("sphere(4,1)").map_err(|e| e.to_string())?, None).map_err(|e| e.to_string())?;
    ensure(sphere.exact_ratio.as_deref() == Some("1/12"), || format!("S4 ratio {:?}", sphere.exact_ratio))?;
    ensure((sphere.ratio.unwrap_or(f64::NAN) - 1.0 / 12.0).abs() < 1e-9, || "S4 optimizer ratio".to_owned())?;

    let cp2 = model("cp2").map_err(|e| e.to_string())?;
    let t = pinching_threshold(&cp2, None).map_err(|e| e.to_string())?;
    let opt = t.ratio.unwrap_or(f64::NAN);
    ensure((opt - 1.0 / 24.0).abs() <= 1e-6, || format!("CP2 optimizer ratio {opt}"))?;
    let sampled = sampled_min_sec(&cp2.rm, 1_000_000, 0x0c2) / 24.0;
    ensure((sampled - 1.0 / 24.0).abs() <= 1e-3, || format!("CP2 sampled ratio {sampled}"))?;

    for name in ["s2xs2", "s3xr"] {
        let t = pinching_threshold(&model(name).map_err(|e| e.to_string())?, None).map_err(|e| e.to_string())?;
        let r = t.ratio.unwrap_or(f64::NAN);
        ensure(r.abs() <= 1e-9, || format!("{name} ratio {r}"))?;
    }
    for m in shipped_models() {
        let t = pinching_threshold(&m, None).map_err(|e| e.to_string())?;
        if m.scalar() > Rational::zero() && t.ratio.unwrap_or(0.0) >= 1.0 / 24.0 - 1e-9 {
            // Einstein by index loops: ∘Ric = 0.
            ensure(brute(&m.rm).norm.is_zero(), || format!("{} pinched at 1/24 but not Einstein", m.name))?;
        }
    }
    Ok(format!("S4 1/12 exact; CP2 {opt:.9} (optimizer), {sampled:.6} (10^6 random planes); S2xS2, S3xR 0; pinched models are Einstein"))
}

fn ac9() -> Outcome {
    let mut total = 0;
    for m in shipped_models() {
        let b = brute(&m.rm);
        let n = m.n;
        let lam = m.soliton_constant.clone();
        // Ric + Hess f − λg and Δf − (nλ − R) from the potential directly.
        let hess_diag = |i: usize| match &m.potential {
            Potential::Gaussian { axes } if axes.contains(&i) => lam.clone(),
            _ => Rational::zero(),
        };
        for i in 0..n {
            let ric_ii = b.lambda[i].clone() + b.r.clone() / Rational::from_int(n as i64);
            ensure(ric_ii + hess_diag(i) == lam, || format!("{}: soliton equation at ({i},{i})", m.name))?;
        }
        let lap_f: Rational = (0..n).map(hess_diag).sum();
        ensure(lap_f == Rational::from_int(n as i64) * lam.clone() - b.r.clone(), || format!("{}: Delta f", m.name))?;
        let checks = soliton_identity_check(&m).map_err(|e| e.to_string())?;
        for c in &checks {
            ensure(c.holds(), || format!("{}: {} residual {}", m.name, c.identity, c.residual))?;
        }
        let lid = checks.last().expect("integral identity reported");
        if m.einstein || m.scalar().is_zero() {
            ensure(lid.status == "trivial", || format!("{}: integral identity status {}", m.name, lid.status))?;
        }
        total += checks.len();
    }
    Ok(format!("{total} identity checks on {} shipped models, all residuals exactly 0; integral identity trivially 0 = 0 on Einstein/flat models, not applicable on S3xR", shipped_models().len()))
}

fn ac10() -> Outcome {
    let tag = Exact::ratio(5, 7);
    let mut pairs_checked = 0;
    let mut equalities = 0;
    for n in 3..=6usize {
        for k in 0..10_000 {
            let lambda: Vec<Rational> = sample_traceless(n, sub_seed(10, n, &tag, k));
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let g = eigen_gap_lemma(&lambda, i, j).map_err(|e| e.to_string())?;
                    ensure(g.lhs >= g.rhs, || format!("n={n} sample {k} ({i},{j})"))?;
                    let others: Vec<&Rational> = (0..n).filter(|&m| m != i && m != j).map(|m| &lambda[m]).collect();
                    let flat = others.iter().all(|v| *v == others[0]);
                    ensure(g.equality == flat, || format!("equality flag at n={n} sample {k} ({i},{j})"))?;
                    pairs_checked += 1;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..5 {
                    let lambda: Vec<Rational> = equality_case(n, i, j, sub_seed(11, n, &tag, k));
                    let g = eigen_gap_lemma(&lambda, i, j).map_err(|e| e.to_string())?;
                    ensure(g.equality && g.lhs == g.rhs, || format!("constructed equality case n={n} ({i},{j})"))?;
                    equalities += 1;
                }
            }
        }
    }
    Ok(format!("{pairs_checked} (vector, pair) checks for n=3..6, inequality holds, flag matches; {equalities} constructed equality cases flagged"))
}

fn ac11() -> Outcome {
    let config = CampaignConfig {
        n: vec![4, 5],
        count: 2000,
        seed: 99,
        ..CampaignConfig::default()
    };
    let a = mc_campaign(&config).map_err(|e| e.to_string())?;
    let b = mc_campaign(&config).map_err(|e| e.to_string())?;
    ensure(a.digest() == b.digest(), || "campaign digests differ".to_owned())?;

    let run_cfg = pinchlab_cli::RunConfig {
        command: Some(pinchlab_cli::Command::All),
        seed: Some(42),
        count: Some(200),
        ..Default::default()
    };
    let r1 = pinchlab_cli::run(&run_cfg).map_err(|e| e.to_string())?;
    let r2 = pinchlab_cli::run(&run_cfg).map_err(|e| e.to_string())?;
    ensure(r1.digest == r2.digest && r1.exit_status == 0, || "run digests differ or run failed".to_owned())?;

    let bin = env!("CARGO_BIN_EXE_pinchlab");
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let code = |file: &str| -> Result<(Option<i32>, Value), String> {
        let out = Command::new(bin)
            .args(["--config", &format!("{fixtures}/{file}")])
            .env_remove("PINCHLAB_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        let doc = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        Ok((out.status.code(), doc))
    };
    let (bad, bad_doc) = code("corrupted_rhs1.json")?;
    let (good, good_doc) = code("clean.json")?;
    ensure(bad == Some(1), || format!("corrupted fixture exited {bad:?}"))?;
    ensure(good == Some(0), || format!("clean fixture exited {good:?}"))?;
    let (again, again_doc) = code("corrupted_rhs1.json")?;
    ensure(again == Some(1) && again_doc["digest"] == bad_doc["digest"], || "fixture digest not reproducible".to_owned())?;
    Ok(format!(
        "campaign digest {}.., run digest {}.. reproduced; corrupted-coefficient fixture exits 1 ({} violations), clean fixture exits 0",
        &a.digest()[..12],
        &r1.digest[..12],
        bad_doc["violations"].as_array().map_or(0, Vec::len) + good_doc["violations"].as_array().map_or(0, Vec::len)
    ))
}

fn main() -> ExitCode {
    let strict = std::env::var("PINCHLAB_STRICT_ACCEPTANCE").is_ok_and(|v| v == "1");
    let mut unexpected = Vec::new();
    let mut report = |id: &str, secs: Option<f64>, outcome: Outcome| {
        let time = secs.map_or("shares AC1 run".to_owned(), |s| format!("{s:.1}s"));
        match &outcome {
            Ok(detail) => println!("{id} PASS ({time}) {detail}"),
            Err(why) => {
                let known = KNOWN_DIVERGENCES.contains(&id);
                println!("{id} FAIL ({time}){} {why}", if known { " [known divergence]" } else { "" });
                if strict || !known {
                    unexpected.push(id.to_owned());
                }
            }
        }
    };

    let t = Instant::now();
    let (ac1, ac2) = ac1_ac2();
    let secs = t.elapsed().as_secs_f64();
    report("AC1", Some(secs), ac1);
    report("AC2", None, ac2);
    type Criterion = fn() -> Outcome;
    let rest: [(&str, Criterion); 9] = [
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
        ("AC11", ac11),
    ];
    for (id, f) in rest {
        let t = Instant::now();
        let out = f();
        report(id, Some(t.elapsed().as_secs_f64()), out);
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
