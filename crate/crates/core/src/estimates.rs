//! The two pointwise estimates on `R_ijkl ∘R_ik ∘R_jl` under `Sec >= εR`,
//! their convex combination, and the eigenbasis σ-profile model.
//!
//! In an eigenbasis `{e_i}` of `∘Ric` with eigenvalues `λ_i`, and with
//! `σ_ij` the sectional curvature of `e_i ∧ e_j`, the left-hand side is
//! `Σ_{i≠j} λ_i λ_j σ_ij`. Writing `σ̄_ij = σ_ij − εR >= 0`, the first
//! estimate holds with the exact remainder
//!
//! ```text
//! rhs1 − lhs = Σ_{i<j} (λ_i − λ_j)² σ̄_ij.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{check_pinching_bound, Scalar};
use crate::sectional::{min_sectional, SearchOptions};
use crate::tensor::{AlgCurvTensor, CurvatureInvariants, SymTensor2};

/// Relative slack allowed on inequality gaps in float mode.
pub const FLOAT_GAP_TOL: f64 = 1e-10;

/// Absolute slack (times `max(1, |R|)`) on the `Sec >= εR` certificate of a
/// float tensor; covers the accuracy of the Grassmannian search.
pub const CERTIFICATE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct PinchingParams<T> {
    pub eps: T,
    pub s: T,
}

impl<T: Scalar> PinchingParams<T> {
    pub fn new(eps: T, s: T) -> Result<Self> {
        check_weight(&s)?;
        Ok(Self { eps, s })
    }
}

fn check_weight<T: Scalar>(s: &T) -> Result<()> {
    if *s < T::zero() || *s > T::one() {
        return Err(Error::WeightOutOfRange(s.to_string()));
    }
    Ok(())
}

/// Eigenbasis data: `σ_ij` (symmetric, zero diagonal), `λ_i`, and `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaProfile<T> {
    n: usize,
    sigma: Vec<T>,
    lambda: Vec<T>,
    r: T,
}

impl<T: Scalar> SigmaProfile<T> {
    /// Builds the profile determined by the coordinate-plane curvatures:
    /// `R = Σ_{i≠j} σ_ij`, `λ_k = Σ_{i≠k} σ_ik − R/n`.
    pub fn from_sigma(n: usize, sigma: Vec<T>) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedDimension {
                n,
                reason: "profiles need n >= 3",
            });
        }
        if sigma.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: sigma.len(),
            });
        }
        for i in 0..n {
            if !sigma[i * n + i].is_zero() {
                return Err(Error::InvariantViolation {
                    invariant: "zero diagonal of sigma",
                    residual: sigma[i * n + i].to_string(),
                });
            }
            for j in 0..i {
                if sigma[i * n + j] != sigma[j * n + i] {
                    return Err(Error::InvariantViolation {
                        invariant: "symmetry of sigma",
                        residual: (sigma[i * n + j].clone() - sigma[j * n + i].clone()).to_string(),
                    });
                }
            }
        }
        let mu: Vec<T> = (0..n)
            .map(|k| (0..n).fold(T::zero(), |acc, i| acc + sigma[i * n + k].clone()))
            .collect();
        let r = mu.iter().fold(T::zero(), |acc, m| acc + m.clone());
        let mean = r.clone() / T::from_int(n as i64);
        let lambda = mu.into_iter().map(|m| m - mean.clone()).collect();
        Ok(Self { n, sigma, lambda, r })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sigma(&self, i: usize, j: usize) -> &T {
        &self.sigma[i * self.n + j]
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn scalar(&self) -> &T {
        &self.r
    }

    /// `μ_k = λ_k + R/n`, the Ricci eigenvalues.
    pub fn mu(&self) -> Vec<T> {
        let mean = self.r.clone() / T::from_int(self.n as i64);
        self.lambda.iter().map(|l| l.clone() + mean.clone()).collect()
    }

    /// `σ̄_ij = σ_ij − εR` off the diagonal, zero on it.
    pub fn sigma_bar(&self, eps: &T) -> Vec<T> {
        let shift = eps.clone() * self.r.clone();
        let n = self.n;
        (0..n * n)
            .map(|p| {
                if p / n == p % n {
                    T::zero()
                } else {
                    self.sigma[p].clone() - shift.clone()
                }
            })
            .collect()
    }

    /// Smallest off-diagonal `σ_ij`.
    pub fn min_sigma(&self) -> T {
        let n = self.n;
        let mut best: Option<T> = None;
        for i in 0..n {
            for j in i + 1..n {
                let v = self.sigma(i, j);
                if best.as_ref().is_none_or(|b| v < b) {
                    best = Some(v.clone());
                }
            }
        }
        best.expect("n >= 3")
    }

    /// Residual of the three profile invariants (trace of `λ`, consistency of
    /// `μ_k` with row sums of `σ`, and `R = Σ σ`).
    pub fn invariant_residual(&self) -> T {
        let n = self.n;
        let trace = self.lambda.iter().fold(T::zero(), |acc, l| acc + l.clone());
        let mut worst = trace.abs();
        let mu = self.mu();
        let mut total = T::zero();
        for k in 0..n {
            let row = (0..n).fold(T::zero(), |acc, i| acc + self.sigma(i, k).clone());
            total = total + row.clone();
            let d = (mu[k].clone() - row).abs();
            if d > worst {
                worst = d;
            }
        }
        let d = (total - self.r.clone()).abs();
        if d > worst {
            worst = d;
        }
        worst
    }

    pub fn invariants(&self) -> CurvatureInvariants<T> {
        let n = self.n;
        let mut ric_norm_sq = T::zero();
        let mut ric_cubic = T::zero();
        for l in &self.lambda {
            let sq = l.clone() * l.clone();
            ric_cubic = ric_cubic + sq.clone() * l.clone();
            ric_norm_sq = ric_norm_sq + sq;
        }
        let mut lhs = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                lhs = lhs
                    + self.lambda[i].clone() * self.lambda[j].clone() * self.sigma(i, j).clone();
            }
        }
        lhs = lhs.clone() + lhs;
        CurvatureInvariants {
            r: self.r.clone(),
            ric_norm_sq,
            ric_cubic,
            lhs,
        }
    }

    /// Realization as a curvature tensor diagonal in the eigenbasis:
    /// `R_ijij = σ_ij`, all other independent components zero.
    pub fn to_tensor(&self) -> AlgCurvTensor<T> {
        let n = self.n;
        let mut rm = AlgCurvTensor::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                rm.set(i, j, i, j, self.sigma(i, j).clone());
            }
        }
        rm
    }

    pub fn to_json(&self) -> Value {
        let n = self.n;
        let sigma: Vec<Vec<Value>> = (0..n)
            .map(|i| (0..n).map(|j| self.sigma(i, j).to_json()).collect())
            .collect();
        json!({
            "n": n,
            "mode": T::MODE,
            "sigma": sigma,
            "lambda": self.lambda.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "r": self.r.to_json(),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// `σ̄_ij = |N(0, 1)|`.
    #[default]
    HalfNormal,
    /// `σ̄_ij ~ U[0, 1)`.
    Uniform,
    /// Half-normal, but each `σ̄_ij` is zeroed with probability 1/2; reaches
    /// the equality cases of the first estimate.
    Sparse,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half-normal" => Ok(Self::HalfNormal),
            "uniform" => Ok(Self::Uniform),
            "sparse" => Ok(Self::Sparse),
            _ => Err(Error::ParseNumber {
                input: s.to_owned(),
                reason: "sampler must be half-normal, uniform or sparse",
            }),
        }
    }
}

/// Draws `σ̄_ij >= 0`, solves `R = 2 Σ_{i<j} σ̄_ij / (1 − n(n−1)ε)` and sets
/// `σ_ij = σ̄_ij + εR`, so that `σ_ij >= εR` holds by construction.
pub fn sample_sigma_profile<T: Scalar>(
    n: usize,
    eps: &T,
    seed: u64,
    kind: SamplerKind,
) -> Result<SigmaProfile<T>> {
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "profiles need n >= 3",
        });
    }
    check_pinching_bound(n, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bar = vec![T::zero(); n * n];
    let mut total = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let raw: f64 = match kind {
                SamplerKind::HalfNormal => {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z.abs()
                }
                SamplerKind::Uniform => rng.gen::<f64>(),
                SamplerKind::Sparse => {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    if rng.gen::<bool>() {
                        0.0
                    } else {
                        z.abs()
                    }
                }
            };
            let v = T::quantize(raw).abs();
            total = total + v.clone();
            bar[i * n + j] = v.clone();
            bar[j * n + i] = v;
        }
    }
    let nn = T::from_int((n * (n - 1)) as i64);
    let r = (total.clone() + total) / (T::one() - nn * eps.clone());
    let shift = eps.clone() * r;
    let sigma = (0..n * n)
        .map(|p| {
            if p / n == p % n {
                T::zero()
            } else {
                bar[p].clone() + shift.clone()
            }
        })
        .collect();
    SigmaProfile::from_sigma(n, sigma)
}

/// `R_ijkl ∘R_ik ∘R_jl`.
pub fn lhs_contraction<T: Scalar>(rm: &AlgCurvTensor<T>) -> T {
    rm.contract_twice(&rm.traceless_ricci())
        .expect("traceless Ricci has the tensor's dimension")
}

/// `((1 − n²ε)/n) R |∘Ric|² + ∘R_ij ∘R_ik ∘R_jk`.
pub fn rhs_estimate1<T: Scalar>(n: usize, params: &PinchingParams<T>, inv: &CurvatureInvariants<T>) -> T {
    coefficient1(n, &params.eps) * inv.r.clone() * inv.ric_norm_sq.clone() + inv.ric_cubic.clone()
}

/// `((n² − 4n + 2 − n²(n−2)(n−3)ε)/(2n)) R |∘Ric|² − (n−1) ∘R_ij ∘R_ik ∘R_jk`.
pub fn rhs_estimate2<T: Scalar>(n: usize, params: &PinchingParams<T>, inv: &CurvatureInvariants<T>) -> T {
    let nn = T::from_int(n as i64);
    coefficient2(n, &params.eps) * inv.r.clone() * inv.ric_norm_sq.clone()
        - (nn - T::one()) * inv.ric_cubic.clone()
}

/// The convex combination with weight `s ∈ [0, 1]`:
/// `(c₂ − ((n−4)/2)(1 − n(n−1)ε) s) R |∘Ric|² − (n − 1 − ns) ∘R³`.
pub fn rhs_convex<T: Scalar>(
    n: usize,
    params: &PinchingParams<T>,
    inv: &CurvatureInvariants<T>,
) -> Result<T> {
    check_weight(&params.s)?;
    let (quad, cubic) = convex_coefficients(n, &params.eps, &params.s);
    Ok(quad * inv.r.clone() * inv.ric_norm_sq.clone() + cubic * inv.ric_cubic.clone())
}

/// `(1 − n²ε)/n`.
pub fn coefficient1<T: Scalar>(n: usize, eps: &T) -> T {
    let nn = T::from_int(n as i64);
    (T::one() - nn.clone() * nn.clone() * eps.clone()) / nn
}

/// `(n² − 4n + 2 − n²(n−2)(n−3)ε)/(2n)`.
pub fn coefficient2<T: Scalar>(n: usize, eps: &T) -> T {
    let ni = n as i64;
    let constant = T::from_int(ni * ni - 4 * ni + 2);
    let slope = T::from_int(ni * ni * (ni - 2) * (ni - 3));
    (constant - slope * eps.clone()) / T::from_int(2 * ni)
}

/// Coefficients `(of R|∘Ric|², of ∘R³)` of the convex bound.
pub fn convex_coefficients<T: Scalar>(n: usize, eps: &T, s: &T) -> (T, T) {
    let ni = n as i64;
    let modified_scale = T::one() - T::from_int(ni * (ni - 1)) * eps.clone();
    let quad = coefficient2(n, eps) - T::from_ratio(ni - 4, 2) * modified_scale * s.clone();
    let cubic = -(T::from_int(ni - 1) - T::from_int(ni) * s.clone());
    (quad, cubic)
}

/// Both sides of
/// `Σ_{ij} λ_iλ_j σ̄_ij − Σ_k μ̄_k λ_k² = −Σ_{i<j} (λ_i − λ_j)² σ̄_ij`
/// with `μ̄_k = Σ_{i≠k} σ̄_ik`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equno<T> {
    pub lhs_side: T,
    pub rhs_side: T,
}

impl<T: Scalar> Equno<T> {
    pub fn residual(&self) -> T {
        self.lhs_side.clone() - self.rhs_side.clone()
    }
}

pub fn equno_identity<T: Scalar>(p: &SigmaProfile<T>, eps: &T) -> Equno<T> {
    let n = p.dim();
    let bar = p.sigma_bar(eps);
    let lam = p.lambda();
    let mut lhs_side = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            lhs_side = lhs_side + lam[i].clone() * lam[j].clone() * bar[i * n + j].clone();
        }
    }
    lhs_side = lhs_side.clone() + lhs_side;
    for k in 0..n {
        let mu_bar = (0..n).fold(T::zero(), |acc, i| acc + bar[i * n + k].clone());
        lhs_side = lhs_side - mu_bar * lam[k].clone() * lam[k].clone();
    }
    Equno {
        lhs_side,
        rhs_side: -pair_slack(p, &bar),
    }
}

/// `Σ_{i<j} (λ_i − λ_j)² σ̄_ij`.
pub fn first_estimate_slack<T: Scalar>(p: &SigmaProfile<T>, eps: &T) -> T {
    pair_slack(p, &p.sigma_bar(eps))
}

fn pair_slack<T: Scalar>(p: &SigmaProfile<T>, bar: &[T]) -> T {
    let n = p.dim();
    let lam = p.lambda();
    let mut acc = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let d = lam[i].clone() - lam[j].clone();
            acc = acc + d.clone() * d * bar[i * n + j].clone();
        }
    }
    acc
}

/// Random traceless vector: normals snapped onto the field, mean removed.
pub fn sample_traceless<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<T> = (0..n)
        .map(|_| T::quantize(StandardNormal.sample(&mut rng)))
        .collect();
    let mean = raw.iter().fold(T::zero(), |a, x| a + x.clone()) / T::from_int(n as i64);
    raw.into_iter().map(|x| x - mean.clone()).collect()
}

/// Traceless vector whose entries off `{i, j}` all equal `c`; `λ_i` is
/// random and `λ_j` closes the trace.
pub fn equality_case<T: Scalar>(n: usize, i: usize, j: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = T::quantize(StandardNormal.sample(&mut rng));
    let li = T::quantize(rng.gen_range(-2.0..2.0));
    let mut v = vec![c.clone(); n];
    v[i] = li.clone();
    v[j] = T::zero() - li - c * T::from_int(n as i64 - 2);
    v
}

/// `Σ_{k∉{i,j}} λ_k² >= (λ_i + λ_j)²/(n − 2)` for traceless `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenGap<T> {
    pub lhs: T,
    pub rhs: T,
    /// Whether the two sides coincide (exactly, or to 1e-12 relative).
    pub equality: bool,
}

pub fn eigen_gap_lemma<T: Scalar>(lambda: &[T], i: usize, j: usize) -> Result<EigenGap<T>> {
    let n = lambda.len();
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "the gap lemma needs n >= 3",
        });
    }
    if i >= n || j >= n || i == j {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: i.max(j),
        });
    }
    let trace = lambda.iter().fold(T::zero(), |acc, l| acc + l.clone());
    let scale = lambda.iter().map(|l| l.to_f64().abs()).sum::<f64>();
    if !trace.is_negligible(scale, 1e-12) {
        return Err(Error::NotTraceless(trace.to_string()));
    }
    let lhs = lambda
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != j)
        .fold(T::zero(), |acc, (_, l)| acc + l.clone() * l.clone());
    let pair = lambda[i].clone() + lambda[j].clone();
    let rhs = pair.clone() * pair / T::from_int(n as i64 - 2);
    let equality = (lhs.clone() - rhs.clone()).is_negligible(lhs.to_f64(), 1e-12);
    Ok(EigenGap { lhs, rhs, equality })
}

#[derive(Debug)]
pub enum EstimateSource<'a, T> {
    Profile(&'a SigmaProfile<T>),
    Tensor(&'a AlgCurvTensor<T>),
}

impl<T> Clone for EstimateSource<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for EstimateSource<'_, T> {}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport<T> {
    pub lhs: T,
    pub rhs1: T,
    pub rhs2: T,
    pub rhs_convex: T,
    pub gap1: T,
    pub gap2: T,
    pub gap_convex: T,
    /// Profiles: both sides of the eigenbasis identity. Tensors: `gap1`
    /// against the same quantity computed through `R̄m` and `R̄ic`.
    pub equno_residual: T,
    /// Profiles only: `gap1 − Σ_{i<j}(λ_i − λ_j)² σ̄_ij`.
    pub slack_residual: Option<T>,
    pub passed: bool,
}

/// Everything in an [`EstimateReport`] that does not depend on `s`.
#[derive(Clone, Debug)]
pub struct EstimateEvaluation<T> {
    pub n: usize,
    pub eps: T,
    pub inv: CurvatureInvariants<T>,
    pub rhs1: T,
    pub rhs2: T,
    pub equno_residual: T,
    pub slack_residual: Option<T>,
}

impl<T: Scalar> EstimateEvaluation<T> {
    /// Evaluates both estimates on a source already known to satisfy
    /// `Sec >= εR`. Use [`check_estimates`] to have tensors certified.
    pub fn new(source: EstimateSource<'_, T>, eps: &T) -> Self {
        let params = PinchingParams {
            eps: eps.clone(),
            s: T::zero(),
        };
        match source {
            EstimateSource::Profile(p) => {
                let n = p.dim();
                let inv = p.invariants();
                let rhs1 = rhs_estimate1(n, &params, &inv);
                let rhs2 = rhs_estimate2(n, &params, &inv);
                let equno = equno_identity(p, eps);
                let slack = -equno.rhs_side.clone();
                let slack_residual = rhs1.clone() - inv.lhs.clone() - slack;
                Self {
                    n,
                    eps: eps.clone(),
                    rhs1,
                    rhs2,
                    equno_residual: equno.residual(),
                    slack_residual: Some(slack_residual),
                    inv,
                }
            }
            EstimateSource::Tensor(rm) => {
                let n = rm.dim();
                let inv = rm.invariants();
                let rhs1 = rhs_estimate1(n, &params, &inv);
                let rhs2 = rhs_estimate2(n, &params, &inv);
                let tric = rm.traceless_ricci();
                let modified = rm.modified(eps);
                let bar_lhs = modified
                    .rm_bar
                    .contract_twice(&tric)
                    .expect("same dimension");
                let bar_cubic = mixed_cubic(&modified.ric_bar, &tric);
                // gap1 = R̄ic∘R∘R − R̄m∘R∘R.
                let equno_residual =
                    rhs1.clone() - inv.lhs.clone() - (bar_cubic - bar_lhs);
                Self {
                    n,
                    eps: eps.clone(),
                    rhs1,
                    rhs2,
                    equno_residual,
                    slack_residual: None,
                    inv,
                }
            }
        }
    }

    /// Scale for float tolerances: `max(1, |lhs|, |rhs1|, |rhs2|)`.
    pub fn scale(&self) -> f64 {
        [&self.inv.lhs, &self.rhs1, &self.rhs2]
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(1.0, f64::max)
    }

    pub fn report(&self, s: &T) -> Result<EstimateReport<T>> {
        let params = PinchingParams::new(self.eps.clone(), s.clone())?;
        let rhs_convex = rhs_convex(self.n, &params, &self.inv)?;
        let lhs = self.inv.lhs.clone();
        let gap1 = self.rhs1.clone() - lhs.clone();
        let gap2 = self.rhs2.clone() - lhs.clone();
        let gap_convex = rhs_convex.clone() - lhs.clone();
        let scale = self.scale().max(rhs_convex.to_f64().abs());
        let passed = [&gap1, &gap2, &gap_convex]
            .iter()
            .all(|g| g.is_nonneg_within(scale, FLOAT_GAP_TOL))
            && self.equno_residual.is_negligible(scale, FLOAT_GAP_TOL)
            && self
                .slack_residual
                .as_ref()
                .is_none_or(|r| r.is_negligible(scale, FLOAT_GAP_TOL));
        Ok(EstimateReport {
            lhs,
            rhs1: self.rhs1.clone(),
            rhs2: self.rhs2.clone(),
            rhs_convex,
            gap1,
            gap2,
            gap_convex,
            equno_residual: self.equno_residual.clone(),
            slack_residual: self.slack_residual.clone(),
            passed,
        })
    }
}

/// `S_ij T_ik T_jk`.
fn mixed_cubic<T: Scalar>(s: &SymTensor2<T>, t: &SymTensor2<T>) -> T {
    let n = s.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            let sij = s.get(i, j);
            if sij.is_zero() {
                continue;
            }
            for k in 0..n {
                acc = acc + sij.clone() * t.get(i, k).clone() * t.get(j, k).clone();
            }
        }
    }
    acc
}

/// Certifies `Sec >= εR` (by construction for profiles, by the Grassmannian
/// search for tensors) and evaluates both estimates and their convex
/// combination at `params.s`.
pub fn check_estimates<T: Scalar>(
    source: EstimateSource<'_, T>,
    params: &PinchingParams<T>,
) -> Result<EstimateReport<T>> {
    certify(source, &params.eps, &SearchOptions::default())?;
    EstimateEvaluation::new(source, &params.eps).report(&params.s)
}

/// Rejects sources that violate `Sec >= εR`.
pub fn certify<T: Scalar>(source: EstimateSource<'_, T>, eps: &T, opts: &SearchOptions) -> Result<()> {
    match source {
        EstimateSource::Profile(p) => {
            let bound = eps.clone() * p.scalar().clone();
            let min = p.min_sigma();
            if !(min.clone() - bound.clone()).is_nonneg_within(p.scalar().to_f64(), FLOAT_GAP_TOL) {
                return Err(Error::Uncertified {
                    min_sec: min.to_f64(),
                    bound: bound.to_f64(),
                });
            }
            Ok(())
        }
        EstimateSource::Tensor(rm) => {
            let r = rm.scalar().to_f64();
            let bound = eps.to_f64() * r;
            let min = min_sectional(&rm.to_f64(), opts)?.value;
            if min < bound - CERTIFICATE_TOL * r.abs().max(1.0) {
                return Err(Error::Uncertified { min_sec: min, bound });
            }
            Ok(())
        }
    }
}
