//! The auxiliary three-tensor
//!
//! ```text
//! F_ijk = ∇_k∘R_ij + a₁∇_j∘R_ik + a₂∇_i∘R_jk + b₁∇_kR g_ij + b₂∇_jR g_ik + b₃∇_iR g_jk,
//! ```
//!
//! the pointwise expansion of `|F|²`, the coefficient functions `Q₁`, `Q₂`,
//! and the maximization of `Q₂` over `(a₁, a₂, b₁, b₂, b₃)`.
//!
//! Pointwise gradient data is modelled by a [`GradientModel`]: an array
//! `S_ijk` standing for `∇_k∘R_ij` and a vector `w` standing for `∇R`, tied
//! by the contracted Bianchi identity `Σ_i S_iji = ((n−2)/(2n)) w_j`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead_restarted, NelderMeadOptions};
use crate::scalar::{parse_rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct FCoefficients<T> {
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub b3: T,
}

impl<T: Scalar> FCoefficients<T> {
    pub fn new(a1: T, a2: T, b1: T, b2: T, b3: T) -> Self {
        Self { a1, a2, b1, b2, b3 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// `(1, 1, −1/12, −1/12, −1/12)`.
    pub fn claimed_optimum() -> Self {
        let b = T::from_ratio(-1, 12);
        Self::new(T::one(), T::one(), b.clone(), b.clone(), b)
    }

    pub fn from_slice(v: &[T]) -> Result<Self> {
        match v {
            [a1, a2, b1, b2, b3] => Ok(Self::new(
                a1.clone(),
                a2.clone(),
                b1.clone(),
                b2.clone(),
                b3.clone(),
            )),
            _ => Err(Error::DimensionMismatch {
                expected: 5,
                actual: v.len(),
            }),
        }
    }

    /// Comma-separated `a1,a2,b1,b2,b3`; each entry `p/q` or decimal.
    pub fn parse(input: &str) -> Result<Self> {
        let values = input
            .split(',')
            .map(|part| parse_rational(part).map(|r| T::from_rational(&r)))
            .collect::<Result<Vec<T>>>()?;
        Self::from_slice(&values)
    }

    pub fn to_vec(&self) -> Vec<T> {
        vec![
            self.a1.clone(),
            self.a2.clone(),
            self.b1.clone(),
            self.b2.clone(),
            self.b3.clone(),
        ]
    }

    pub fn to_f64(&self) -> FCoefficients<f64> {
        FCoefficients::new(
            self.a1.to_f64(),
            self.a2.to_f64(),
            self.b1.to_f64(),
            self.b2.to_f64(),
            self.b3.to_f64(),
        )
    }

    /// `a₁ + a₂ + a₁a₂`; the argument requires it to be nonnegative.
    pub fn sign_condition(&self) -> T {
        self.a1.clone() + self.a2.clone() + self.a1.clone() * self.a2.clone()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a1": self.a1.to_json(),
            "a2": self.a2.to_json(),
            "b1": self.b1.to_json(),
            "b2": self.b2.to_json(),
            "b3": self.b3.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientModel<T> {
    n: usize,
    s: Vec<T>,
    w: Vec<T>,
}

impl<T: Scalar> GradientModel<T> {
    /// Validates all three constraints (exactly, or to 1e-12 relative).
    pub fn new(n: usize, s: Vec<T>, w: Vec<T>) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedDimension {
                n,
                reason: "gradient models need n >= 3",
            });
        }
        if s.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                actual: s.len(),
            });
        }
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: w.len(),
            });
        }
        let m = Self { n, s, w };
        let scale = m.s.iter().chain(&m.w).map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        for (name, res) in [
            ("S_ijk = S_jik", m.symmetry_residual()),
            ("sum_i S_iik = 0", m.trace_residual()),
            ("sum_i S_iji = (n-2)/(2n) w_j", m.bianchi_residual()),
        ] {
            if !res.is_negligible(scale, 1e-12) {
                return Err(Error::InvariantViolation {
                    invariant: name,
                    residual: res.to_string(),
                });
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `S_ijk`, modelling `∇_k∘R_ij`.
    pub fn s(&self, i: usize, j: usize, k: usize) -> &T {
        &self.s[(i * self.n + j) * self.n + k]
    }

    pub fn w(&self) -> &[T] {
        &self.w
    }

    /// `(n−2)/(2n)`.
    pub fn bianchi_constant(n: usize) -> T {
        T::from_ratio(n as i64 - 2, 2 * n as i64)
    }

    pub fn symmetry_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = (self.s(i, j, k).clone() - self.s(j, i, k).clone()).abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    pub fn trace_residual(&self) -> T {
        let n = self.n;
        (0..n)
            .map(|k| (0..n).fold(T::zero(), |acc, i| acc + self.s(i, i, k).clone()).abs())
            .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
    }

    pub fn bianchi_residual(&self) -> T {
        let n = self.n;
        let c = Self::bianchi_constant(n);
        (0..n)
            .map(|j| {
                let div = (0..n).fold(T::zero(), |acc, i| acc + self.s(i, j, i).clone());
                (div - c.clone() * self.w[j].clone()).abs()
            })
            .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
    }

    /// `Σ S_ijk²`, modelling `|∇∘Ric|²`.
    pub fn grad_ric_sq(&self) -> T {
        self.s.iter().fold(T::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    /// `Σ S_ijk S_ikj`, modelling `∇_k∘R_ij ∇_j∘R_ik`.
    pub fn mixed(&self) -> T {
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    acc = acc + self.s(i, j, k).clone() * self.s(i, k, j).clone();
                }
            }
        }
        acc
    }

    /// `Σ w_j²`, modelling `|∇R|²`.
    pub fn grad_r_sq(&self) -> T {
        self.w.iter().fold(T::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "mode": T::MODE,
            "s": self.s.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "w": self.w.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Draws an unconstrained `S̃` and `w`, then projects onto the constraint set:
/// symmetrize in `(i, j)`, remove the `(i, j)` trace, and add
/// `α(δ_ik v_j + δ_jk v_i) − (2α/n) δ_ij v_k` with `α = n/((n+2)(n−1))` and
/// `v = ((n−2)/(2n)) w − div S`, which fixes the divergence without
/// disturbing the first two constraints.
pub fn sample_gradient_model<T: Scalar>(n: usize, seed: u64) -> Result<GradientModel<T>> {
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "gradient models need n >= 3",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || T::quantize(StandardNormal.sample(&mut rng));
    let raw: Vec<T> = (0..n * n * n).map(|_| draw()).collect();
    let w: Vec<T> = (0..n).map(|_| draw()).collect();
    let ix = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let half = T::from_ratio(1, 2);
    let nn = T::from_int(n as i64);

    let mut s = vec![T::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s[ix(i, j, k)] = (raw[ix(i, j, k)].clone() + raw[ix(j, i, k)].clone()) * half.clone();
            }
        }
    }
    for k in 0..n {
        let tr = (0..n).fold(T::zero(), |acc, i| acc + s[ix(i, i, k)].clone()) / nn.clone();
        for i in 0..n {
            s[ix(i, i, k)] = s[ix(i, i, k)].clone() - tr.clone();
        }
    }

    let c = GradientModel::<T>::bianchi_constant(n);
    let v: Vec<T> = (0..n)
        .map(|j| {
            let div = (0..n).fold(T::zero(), |acc, i| acc + s[ix(i, j, i)].clone());
            c.clone() * w[j].clone() - div
        })
        .collect();
    let alpha = T::from_ratio(n as i64, ((n + 2) * (n - 1)) as i64);
    let beta = -(T::from_int(2) * alpha.clone()) / nn;
    for i in 0..n {
        s[ix(i, i, i)] = s[ix(i, i, i)].clone() + beta.clone() * v[i].clone();
        for k in 0..n {
            // δ_ik v_j term with (i, j, k) = (i, j, i), and δ_jk v_i with (i, k, k).
            s[ix(i, k, i)] = s[ix(i, k, i)].clone() + alpha.clone() * v[k].clone();
            s[ix(i, k, k)] = s[ix(i, k, k)].clone() + alpha.clone() * v[i].clone();
            if k != i {
                s[ix(i, i, k)] = s[ix(i, i, k)].clone() + beta.clone() * v[k].clone();
            }
        }
    }
    GradientModel::new(n, s, w)
}

/// Coefficient vector with entries `2·N(0, 1)` snapped onto the field.
pub fn sample_coefficients<T: Scalar>(seed: u64) -> FCoefficients<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let z: f64 = StandardNormal.sample(&mut rng);
        T::quantize(2.0 * z)
    };
    FCoefficients::new(draw(), draw(), draw(), draw(), draw())
}

/// `F_ijk = S_ijk + a₁S_ikj + a₂S_jki + b₁w_kδ_ij + b₂w_jδ_ik + b₃w_iδ_jk`,
/// flattened as `(i·n + j)·n + k`.
pub fn f_tensor<T: Scalar>(m: &GradientModel<T>, c: &FCoefficients<T>) -> Vec<T> {
    let n = m.dim();
    let w = m.w();
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = m.s(i, j, k).clone()
                    + c.a1.clone() * m.s(i, k, j).clone()
                    + c.a2.clone() * m.s(j, k, i).clone();
                if i == j {
                    v = v + c.b1.clone() * w[k].clone();
                }
                if i == k {
                    v = v + c.b2.clone() * w[j].clone();
                }
                if j == k {
                    v = v + c.b3.clone() * w[i].clone();
                }
                out.push(v);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct FNormExpansion<T> {
    /// `Σ F_ijk²`.
    pub direct: T,
    /// `(1+a₁²+a₂²)|∇∘Ric|² + 2(a₁+a₂+a₁a₂) mixed + ½ B |∇R|²`.
    pub formula: T,
    pub grad_ric_sq: T,
    pub mixed: T,
    pub grad_r_sq: T,
}

impl<T: Scalar> FNormExpansion<T> {
    pub fn residual(&self) -> T {
        self.direct.clone() - self.formula.clone()
    }
}

/// `a₁(b₁+b₃) + a₂(b₁+b₂) + b₂ + b₃ + 8(b₁²+b₂²+b₃²) + 4(b₁b₂+b₁b₃+b₂b₃)`.
pub fn gradient_r_bracket<T: Scalar>(c: &FCoefficients<T>) -> T {
    let (b1, b2, b3) = (c.b1.clone(), c.b2.clone(), c.b3.clone());
    c.a1.clone() * (b1.clone() + b3.clone())
        + c.a2.clone() * (b1.clone() + b2.clone())
        + b2.clone()
        + b3.clone()
        + T::from_int(8) * (b1.clone() * b1.clone() + b2.clone() * b2.clone() + b3.clone() * b3.clone())
        + T::from_int(4) * (b1.clone() * b2.clone() + b1 * b3.clone() + b2 * b3)
}

/// `1 + a₁² + a₂²`.
fn denominator<T: Scalar>(a1: &T, a2: &T) -> T {
    T::one() + a1.clone() * a1.clone() + a2.clone() * a2.clone()
}

/// Direct contraction `Σ F²` next to the closed-form expansion. The
/// expansion uses the dimension-four Bianchi constant, so `n` must be 4.
pub fn f_norm_expansion<T: Scalar>(m: &GradientModel<T>, c: &FCoefficients<T>) -> Result<FNormExpansion<T>> {
    if m.dim() != 4 {
        return Err(Error::UnsupportedDimension {
            n: m.dim(),
            reason: "the |F|^2 expansion is stated in dimension four",
        });
    }
    let direct = f_tensor(m, c)
        .into_iter()
        .fold(T::zero(), |acc, v| acc + v.clone() * v);
    let grad_ric_sq = m.grad_ric_sq();
    let mixed = m.mixed();
    let grad_r_sq = m.grad_r_sq();
    let formula = denominator(&c.a1, &c.a2) * grad_ric_sq.clone()
        + T::from_int(2) * c.sign_condition() * mixed.clone()
        + T::from_ratio(1, 2) * gradient_r_bracket(c) * grad_r_sq.clone();
    Ok(FNormExpansion {
        direct,
        formula,
        grad_ric_sq,
        mixed,
        grad_r_sq,
    })
}

/// `Q₁ = (a₁+a₂+a₁a₂)/(4(1+a₁²+a₂²)) − B/(1+a₁²+a₂²)`.
pub fn q1<T: Scalar>(c: &FCoefficients<T>) -> T {
    let d = denominator(&c.a1, &c.a2);
    c.sign_condition() / (T::from_int(4) * d.clone()) - gradient_r_bracket(c) / d
}

/// `(1+a₁²+a₂²+a₁+a₂+a₁a₂)/(2(1+a₁²+a₂²))`, the factor multiplying
/// `(1 − 16ε)` in `Q₂`.
pub fn eps_factor<T: Scalar>(a1: &T, a2: &T) -> T {
    let d = denominator(a1, a2);
    let p = a1.clone() + a2.clone() + a1.clone() * a2.clone();
    (d.clone() + p) / (T::from_int(2) * d)
}

/// `Q₂ = Q₁ − (1 − 16ε)(1+a₁²+a₂²+a₁+a₂+a₁a₂)/(2(1+a₁²+a₂²))`.
pub fn q2<T: Scalar>(c: &FCoefficients<T>, eps: &T) -> T {
    q1(c) - (T::one() - T::from_int(16) * eps.clone()) * eps_factor(&c.a1, &c.a2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QValue<T> {
    pub q1: T,
    pub q2: T,
    pub coeffs: FCoefficients<T>,
    pub eps: T,
}

pub fn q_value<T: Scalar>(c: &FCoefficients<T>, eps: &T) -> QValue<T> {
    QValue {
        q1: q1(c),
        q2: q2(c, eps),
        coeffs: c.clone(),
        eps: eps.clone(),
    }
}

/// Maximizer of `Q₁` (equivalently `Q₂`) over `b` at fixed `(a₁, a₂)`.
///
/// `B = ℓ·b + ½ bᵀHb` with `ℓ = (a₁+a₂, 1+a₂, 1+a₁)` and `H = 12I + 4J`
/// positive definite, so the maximizer is the unique solution of `Hb = −ℓ`.
pub fn optimal_b<T: Scalar>(a1: &T, a2: &T) -> [T; 3] {
    let h = |i: usize, j: usize| T::from_int(if i == j { 16 } else { 4 });
    let mut m: Vec<Vec<T>> = (0..3).map(|i| (0..3).map(|j| h(i, j)).collect()).collect();
    let mut rhs = [-(a1.clone() + a2.clone()),
        -(T::one() + a2.clone()),
        -(T::one() + a1.clone())];
    // H is symmetric positive definite: elimination without pivoting is safe.
    for col in 0..3 {
        for row in col + 1..3 {
            let f = m[row][col].clone() / m[col][col].clone();
            for k in col..3 {
                m[row][k] = m[row][k].clone() - f.clone() * m[col][k].clone();
            }
            rhs[row] = rhs[row].clone() - f * rhs[col].clone();
        }
    }
    let mut b = [T::zero(), T::zero(), T::zero()];
    for row in (0..3).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..3 {
            acc = acc - m[row][k].clone() * b[k].clone();
        }
        b[row] = acc / m[row][row].clone();
    }
    b
}

/// `Q₂` maximized over `b`, as a function of `(a₁, a₂)`.
pub fn reduced_q2<T: Scalar>(a1: &T, a2: &T, eps: &T) -> T {
    let [b1, b2, b3] = optimal_b(a1, a2);
    q2(&FCoefficients::new(a1.clone(), a2.clone(), b1, b2, b3), eps)
}

/// Central-difference gradient of `Q₂` in `(a₁, a₂, b₁, b₂, b₃)`.
pub fn grad_q2(c: &FCoefficients<f64>, eps: f64, h: f64) -> [f64; 5] {
    central_gradient(&c.to_vec(), h, |x| {
        q2(&FCoefficients::from_slice(x).expect("five entries"), &eps)
    })
}

/// Central-difference gradient of [`eps_factor`] in `(a₁, a₂)`.
pub fn grad_eps_factor(a1: f64, a2: f64, h: f64) -> [f64; 2] {
    central_gradient(&[a1, a2], h, |x| eps_factor(&x[0], &x[1]))
}

fn central_gradient<const N: usize>(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> [f64; N] {
    let mut g = [0.0; N];
    let mut p = x.to_vec();
    for (i, gi) in g.iter_mut().enumerate() {
        p[i] = x[i] + h;
        let up = f(&p);
        p[i] = x[i] - h;
        let down = f(&p);
        p[i] = x[i];
        *gi = (up - down) / (2.0 * h);
    }
    g
}

/// `2((3−4s)(1+a₁²+a₂²) + 4(1−s)(a₁+a₂+a₁a₂))/(1+a₁²+a₂²)`.
pub fn s_coefficient<T: Scalar>(a1: &T, a2: &T, s: &T) -> T {
    let d = denominator(a1, a2);
    let p = a1.clone() + a2.clone() + a1.clone() * a2.clone();
    let three_minus = T::from_int(3) - T::from_int(4) * s.clone();
    let one_minus = T::one() - s.clone();
    T::from_int(2) * (three_minus * d.clone() + T::from_int(4) * one_minus * p) / d
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct OptimizeStrategy {
    /// Initial search box `[−half_width, half_width]²` for `(a₁, a₂)`.
    pub half_width: f64,
    /// Grid points per axis.
    pub grid: usize,
    /// Best grid points refined locally.
    pub starts: usize,
    /// Box widenings (×10 each) allowed when the maximizer lands within 5%
    /// of the boundary.
    pub max_widenings: usize,
    pub max_iters: usize,
}

impl Default for OptimizeStrategy {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            grid: 201,
            starts: 16,
            max_widenings: 3,
            max_iters: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizeOutcome {
    pub eps: f64,
    pub argmax: [f64; 5],
    pub value: f64,
    /// `Q₂` at `(1, 1, −1/12, −1/12, −1/12)`.
    pub claimed_value: f64,
    /// `‖argmax − claimed point‖∞`.
    pub distance_to_claimed: f64,
    pub half_width: f64,
    pub widenings: usize,
    /// True when the final maximizer is still within 5% of the box edge.
    pub on_boundary: bool,
    pub grid_best: [f64; 3],
    pub evaluations: usize,
}

/// Global maximization of `Q₂`: exact inner solve over `b`, a grid over
/// `(a₁, a₂)`, and Nelder–Mead refinement of the best grid points.
pub fn optimize_q2(eps: f64, strategy: &OptimizeStrategy) -> Result<OptimizeOutcome> {
    if strategy.grid < 2 || strategy.starts == 0 || !(strategy.half_width > 0.0) {
        return Err(Error::InvariantViolation {
            invariant: "grid >= 2, starts >= 1, half_width > 0",
            residual: format!("{strategy:?}"),
        });
    }
    let claimed = FCoefficients::<f64>::claimed_optimum();
    let claimed_value = q2(&claimed, &eps);
    let objective = |x: &[f64]| -reduced_q2(&x[0], &x[1], &eps);
    let nm = NelderMeadOptions {
        max_iters: strategy.max_iters,
        ftol: 1e-15,
        xtol: 1e-10,
    };

    let mut half_width = strategy.half_width;
    let mut widenings = 0;
    let mut evaluations = 0;
    loop {
        let g = strategy.grid;
        let step = 2.0 * half_width / (g - 1) as f64;
        let coord = |t: usize| -half_width + step * t as f64;
        let mut best: Vec<(f64, usize, usize)> = Vec::with_capacity(strategy.starts + 1);
        for i in 0..g {
            for j in 0..g {
                let v = reduced_q2(&coord(i), &coord(j), &eps);
                evaluations += 1;
                if best.len() < strategy.starts || v > best[best.len() - 1].0 {
                    let pos = best.partition_point(|b| b.0 >= v);
                    best.insert(pos, (v, i, j));
                    best.truncate(strategy.starts);
                }
            }
        }
        let grid_best = [coord(best[0].1), coord(best[0].2), best[0].0];

        let mut winner: Option<(f64, Vec<f64>, bool)> = None;
        for &(_, i, j) in &best {
            let res = nelder_mead_restarted(objective, &[coord(i), coord(j)], step, &nm);
            evaluations += res.evals;
            if winner.as_ref().is_none_or(|w| -res.fx > w.0) {
                winner = Some((-res.fx, res.x, res.converged));
            }
        }
        let (value, x, converged) = winner.expect("starts >= 1");
        if !converged {
            return Err(Error::NonConvergence {
                what: "optimize_q2 local ascent",
                iterations: strategy.max_iters,
                best: value,
            });
        }
        let near_edge = x.iter().any(|c| c.abs() > 0.95 * half_width);
        if near_edge && widenings < strategy.max_widenings {
            half_width *= 10.0;
            widenings += 1;
            continue;
        }

        let [b1, b2, b3] = optimal_b(&x[0], &x[1]);
        let argmax = [x[0], x[1], b1, b2, b3];
        if value < claimed_value - 1e-12 * claimed_value.abs().max(1.0) {
            return Err(Error::InvariantViolation {
                invariant: "optimize_q2 value >= Q2 at the claimed point",
                residual: format!("{}", claimed_value - value),
            });
        }
        let claimed_vec = claimed.to_vec();
        let distance_to_claimed = argmax
            .iter()
            .zip(&claimed_vec)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        return Ok(OptimizeOutcome {
            eps,
            argmax,
            value,
            claimed_value,
            distance_to_claimed,
            half_width,
            widenings,
            on_boundary: near_edge,
            grid_best,
            evaluations,
        });
    }
}
