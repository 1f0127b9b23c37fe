//! Algebraic curvature tensors in an orthonormal frame.
//!
//! Sign convention: `R(x, y, x, y)` is the sectional curvature of the plane
//! spanned by orthonormal `x, y`, so the unit sphere has `R_1212 = 1` and
//! `σ_ij = R_ijij`. Ricci is `R_ik = Σ_j R_ijkj`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{check_pinching_bound, Arithmetic, Scalar};
use crate::sectional::{min_sectional, SearchOptions};

/// Relative tolerance for float-mode symmetry checks.
pub const FLOAT_SYMMETRY_TOL: f64 = 1e-14;

/// Tolerance on `|x| = |y| = 1, <x, y> = 0` for planes.
pub const PLANE_TOL: f64 = 1e-12;

/// Largest dimension accepted from serialized documents.
pub const MAX_SERIALIZED_DIM: usize = 16;

/// Symmetric `n × n` matrix; houses the metric, Ricci and traceless Ricci.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor2<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymTensor2<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i].clone() } else { T::zero() })
    }

    /// Builds from `f(i, j)` for `i <= j` and mirrors.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[j * n + i] = v.clone();
                data[i * n + j] = v;
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// `Σ_ij S_ij²`.
    pub fn norm_sq(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    /// `tr(S³) = Σ S_ij S_ik S_jk`.
    pub fn cubic_trace(&self) -> T {
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                let sij = self.get(i, j);
                if sij.is_zero() {
                    continue;
                }
                for k in 0..n {
                    acc = acc + sij.clone() * self.get(i, k).clone() * self.get(j, k).clone();
                }
            }
        }
        acc
    }

    pub fn scaled(&self, c: &T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: zip_with(&self.data, &other.data, |a, b| a - b),
        })
    }

    pub fn to_f64(&self) -> SymTensor2<f64> {
        SymTensor2 {
            n: self.n,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

/// Pointwise algebraic curvature tensor, dense `n⁴` storage.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgCurvTensor<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> AlgCurvTensor<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n * n * n],
        }
    }

    pub fn mode(&self) -> Arithmetic {
        T::MODE
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &T {
        &self.data[self.idx(i, j, k, l)]
    }

    /// Writes `R_ijkl = v` and every position related to it by the
    /// antisymmetries and pair symmetry. `i == j` or `k == l` is ignored.
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: T) {
        if i == j || k == l {
            return;
        }
        let neg = -v.clone();
        for (a, b, c, d, val) in [
            (i, j, k, l, &v),
            (j, i, k, l, &neg),
            (i, j, l, k, &neg),
            (j, i, l, k, &v),
            (k, l, i, j, &v),
            (l, k, i, j, &neg),
            (k, l, j, i, &neg),
            (l, k, j, i, &v),
        ] {
            let at = self.idx(a, b, c, d);
            self.data[at] = val.clone();
        }
    }

    /// Tensor whose bivector form is the symmetric `N × N` matrix `form`
    /// (`N = n(n-1)/2`, pairs `i < j` in lexicographic order). The result has
    /// the antisymmetries and pair symmetry but not necessarily Bianchi.
    pub fn from_bivector_form(n: usize, form: &[T]) -> Result<Self> {
        let pairs = bivector_pairs(n);
        let big = pairs.len();
        if form.len() != big * big {
            return Err(Error::DimensionMismatch {
                expected: big * big,
                actual: form.len(),
            });
        }
        let mut rm = Self::zeros(n);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, l)) in pairs.iter().enumerate().skip(p) {
                rm.set(i, j, k, l, form[p * big + q].clone());
            }
        }
        Ok(rm)
    }

    /// Constant-curvature tensor `(κ/2) g∧g`.
    pub fn constant_curvature(n: usize, kappa: T) -> Self {
        let g = SymTensor2::<T>::identity(n);
        let mut rm = kulkarni_nomizu(&g, &g).expect("same dimension");
        let half = kappa / T::from_int(2);
        rm.data.iter_mut().for_each(|v| *v = v.clone() * half.clone());
        rm
    }

    pub fn scaled(&self, c: &T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        same_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: zip_with(&self.data, &other.data, |a, b| a + b),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: zip_with(&self.data, &other.data, |a, b| a - b),
        })
    }

    pub fn to_f64(&self) -> AlgCurvTensor<f64> {
        AlgCurvTensor {
            n: self.n,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.data)
    }

    /// Max residual of the antisymmetry and pair-symmetry conditions.
    pub fn symmetry_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        for other in [
                            r.clone() + self.get(j, i, k, l).clone(),
                            r.clone() + self.get(i, j, l, k).clone(),
                            r.clone() - self.get(k, l, i, j).clone(),
                        ] {
                            if other.abs() > worst {
                                worst = other.abs();
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Max of `|R_ijkl + R_iklj + R_iljk|`.
    pub fn bianchi_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let cyc = self.get(i, j, k, l).clone()
                            + self.get(i, k, l, j).clone()
                            + self.get(i, l, j, k).clone();
                        if cyc.abs() > worst {
                            worst = cyc.abs();
                        }
                    }
                }
            }
        }
        worst
    }

    /// Checks all three algebraic invariants: exactly in rational mode,
    /// to [`FLOAT_SYMMETRY_TOL`] relative to the largest entry for floats.
    pub fn validate(&self) -> Result<()> {
        let scale = self.max_abs().to_f64();
        let sym = self.symmetry_residual();
        if !sym.is_negligible(scale, FLOAT_SYMMETRY_TOL) {
            return Err(Error::InvariantViolation {
                invariant: "antisymmetry/pair symmetry",
                residual: sym.to_string(),
            });
        }
        let bianchi = self.bianchi_residual();
        if !bianchi.is_negligible(scale, FLOAT_SYMMETRY_TOL) {
            return Err(Error::InvariantViolation {
                invariant: "first Bianchi identity",
                residual: bianchi.to_string(),
            });
        }
        Ok(())
    }

    /// Removes the totally antisymmetric part so the first Bianchi identity
    /// holds. Assumes the antisymmetries and pair symmetry already hold.
    pub fn bianchi_projection(&self) -> Self {
        let n = self.n;
        let three = T::from_int(3);
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let cyc = self.get(i, j, k, l).clone()
                            + self.get(i, k, l, j).clone()
                            + self.get(i, l, j, k).clone();
                        if !cyc.is_zero() {
                            let at = out.idx(i, j, k, l);
                            out.data[at] = out.data[at].clone() - cyc / three.clone();
                        }
                    }
                }
            }
        }
        out
    }

    /// `R_ik = Σ_j R_ijkj`.
    pub fn ricci(&self) -> SymTensor2<T> {
        let n = self.n;
        SymTensor2::from_fn(n, |i, k| {
            (0..n).fold(T::zero(), |acc, j| acc + self.get(i, j, k, j).clone())
        })
    }

    pub fn scalar(&self) -> T {
        self.ricci().trace()
    }

    /// `∘Ric = Ric − (R/n) g`.
    pub fn traceless_ricci(&self) -> SymTensor2<T> {
        traceless(&self.ricci())
    }

    /// `R_ijkl S_ik S_jl` for a symmetric `S`.
    pub fn contract_twice(&self, s: &SymTensor2<T>) -> Result<T> {
        same_dim(self.n, s.dim())?;
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for k in 0..n {
                let sik = s.get(i, k);
                if sik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        if r.is_zero() {
                            continue;
                        }
                        acc = acc + r.clone() * sik.clone() * s.get(j, l).clone();
                    }
                }
            }
        }
        Ok(acc)
    }

    pub fn invariants(&self) -> CurvatureInvariants<T> {
        let tric = self.traceless_ricci();
        CurvatureInvariants {
            r: self.scalar(),
            ric_norm_sq: tric.norm_sq(),
            ric_cubic: tric.cubic_trace(),
            lhs: self.contract_twice(&tric).expect("same dimension"),
        }
    }

    /// `R(x, y, x, y)` for an orthonormal pair.
    pub fn sectional(&self, plane: &Plane<T>) -> Result<T> {
        same_dim(self.n, plane.dim())?;
        Ok(self.quadrilinear(&plane.x, &plane.y))
    }

    fn quadrilinear(&self, x: &[T], y: &[T]) -> T {
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for k in 0..n {
                    if x[k].is_zero() {
                        continue;
                    }
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        if r.is_zero() || y[l].is_zero() {
                            continue;
                        }
                        acc = acc + r.clone() * xy.clone() * x[k].clone() * y[l].clone();
                    }
                }
            }
        }
        acc
    }

    /// `R̄m = Rm − (ε/2) R g∧g` together with `R̄ic` and `R̄`.
    pub fn modified(&self, eps: &T) -> ModifiedCurvature<T> {
        let n = self.n;
        let r = self.scalar();
        let g = SymTensor2::identity(n);
        let gg = kulkarni_nomizu(&g, &g).expect("same dimension");
        let shift = eps.clone() * r.clone() / T::from_int(2);
        let rm_bar = self
            .checked_sub(&gg.scaled(&shift))
            .expect("same dimension");
        let nn = T::from_int(n as i64);
        let ric_bar = self
            .ricci()
            .checked_sub(&g.scaled(&((nn.clone() - T::one()) * eps.clone() * r.clone())))
            .expect("same dimension");
        let r_bar = (T::one() - nn.clone() * (nn - T::one()) * eps.clone()) * r;
        ModifiedCurvature {
            epsilon: eps.clone(),
            rm_bar,
            ric_bar,
            r_bar,
        }
    }

    /// `R'_ijkl = Σ O_ia O_jb O_kc O_ld R_abcd` for a row-major `n × n` matrix.
    pub fn conjugate(&self, o: &[T]) -> Result<Self> {
        let n = self.n;
        if o.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: o.len(),
            });
        }
        let mut cur = self.data.clone();
        // Transform one slot at a time; each pass rotates the index cyclically.
        for _ in 0..4 {
            let mut next = vec![T::zero(); cur.len()];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for i in 0..n {
                            let mut acc = T::zero();
                            for d in 0..n {
                                let v = &cur[((a * n + b) * n + c) * n + d];
                                if !v.is_zero() {
                                    acc = acc + o[i * n + d].clone() * v.clone();
                                }
                            }
                            next[((i * n + a) * n + b) * n + c] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        Ok(Self { n, data: cur })
    }

    /// JSON document `{n, mode, entries: [[i, j, k, l, value], ...]}` with
    /// 1-based indices listing the nonzero components `R_ijkl`, `i < j`,
    /// `k < l`, `(i, j) <= (k, l)`.
    pub fn to_json(&self) -> Value {
        let pairs = bivector_pairs(self.n);
        let mut entries = Vec::new();
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[p..] {
                let v = self.get(i, j, k, l);
                if !v.is_zero() {
                    entries.push(json!([i + 1, j + 1, k + 1, l + 1, v.to_json()]));
                }
            }
        }
        json!({ "n": self.n, "mode": T::MODE, "entries": entries })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::TensorFormat(msg.to_owned());
        let obj = doc.as_object().ok_or_else(|| bad("expected an object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing integer field \"n\""))? as usize;
        if !(3..=MAX_SERIALIZED_DIM).contains(&n) {
            return Err(bad("dimension must lie in 3..=16"));
        }
        let mode: Arithmetic = obj
            .get("mode")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing string field \"mode\""))?
            .parse()?;
        if mode != T::MODE {
            return Err(Error::ModeMismatch {
                expected: T::MODE,
                actual: mode,
            });
        }
        let entries = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing array field \"entries\""))?;

        let big = n * (n - 1) / 2;
        let mut seen: Vec<Option<T>> = vec![None; big * big];
        let mut rm = Self::zeros(n);
        for entry in entries {
            let e = entry
                .as_array()
                .filter(|e| e.len() == 5)
                .ok_or_else(|| bad("entry must be [i, j, k, l, value]"))?;
            let mut ix = [0usize; 4];
            for (slot, v) in ix.iter_mut().zip(e) {
                let raw = v.as_u64().ok_or_else(|| bad("index must be a positive integer"))?;
                if raw == 0 || raw as usize > n {
                    return Err(bad("index out of range"));
                }
                *slot = raw as usize - 1;
            }
            let [i, j, k, l] = ix;
            if i == j || k == l {
                return Err(bad("component with a repeated antisymmetric index"));
            }
            let value = T::from_json(&e[4])?;
            // Canonical form: both pairs ascending, pairs ordered.
            let (p, sp) = pair_index(n, i, j);
            let (q, sq) = pair_index(n, k, l);
            let value = if sp * sq < 0 { -value } else { value };
            let (p, q) = if p <= q { (p, q) } else { (q, p) };
            match &seen[p * big + q] {
                Some(prev) if *prev != value => {
                    return Err(bad("conflicting values for one component"));
                }
                _ => seen[p * big + q] = Some(value.clone()),
            }
            rm.set(i, j, k, l, if sp * sq < 0 { -value } else { value });
        }
        rm.validate()?;
        Ok(rm)
    }
}

/// The traceless part `S − (tr S / n) g`.
pub fn traceless<T: Scalar>(s: &SymTensor2<T>) -> SymTensor2<T> {
    let n = s.dim();
    let mean = s.trace() / T::from_int(n as i64);
    SymTensor2::from_fn(n, |i, j| {
        if i == j {
            s.get(i, j).clone() - mean.clone()
        } else {
            s.get(i, j).clone()
        }
    })
}

/// `(h∧k)_ijkl = h_ik k_jl + h_jl k_ik − h_il k_jk − h_jk k_il`.
pub fn kulkarni_nomizu<T: Scalar>(h: &SymTensor2<T>, k: &SymTensor2<T>) -> Result<AlgCurvTensor<T>> {
    same_dim(h.dim(), k.dim())?;
    let n = h.dim();
    let mut out = AlgCurvTensor::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = h.get(a, c).clone() * k.get(b, d).clone()
                        + h.get(b, d).clone() * k.get(a, c).clone()
                        - h.get(a, d).clone() * k.get(b, c).clone()
                        - h.get(b, c).clone() * k.get(a, d).clone();
                    let at = out.idx(a, b, c, d);
                    out.data[at] = v;
                }
            }
        }
    }
    Ok(out)
}

/// The scalars entering both pinching estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureInvariants<T> {
    /// Scalar curvature `R`.
    pub r: T,
    /// `|∘Ric|²`.
    pub ric_norm_sq: T,
    /// `∘R_ij ∘R_ik ∘R_jk`.
    pub ric_cubic: T,
    /// `R_ijkl ∘R_ik ∘R_jl`.
    pub lhs: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModifiedCurvature<T> {
    pub epsilon: T,
    pub rm_bar: AlgCurvTensor<T>,
    pub ric_bar: SymTensor2<T>,
    pub r_bar: T,
}

/// Orthonormal pair spanning a 2-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<T> {
    x: Vec<T>,
    y: Vec<T>,
}

impl<T: Scalar> Plane<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        same_dim(x.len(), y.len())?;
        let dot = |a: &[T], b: &[T]| {
            a.iter()
                .zip(b)
                .fold(T::zero(), |acc, (u, v)| acc + u.clone() * v.clone())
        };
        let residual = [
            (dot(&x, &x) - T::one()).to_f64().abs(),
            (dot(&y, &y) - T::one()).to_f64().abs(),
            dot(&x, &y).to_f64().abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if !(residual <= PLANE_TOL) {
            return Err(Error::NonOrthonormalPlane { residual });
        }
        Ok(Self { x, y })
    }

    /// The plane `e_i ∧ e_j` (0-based).
    pub fn coordinate(n: usize, i: usize, j: usize) -> Self {
        let unit = |a: usize| {
            (0..n)
                .map(|b| if a == b { T::one() } else { T::zero() })
                .collect::<Vec<_>>()
        };
        Self {
            x: unit(i),
            y: unit(j),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    /// Applies a row-major `n × n` matrix to both spanning vectors.
    pub fn transformed(&self, o: &[T]) -> Self {
        let n = self.dim();
        let apply = |v: &[T]| {
            (0..n)
                .map(|i| {
                    (0..n).fold(T::zero(), |acc, j| acc + o[i * n + j].clone() * v[j].clone())
                })
                .collect()
        };
        Self {
            x: apply(&self.x),
            y: apply(&self.y),
        }
    }
}

/// Random algebraic curvature tensor: a symmetric operator on `Λ²` with
/// standard-normal entries (snapped to the rational lattice in exact mode),
/// followed by the Bianchi projection.
pub fn random_curvature<T: Scalar>(n: usize, seed: u64) -> Result<AlgCurvTensor<T>> {
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "curvature tensors need n >= 3",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big = n * (n - 1) / 2;
    let mut form = vec![T::zero(); big * big];
    for p in 0..big {
        for q in p..big {
            let v = T::quantize(StandardNormal.sample(&mut rng));
            form[p * big + q] = v.clone();
            form[q * big + p] = v;
        }
    }
    Ok(AlgCurvTensor::from_bivector_form(n, &form)?.bianchi_projection())
}

/// Adds `(c/2) g∧g` with `c = (εR − minSec)/(1 − εn(n−1)) + margin`, so that
/// `minSec' − εR' = margin·(1 − εn(n−1))`.
pub fn shift_to_pinching<T: Scalar>(
    rm: &AlgCurvTensor<T>,
    eps: &T,
    margin: &T,
    opts: &SearchOptions,
) -> Result<AlgCurvTensor<T>> {
    let n = rm.dim();
    check_pinching_bound(n, eps)?;
    let min_sec = min_sectional(&rm.to_f64(), opts)?.value;
    let min_sec = T::from_rational(
        &crate::scalar::rational_from_f64(min_sec).ok_or(Error::NonConvergence {
            what: "min_sectional",
            iterations: 0,
            best: min_sec,
        })?,
    );
    let nn = T::from_int((n * (n - 1)) as i64);
    let c = (eps.clone() * rm.scalar() - min_sec) / (T::one() - eps.clone() * nn) + margin.clone();
    let g = SymTensor2::identity(n);
    let gg = kulkarni_nomizu(&g, &g)?;
    rm.checked_add(&gg.scaled(&(c / T::from_int(2))))
}

/// Pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn bivector_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Index of the pair `{i, j}` in [`bivector_pairs`] and the sign of the
/// permutation bringing `(i, j)` into ascending order.
pub fn pair_index(n: usize, i: usize, j: usize) -> (usize, i8) {
    let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
    // Pairs before row a: Σ_{r<a} (n − 1 − r).
    let before = a * (2 * n - a - 1) / 2;
    (before + (b - a - 1), sign)
}

fn same_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn zip_with<T: Clone>(a: &[T], b: &[T], f: impl Fn(T, T) -> T) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| f(x.clone(), y.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn kulkarni_nomizu_of_metric() {
        let g = SymTensor2::<Rational>::identity(4);
        let gg = kulkarni_nomizu(&g, &g).unwrap();
        assert_eq!(*gg.get(0, 1, 0, 1), q(2, 1));
        assert_eq!(*gg.get(0, 1, 1, 0), q(-2, 1));
        assert_eq!(*gg.get(0, 1, 2, 3), q(0, 1));
        gg.validate().unwrap();

        let z = SymTensor2::<Rational>::zeros(4);
        assert!(kulkarni_nomizu(&z, &z).unwrap().entries().iter().all(|v| v.is_zero()));
        assert!(kulkarni_nomizu(&z, &SymTensor2::zeros(3)).is_err());
    }

    #[test]
    fn space_form_contractions() {
        let kappa = q(3, 2);
        let rm = AlgCurvTensor::constant_curvature(4, kappa.clone());
        assert_eq!(rm.ricci(), SymTensor2::identity(4).scaled(&(q(3, 1) * kappa.clone())));
        assert_eq!(rm.scalar(), q(12, 1) * kappa.clone());
        assert!(rm.traceless_ricci().norm_sq().is_zero());
        for (i, j) in bivector_pairs(4) {
            assert_eq!(rm.sectional(&Plane::coordinate(4, i, j)).unwrap(), kappa);
        }
        for n in 3..=6 {
            let g = SymTensor2::<Rational>::identity(n);
            let half_gg = kulkarni_nomizu(&g, &g).unwrap().scaled(&q(1, 2));
            assert_eq!(half_gg.ricci(), g.scaled(&q(n as i64 - 1, 1)));
            assert_eq!(half_gg.scalar(), q((n * (n - 1)) as i64, 1));
        }
    }

    #[test]
    fn random_tensors_satisfy_invariants_exactly() {
        for seed in 0..5 {
            let rm = random_curvature::<Rational>(4, seed).unwrap();
            assert!(rm.symmetry_residual().is_zero());
            assert!(rm.bianchi_residual().is_zero());
            assert!(rm.traceless_ricci().trace().is_zero());
            let f = random_curvature::<f64>(5, seed).unwrap();
            assert!(f.bianchi_residual() < 1e-14);
        }
        assert_eq!(
            random_curvature::<f64>(4, 9).unwrap(),
            random_curvature::<f64>(4, 9).unwrap()
        );
        assert!(random_curvature::<f64>(2, 0).is_err());
    }

    #[test]
    fn modified_curvature_fields() {
        let rm = AlgCurvTensor::constant_curvature(4, q(1, 1));
        let same = rm.modified(&q(0, 1));
        assert_eq!(same.rm_bar, rm);
        assert_eq!(same.r_bar, rm.scalar());

        assert!(rm.modified(&q(1, 12)).r_bar.is_zero());

        let m = rm.modified(&q(1, 24));
        let plane = Plane::coordinate(4, 1, 3);
        assert_eq!(m.rm_bar.sectional(&plane).unwrap(), q(1, 2));
        assert_eq!(m.ric_bar, SymTensor2::identity(4).scaled(&q(3, 2)));
    }

    #[test]
    fn plane_rejects_non_orthonormal() {
        assert!(Plane::new(vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]).is_err());
        assert!(Plane::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.1, 0.0]).is_err());
        assert!(Plane::new(vec![1.0, 0.0], vec![0.0, 1.0, 0.0]).is_err());
        assert!(Plane::new(vec![1.0, 0.0, 0.0], vec![0.0, 0.0, -1.0]).is_ok());
    }

    #[test]
    fn pair_index_matches_enumeration() {
        for n in 3..=7 {
            for (p, &(i, j)) in bivector_pairs(n).iter().enumerate() {
                assert_eq!(pair_index(n, i, j), (p, 1));
                assert_eq!(pair_index(n, j, i), (p, -1));
            }
        }
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let rm = random_curvature::<Rational>(4, 3).unwrap();
        let doc = rm.to_json();
        assert_eq!(AlgCurvTensor::<Rational>::from_json(&doc).unwrap(), rm);
        assert!(matches!(
            AlgCurvTensor::<f64>::from_json(&doc),
            Err(Error::ModeMismatch { .. })
        ));

        // A lone R_1234 breaks the first Bianchi identity.
        let bad = json!({"n": 4, "mode": "rational", "entries": [[1, 2, 3, 4, "1"]]});
        assert!(AlgCurvTensor::<Rational>::from_json(&bad).is_err());
        let conflict = json!({"n": 4, "mode": "rational",
            "entries": [[1, 2, 1, 2, "1"], [2, 1, 1, 2, "1"]]});
        assert!(AlgCurvTensor::<Rational>::from_json(&conflict).is_err());
        let sphere = json!({"n": 3, "mode": "float",
            "entries": [[1, 2, 1, 2, 1.0], [1, 3, 1, 3, 1.0], [2, 3, 3, 2, -1.0]]});
        let s = AlgCurvTensor::<f64>::from_json(&sphere).unwrap();
        assert_eq!(s, AlgCurvTensor::constant_curvature(3, 1.0));
    }
}
