//! Closed-form model geometries: the space forms, `ℂP²`, the product
//! `S² × S²`, the cylinder `S³ × ℝ` and the Gaussian shrinker on `ℝⁿ`.
//!
//! All models are homogeneous, so curvature is evaluated at one point and
//! every covariant derivative of curvature vanishes. Quotients (`ℝP⁴`) are
//! represented by their universal cover.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::sectional::{min_sectional, sampled_min_sectional, SearchOptions};
use crate::tensor::{AlgCurvTensor, SymTensor2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Potential {
    /// `f` constant; the metric is Einstein with `Ric = λg`.
    Constant,
    /// `f = (λ/2) Σ_{a ∈ axes} x_a²` along the flat factor.
    Gaussian { axes: Vec<usize> },
    /// Not a gradient soliton (e.g. `S²(κ₁) × S²(κ₂)` with `κ₁ ≠ κ₂`).
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelGeometry {
    /// Canonical name, e.g. `sphere(4,1)`.
    pub name: String,
    pub n: usize,
    pub rm: AlgCurvTensor<Rational>,
    /// `λ` in `Ric + ∇²f = λg`; zero when there is no potential.
    pub soliton_constant: Rational,
    pub potential: Potential,
    pub einstein: bool,
    pub compact: bool,
    /// Minimum sectional curvature in closed form.
    pub min_sec: Rational,
}

impl ModelGeometry {
    fn build(
        name: String,
        rm: AlgCurvTensor<Rational>,
        soliton_constant: Rational,
        potential: Potential,
        compact: bool,
        min_sec: Rational,
    ) -> Result<Self> {
        rm.validate()?;
        let einstein = rm.traceless_ricci().norm_sq().is_zero();
        Ok(Self {
            name,
            n: rm.dim(),
            rm,
            soliton_constant,
            potential,
            einstein,
            compact,
            min_sec,
        })
    }

    pub fn scalar(&self) -> Rational {
        self.rm.scalar()
    }

    /// `∇²f` at the origin of the flat factor (constant for all models).
    pub fn hessian_f(&self) -> Option<SymTensor2<Rational>> {
        let lambda = &self.soliton_constant;
        match &self.potential {
            Potential::Constant => Some(SymTensor2::zeros(self.n)),
            Potential::Gaussian { axes } => Some(SymTensor2::from_fn(self.n, |i, j| {
                if i == j && axes.contains(&i) {
                    lambda.clone()
                } else {
                    Rational::zero()
                }
            })),
            Potential::None => None,
        }
    }

    /// Same geometry with the metric scaled so that curvature scales by `c`.
    pub fn rescaled(&self, c: &Rational) -> Result<Self> {
        Self::build(
            format!("{}*{}", self.name, c),
            self.rm.scaled(c),
            self.soliton_constant.clone() * c.clone(),
            self.potential.clone(),
            self.compact,
            self.min_sec.clone() * c.clone(),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "n": self.n,
            "r": self.scalar().to_json(),
            "solitonConstant": self.soliton_constant.to_json(),
            "potential": self.potential,
            "einstein": self.einstein,
            "compact": self.compact,
            "minSec": self.min_sec.to_json(),
        })
    }
}

impl fmt::Display for ModelGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

/// Space form of curvature `κ`: `(κ/2) g∧g`. Soliton constant `(n−1)κ`.
pub fn sphere(n: usize, kappa: Rational) -> Result<ModelGeometry> {
    if n < 3 || kappa <= Rational::zero() {
        return Err(Error::UnknownModel(format!("sphere({n},{kappa}) needs n >= 3, kappa > 0")));
    }
    let lambda = Rational::from_int(n as i64 - 1) * kappa.clone();
    ModelGeometry::build(
        format!("sphere({n},{kappa})"),
        AlgCurvTensor::constant_curvature(n, kappa.clone()),
        lambda,
        Potential::Constant,
        true,
        kappa,
    )
}

/// Euclidean space with the Gaussian potential `f = (λ/2)|x|²`.
pub fn flat(n: usize, lambda: Rational) -> Result<ModelGeometry> {
    if n < 3 || lambda <= Rational::zero() {
        return Err(Error::UnknownModel(format!("flat({n},{lambda}) needs n >= 3, lambda > 0")));
    }
    ModelGeometry::build(
        format!("flat({n},{lambda})"),
        AlgCurvTensor::zeros(n),
        lambda,
        Potential::Gaussian {
            axes: (0..n).collect(),
        },
        false,
        Rational::zero(),
    )
}

/// `S²(κ₁) × S²(κ₂)`; a soliton (Einstein) only when `κ₁ = κ₂`.
pub fn product_spheres(k1: Rational, k2: Rational) -> Result<ModelGeometry> {
    if k1 <= Rational::zero() || k2 <= Rational::zero() {
        return Err(Error::UnknownModel(format!("product_spheres({k1},{k2}) needs positive curvatures")));
    }
    let mut rm = AlgCurvTensor::zeros(4);
    rm.set(0, 1, 0, 1, k1.clone());
    rm.set(2, 3, 2, 3, k2.clone());
    let (lambda, potential) = if k1 == k2 {
        (k1.clone(), Potential::Constant)
    } else {
        (Rational::zero(), Potential::None)
    };
    ModelGeometry::build(
        format!("product_spheres({k1},{k2})"),
        rm,
        lambda,
        potential,
        true,
        Rational::zero(),
    )
}

/// `ℂP²` with holomorphic sectional curvature 4:
/// `R_ijkl = δ_ikδ_jl − δ_ilδ_jk + J_ikJ_jl − J_ilJ_jk + 2J_ijJ_kl`, where
/// `Je₁ = e₂`, `Je₃ = e₄`. Then `Sec(x, y) = 1 + 3⟨Jx, y⟩²` and `Ric = 6g`.
pub fn fubini_study_cp2() -> Result<ModelGeometry> {
    let n = 4;
    let mut jm = [[0i64; 4]; 4];
    jm[1][0] = 1;
    jm[0][1] = -1;
    jm[3][2] = 1;
    jm[2][3] = -1;
    let d = |a: usize, b: usize| i64::from(a == b);
    let mut rm = AlgCurvTensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = d(i, k) * d(j, l) - d(i, l) * d(j, k) + jm[i][k] * jm[j][l]
                        - jm[i][l] * jm[j][k]
                        + 2 * jm[i][j] * jm[k][l];
                    if v != 0 {
                        rm.set(i, j, k, l, Rational::from_int(v));
                    }
                }
            }
        }
    }
    ModelGeometry::build(
        "fubini_study_cp2".to_owned(),
        rm,
        q(6, 1),
        Potential::Constant,
        true,
        q(1, 1),
    )
}

/// `S³(κ) × ℝ` with `f = (λ/2)t²`, `λ = 2κ`.
pub fn round_cylinder_s3xr(kappa: Rational) -> Result<ModelGeometry> {
    if kappa <= Rational::zero() {
        return Err(Error::UnknownModel(format!("round_cylinder_s3xr({kappa}) needs kappa > 0")));
    }
    let mut rm = AlgCurvTensor::zeros(4);
    for i in 0..3 {
        for j in i + 1..3 {
            rm.set(i, j, i, j, kappa.clone());
        }
    }
    ModelGeometry::build(
        format!("round_cylinder_s3xr({kappa})"),
        rm,
        q(2, 1) * kappa,
        Potential::Gaussian { axes: vec![3] },
        false,
        Rational::zero(),
    )
}

/// Resolves a model name with optional arguments, e.g. `sphere(4,1)`,
/// `sphere`, `cp2`, `flat(4,1/2)`, `product_spheres(1,2)`, `s3xr`.
pub fn model(name: &str) -> Result<ModelGeometry> {
    let trimmed = name.trim();
    let (head, args) = match trimmed.split_once('(') {
        Some((h, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownModel(name.to_owned()))?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?
            };
            (h.trim(), args)
        }
        None => (trimmed, Vec::new()),
    };
    let unknown = || Error::UnknownModel(name.to_owned());
    let dim = |v: &Rational| -> Result<usize> {
        if !v.denom().eq(&1.into()) {
            return Err(unknown());
        }
        match v.to_i64() {
            Some(d) if (3..=16).contains(&d) => Ok(d as usize),
            _ => Err(unknown()),
        }
    };
    let head = head.to_ascii_lowercase().replace('-', "_");
    match (head.as_str(), args.as_slice()) {
        ("sphere" | "s4" | "round_sphere", []) => sphere(4, q(1, 1)),
        ("sphere", [n]) => sphere(dim(n)?, q(1, 1)),
        ("sphere", [n, k]) => sphere(dim(n)?, k.clone()),
        ("rp4" | "real_projective_rp4", []) => {
            let mut m = sphere(4, q(1, 1))?;
            m.name = "real_projective_rp4".to_owned();
            Ok(m)
        }
        ("flat" | "r4" | "gaussian", []) => flat(4, q(1, 2)),
        ("flat", [n]) => flat(dim(n)?, q(1, 2)),
        ("flat", [n, l]) => flat(dim(n)?, l.clone()),
        ("product_spheres" | "s2xs2", []) => product_spheres(q(1, 1), q(1, 1)),
        ("product_spheres", [k1, k2]) => product_spheres(k1.clone(), k2.clone()),
        ("fubini_study_cp2" | "cp2", []) => fubini_study_cp2(),
        ("round_cylinder_s3xr" | "s3xr" | "cylinder", []) => round_cylinder_s3xr(q(1, 1)),
        ("round_cylinder_s3xr", [k]) => round_cylinder_s3xr(k.clone()),
        _ => Err(unknown()),
    }
}

/// The models run by the harness; all are gradient shrinking solitons.
pub fn shipped_models() -> Vec<ModelGeometry> {
    [
        "sphere(4,1)",
        "real_projective_rp4",
        "flat(4,1/2)",
        "flat(4,1)",
        "product_spheres(1,1)",
        "fubini_study_cp2",
        "round_cylinder_s3xr(1)",
    ]
    .iter()
    .map(|n| model(n).expect("shipped model names resolve"))
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdReport {
    pub name: String,
    /// `"positive"` when `R > 0`; `"flat"` when `R = 0`, reported separately
    /// without a ratio.
    pub branch: &'static str,
    pub r: String,
    /// Minimum sectional curvature from the Grassmannian search.
    pub min_sec: f64,
    pub ratio: Option<f64>,
    /// `minSec/R` from the closed-form minimum.
    pub exact_ratio: Option<String>,
    /// Minimum over random planes divided by `R`, when requested.
    pub oracle_ratio: Option<f64>,
    /// `ratio >= 1/24` (exact ratio when available); vacuous on the flat
    /// branch.
    pub passes_1_24: bool,
    pub einstein: bool,
}

pub fn pinching_threshold(m: &ModelGeometry, oracle_samples: Option<usize>) -> Result<ThresholdReport> {
    let r = m.scalar();
    let rm = m.rm.to_f64();
    let min_sec = min_sectional(&rm, &SearchOptions::default())?.value;
    let r_f = Scalar::to_f64(&r);
    let positive = r > Rational::zero();
    let exact = positive.then(|| m.min_sec.clone() / r.clone());
    let ratio = positive.then(|| min_sec / r_f);
    let oracle_ratio = match (positive, oracle_samples) {
        (true, Some(k)) => Some(sampled_min_sectional(&rm, k, 0x5eed) / r_f),
        _ => None,
    };
    let passes = match &exact {
        Some(e) => *e >= q(1, 24),
        None => true,
    };
    Ok(ThresholdReport {
        name: m.name.clone(),
        branch: if positive { "positive" } else { "flat" },
        r: r.to_string(),
        min_sec,
        ratio,
        exact_ratio: exact.map(|e| e.to_string()),
        oracle_ratio,
        passes_1_24: passes,
        einstein: m.einstein,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub lhs: String,
    pub rhs: String,
    /// `lhs − rhs` (max-abs over components for tensor identities).
    pub residual: String,
    /// `"exact"`, `"trivial"` (both sides identically zero), or
    /// `"not-applicable"` with the reason in `note`.
    pub status: &'static str,
    pub note: Option<String>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.status == "not-applicable" || self.residual == "0"
    }
}

fn check(identity: &'static str, lhs: Rational, rhs: Rational) -> IdentityCheck {
    let trivial = lhs.is_zero() && rhs.is_zero();
    IdentityCheck {
        identity,
        residual: (lhs.clone() - rhs.clone()).to_string(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        status: if trivial { "trivial" } else { "exact" },
        note: None,
    }
}

fn max_abs_sym(s: &SymTensor2<Rational>) -> Rational {
    s.entries()
        .iter()
        .fold(Rational::zero(), |acc, v| if v.abs() > acc { v.abs() } else { acc })
}

/// Evaluates both sides of the soliton equation and of the standard
/// formulas for `Δf`, `Δ_f R`, `Δ_f Ric`, `Δ_f |∘Ric|²` and the integral
/// identity for `|∇R|²` at a point, in exact arithmetic.
///
/// All curvature quantities are parallel on these models, so every `Δ_f` of
/// a curvature quantity and `|∇∘Ric|²` and `|∇R|²` vanish.
pub fn soliton_identity_check(m: &ModelGeometry) -> Result<Vec<IdentityCheck>> {
    let hess = m
        .hessian_f()
        .ok_or_else(|| Error::NoClosedFormPotential(m.name.clone()))?;
    let n = m.n;
    let nn = Rational::from_int(n as i64);
    let lambda = m.soliton_constant.clone();
    let g = SymTensor2::<Rational>::identity(n);
    let ric = m.rm.ricci();
    let r = m.rm.scalar();
    let tric = m.rm.traceless_ricci();
    let tric_sq = tric.norm_sq();
    let two = q(2, 1);
    let mut out = Vec::new();

    // Ric + ∇²f − λg = 0, componentwise.
    let eq = SymTensor2::from_fn(n, |i, j| ric.get(i, j).clone() + hess.get(i, j).clone());
    let soliton = eq.checked_sub(&g.scaled(&lambda))?;
    out.push(IdentityCheck {
        identity: "Ric + Hess f = lambda g",
        lhs: "Ric + Hess f".to_owned(),
        rhs: format!("{lambda} g"),
        residual: max_abs_sym(&soliton).to_string(),
        status: "exact",
        note: None,
    });

    out.push(check("Delta f = n lambda - R", hess.trace(), nn.clone() * lambda.clone() - r.clone()));

    out.push(check(
        "Delta_f R = 2 lambda R - 2 |Ric|^2",
        Rational::zero(),
        two.clone() * lambda.clone() * r.clone() - two.clone() * ric.norm_sq(),
    ));

    // 2λR_ik − 2 R_ijkl R_jl for every (i, k).
    let contracted = SymTensor2::from_fn(n, |i, k| {
        let mut acc = Rational::zero();
        for j in 0..n {
            for l in 0..n {
                acc += m.rm.get(i, j, k, l).clone() * ric.get(j, l).clone();
            }
        }
        two.clone() * lambda.clone() * ric.get(i, k).clone() - two.clone() * acc
    });
    let mut ric_check = check("Delta_f R_ik = 2 lambda R_ik - 2 R_ijkl R_jl", Rational::zero(), max_abs_sym(&contracted));
    ric_check.rhs = format!("max_ik |.| = {}", ric_check.rhs);
    out.push(ric_check);

    let lhs_contraction = m.rm.contract_twice(&tric)?;
    out.push(check(
        "1/2 Delta_f |Ric0|^2 = |grad Ric0|^2 + 2 lambda |Ric0|^2 - 2 Rm(Ric0,Ric0) - (2/n) R |Ric0|^2",
        Rational::zero(),
        two.clone() * lambda.clone() * tric_sq.clone()
            - two.clone() * lhs_contraction
            - two.clone() / nn.clone() * r.clone() * tric_sq.clone(),
    ));

    let id_name = "int |grad R|^2 = (n-4)/2 lambda int R^2 - (n-4)/(2n) int R^3 + 2 int R |Ric0|^2";
    let n4 = Rational::from_int(n as i64 - 4);
    let id_rhs = n4.clone() / two.clone() * lambda.clone() * r.clone() * r.clone()
        - n4 / (two.clone() * nn) * r.clone() * r.clone() * r.clone()
        + two * r.clone() * tric_sq;
    if m.compact || r.is_zero() {
        out.push(check(id_name, Rational::zero(), id_rhs));
    } else {
        out.push(IdentityCheck {
            identity: id_name,
            lhs: "0".to_owned(),
            rhs: id_rhs.to_string(),
            residual: (-id_rhs).to_string(),
            status: "not-applicable",
            note: Some("integral identity needs a compact soliton; this model is noncompact".to_owned()),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LiteratureConstant {
    pub key: &'static str,
    pub label: &'static str,
    pub exact: &'static str,
    pub value: f64,
}

/// Known pinching constants forcing a four-dimensional Einstein (or
/// soliton, for the last entry) metric to be a space form or `ℂP²`.
pub fn literature_constants() -> Vec<LiteratureConstant> {
    vec![
        LiteratureConstant {
            key: "yang",
            label: "Yang (Einstein)",
            exact: "(sqrt(1249)-23)/480",
            value: (1249f64.sqrt() - 23.0) / 480.0,
        },
        LiteratureConstant {
            key: "costa",
            label: "Costa (Einstein)",
            exact: "(2-sqrt(2))/24",
            value: (2.0 - 2f64.sqrt()) / 24.0,
        },
        LiteratureConstant {
            key: "ribeiro",
            label: "Ribeiro (Einstein)",
            exact: "1/48",
            value: 1.0 / 48.0,
        },
        LiteratureConstant {
            key: "soliton",
            label: "Shrinking soliton",
            exact: "1/24",
            value: 1.0 / 24.0,
        },
    ]
}

/// One row per model: its ratio and whether it meets each constant.
pub fn comparison_table(models: &[ModelGeometry]) -> Result<Value> {
    let constants = literature_constants();
    let rows = models
        .iter()
        .map(|m| {
            let t = pinching_threshold(m, None)?;
            let meets: serde_json::Map<String, Value> = constants
                .iter()
                .map(|c| {
                    let v = match t.ratio {
                        Some(r) => Value::Bool(r >= c.value - 1e-9),
                        None => Value::Null,
                    };
                    (c.key.to_owned(), v)
                })
                .collect();
            Ok(json!({
                "model": m.name,
                "ratio": t.ratio,
                "exactRatio": t.exact_ratio,
                "einstein": m.einstein,
                "meets": meets,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "constants": constants, "models": rows }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_and_cp2_invariants() {
        let s = model("sphere(4,1)").unwrap();
        assert_eq!(s.scalar(), q(12, 1));
        assert!(s.einstein);
        let cp2 = model("cp2").unwrap();
        assert_eq!(cp2.rm.ricci(), SymTensor2::identity(4).scaled(&q(6, 1)));
        assert_eq!(cp2.scalar(), q(24, 1));
        assert!(cp2.einstein);
        assert_eq!(cp2.rm.get(0, 1, 0, 1), &q(4, 1));
        assert_eq!(cp2.rm.get(0, 2, 0, 2), &q(1, 1));
    }

    #[test]
    fn products_and_cylinder() {
        let p = model("product_spheres(1,1)").unwrap();
        assert_eq!(p.scalar(), q(4, 1));
        assert!(p.einstein);
        assert_eq!(p.soliton_constant, q(1, 1));
        let uneven = model("product_spheres(1,2)").unwrap();
        assert!(!uneven.einstein);
        assert!(matches!(soliton_identity_check(&uneven), Err(Error::NoClosedFormPotential(_))));
        let c = model("s3xr").unwrap();
        assert_eq!(c.scalar(), q(6, 1));
        assert!(!c.einstein);
    }

    #[test]
    fn thresholds() {
        let t = pinching_threshold(&model("sphere(4,1)").unwrap(), None).unwrap();
        assert_eq!(t.exact_ratio.as_deref(), Some("1/12"));
        assert!(t.passes_1_24);
        let t = pinching_threshold(&model("cp2").unwrap(), None).unwrap();
        assert!((t.ratio.unwrap() - 1.0 / 24.0).abs() < 1e-6);
        assert_eq!(t.exact_ratio.as_deref(), Some("1/24"));
        let t = pinching_threshold(&model("s2xs2").unwrap(), None).unwrap();
        assert!(t.ratio.unwrap().abs() < 1e-9 && !t.passes_1_24);
        let t = pinching_threshold(&model("flat").unwrap(), None).unwrap();
        assert_eq!(t.branch, "flat");
        assert!(t.ratio.is_none() && t.passes_1_24);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        for name in ["cp2", "sphere(4,1)", "s3xr"] {
            let m = model(name).unwrap();
            let a = pinching_threshold(&m, None).unwrap();
            let b = pinching_threshold(&m.rescaled(&q(2, 1)).unwrap(), None).unwrap();
            assert_eq!(a.exact_ratio, b.exact_ratio);
            assert!((a.ratio.unwrap() - b.ratio.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn identities_hold_on_shipped_models() {
        for m in shipped_models() {
            for c in soliton_identity_check(&m).unwrap() {
                assert!(c.holds(), "{}: {:?}", m.name, c);
            }
        }
        let c = soliton_identity_check(&model("s3xr").unwrap()).unwrap();
        assert_eq!(c.last().unwrap().status, "not-applicable");
    }

    #[test]
    fn names_and_errors() {
        assert_eq!(model("sphere").unwrap().name, "sphere(4,1)");
        assert_eq!(model("flat(4, 1)").unwrap().soliton_constant, q(1, 1));
        for bad in ["torus", "sphere(2)", "sphere(4,-1)", "sphere(4", "flat(1/2)", "cp2(3)"] {
            assert!(model(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn literature_values() {
        let c = literature_constants();
        assert!((c[0].value - 0.025711).abs() < 1e-6);
        assert!((c[1].value - 0.024408).abs() < 1e-6);
        assert_eq!(c[2].value, 1.0 / 48.0);
    }
}
