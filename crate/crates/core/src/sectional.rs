//! Minimum sectional curvature over the Grassmannian `G(2, n)`.
//!
//! A plane is parametrized in one of the `C(n, 2)` affine charts
//! `span(e_a + Σ w_c e_c, e_b + Σ w'_c e_c)` (`c ∉ {a, b}`). Every plane has a
//! chart where the coordinates lie in `[-1, 1]^{2(n-2)}` (pick the pair of
//! rows with the largest 2×2 minor), so a stratified grid over the cube in
//! every chart covers `G(2, n)`. The best grid cells seed Nelder–Mead.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead_restarted, NelderMeadOptions};
use crate::tensor::{bivector_pairs, AlgCurvTensor, Plane};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Total number of grid points across all charts.
    pub grid_budget: usize,
    /// Number of best grid cells refined locally.
    pub starts: usize,
    /// Target absolute accuracy of the minimum.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_budget: 160_000,
            starts: 32,
            tol: 1e-8,
            max_iters: 20_000,
        }
    }
}

impl SearchOptions {
    /// Smaller grid for sampling campaigns where the search runs per sample.
    pub fn campaign() -> Self {
        Self {
            grid_budget: 20_000,
            starts: 8,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SectionalMin {
    pub value: f64,
    pub plane: Plane<f64>,
    pub evaluations: usize,
}

/// Sectional curvature as a quadratic form on bivectors.
pub struct BivectorForm {
    pairs: Vec<(usize, usize)>,
    form: Vec<f64>,
}

impl BivectorForm {
    pub fn new(rm: &AlgCurvTensor<f64>) -> Self {
        let n = rm.dim();
        let pairs = bivector_pairs(n);
        let big = pairs.len();
        let mut form = vec![0.0; big * big];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, l)) in pairs.iter().enumerate() {
                form[p * big + q] = *rm.get(i, j, k, l);
            }
        }
        Self { pairs, form }
    }

    /// Sectional curvature of `span(u, v)` for any independent `u, v`.
    pub fn sectional_span(&self, u: &[f64], v: &[f64], wedge: &mut Vec<f64>) -> f64 {
        wedge.clear();
        wedge.extend(self.pairs.iter().map(|&(i, j)| u[i] * v[j] - u[j] * v[i]));
        let big = self.pairs.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for p in 0..big {
            let wp = wedge[p];
            den += wp * wp;
            let row = &self.form[p * big..(p + 1) * big];
            num += wp * row.iter().zip(wedge.iter()).map(|(f, w)| f * w).sum::<f64>();
        }
        num / den
    }
}

struct Chart {
    a: usize,
    b: usize,
    rest: Vec<usize>,
}

impl Chart {
    fn all(n: usize) -> Vec<Chart> {
        bivector_pairs(n)
            .into_iter()
            .map(|(a, b)| Chart {
                a,
                b,
                rest: (0..n).filter(|&c| c != a && c != b).collect(),
            })
            .collect()
    }

    fn span(&self, n: usize, w: &[f64], u: &mut [f64], v: &mut [f64]) {
        u.iter_mut().for_each(|x| *x = 0.0);
        v.iter_mut().for_each(|x| *x = 0.0);
        u[self.a] = 1.0;
        v[self.b] = 1.0;
        let m = n - 2;
        for (t, &c) in self.rest.iter().enumerate() {
            u[c] = w[t];
            v[c] = w[m + t];
        }
    }
}

/// Minimal sectional curvature with the plane attaining it.
///
/// Returns [`Error::NonConvergence`] when the local refinement of the best
/// candidate does not meet its stopping rule within `opts.max_iters`.
pub fn min_sectional(rm: &AlgCurvTensor<f64>, opts: &SearchOptions) -> Result<SectionalMin> {
    let n = rm.dim();
    if !(3..=8).contains(&n) {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "Grassmannian search supports 3 <= n <= 8",
        });
    }
    let form = BivectorForm::new(rm);
    let charts = Chart::all(n);
    let dim = 2 * (n - 2);
    let per_chart = (opts.grid_budget / charts.len()).max(1);
    let per_axis = ((per_chart as f64).powf(1.0 / dim as f64).floor() as usize).max(2);
    let cell = 2.0 / per_axis as f64;
    let total = per_axis.pow(dim as u32);

    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut wedge = Vec::new();
    let mut w = vec![0.0; dim];
    let mut evaluations = 0usize;

    // (value, chart, cell index); kept sorted, ties resolved by scan order.
    let mut best: Vec<(f64, usize, usize)> = Vec::with_capacity(opts.starts + 1);
    for (ci, chart) in charts.iter().enumerate() {
        for cell_ix in 0..total {
            let mut rem = cell_ix;
            for coord in w.iter_mut() {
                *coord = -1.0 + cell * ((rem % per_axis) as f64 + 0.5);
                rem /= per_axis;
            }
            chart.span(n, &w, &mut u, &mut v);
            let val = form.sectional_span(&u, &v, &mut wedge);
            evaluations += 1;
            if best.len() < opts.starts || val < best[best.len() - 1].0 {
                let pos = best.partition_point(|b| b.0 <= val);
                best.insert(pos, (val, ci, cell_ix));
                best.truncate(opts.starts);
            }
        }
    }

    let nm = NelderMeadOptions {
        max_iters: opts.max_iters,
        ftol: (opts.tol * 1e-4).min(1e-12),
        xtol: 1e-7,
    };
    let mut winner: Option<(f64, usize, Vec<f64>, bool)> = None;
    for &(_, ci, cell_ix) in &best {
        let chart = &charts[ci];
        let mut rem = cell_ix;
        let start: Vec<f64> = (0..dim)
            .map(|_| {
                let c = -1.0 + cell * ((rem % per_axis) as f64 + 0.5);
                rem /= per_axis;
                c
            })
            .collect();
        let objective = |w: &[f64]| {
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            let mut wedge = Vec::new();
            chart.span(n, w, &mut u, &mut v);
            form.sectional_span(&u, &v, &mut wedge)
        };
        let res = nelder_mead_restarted(objective, &start, cell * 0.5, &nm);
        evaluations += res.evals;
        if winner.as_ref().is_none_or(|w| res.fx < w.0) {
            winner = Some((res.fx, ci, res.x, res.converged));
        }
    }

    let (value, ci, x, converged) = winner.expect("at least one start");
    if !converged {
        return Err(Error::NonConvergence {
            what: "min_sectional local refinement",
            iterations: opts.max_iters,
            best: value,
        });
    }
    charts[ci].span(n, &x, &mut u, &mut v);
    let plane = orthonormalize(&u, &v);
    Ok(SectionalMin {
        value,
        plane,
        evaluations,
    })
}

/// Minimum over `samples` Haar-random planes; a Monte Carlo cross-check for
/// [`min_sectional`] that shares nothing with it beyond the definition.
pub fn sampled_min_sectional(rm: &AlgCurvTensor<f64>, samples: usize, seed: u64) -> f64 {
    let n = rm.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..samples {
        for c in x.iter_mut().chain(y.iter_mut()) {
            *c = StandardNormal.sample(&mut rng);
        }
        let p = orthonormalize(&x, &y);
        let val = rm.sectional(&p).expect("orthonormal by construction");
        best = best.min(val);
    }
    best
}

/// Gram–Schmidt on two independent vectors.
pub fn orthonormalize(u: &[f64], v: &[f64]) -> Plane<f64> {
    let norm = |a: &[f64]| a.iter().map(|c| c * c).sum::<f64>().sqrt();
    let x: Vec<f64> = {
        let s = norm(u);
        u.iter().map(|c| c / s).collect()
    };
    let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    let y: Vec<f64> = {
        let r: Vec<f64> = v.iter().zip(&x).map(|(b, a)| b - dot * a).collect();
        let s = norm(&r);
        r.iter().map(|c| c / s).collect()
    };
    Plane::new(x, y).expect("Gram-Schmidt output is orthonormal")
}
