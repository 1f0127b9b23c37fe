//! Derivative-free local minimization (Nelder–Mead) used by the Grassmannian
//! search and the Q₂ outer problem.

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop when the spread of simplex values is below this...
    pub ftol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub xtol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            ftol: 1e-13,
            xtol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iters: usize,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from an axis-aligned simplex of edge `step` at `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut iters = 0;
    let mut converged = false;
    while iters < opts.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        let spread = worst - best;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist_inf(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if spread <= opts.ftol * best.abs().max(1.0) && diameter <= opts.xtol {
            converged = true;
            break;
        }
        iters += 1;

        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(ALPHA);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(GAMMA);
            let fe = eval(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let xc = along(RHO);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-RHO);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = x_best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, v)| b + SIGMA * (v - b))
                        .collect();
                    let fx = eval(&x);
                    *vertex = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        fx,
        iters,
        evals,
        converged,
    }
}

/// Runs [`nelder_mead`] and restarts once from the result with a fresh
/// simplex, which guards against collapse onto a non-stationary face.
pub fn nelder_mead_restarted<F>(
    f: F,
    x0: &[f64],
    step: f64,
    opts: &NelderMeadOptions,
) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let first = nelder_mead(&f, x0, step, opts);
    let second = nelder_mead(&f, &first.x, step * 1e-2, opts);
    let (x, fx) = if second.fx <= first.fx {
        (second.x, second.fx)
    } else {
        (first.x, first.fx)
    };
    NelderMeadResult {
        x,
        fx,
        iters: first.iters + second.iters,
        evals: first.evals + second.evals,
        converged: first.converged && second.converged,
    }
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let res = nelder_mead_restarted(rosen, &[-1.2, 1.0], 0.5, &NelderMeadOptions::default());
        assert!(res.converged);
        assert!((res.x[0] - 1.0).abs() < 1e-6 && (res.x[1] - 1.0).abs() < 1e-6, "{:?}", res.x);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = NelderMeadOptions {
            max_iters: 3,
            ..Default::default()
        };
        let res = nelder_mead(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[5.0, 5.0], 1.0, &opts);
        assert!(!res.converged);
    }
}
