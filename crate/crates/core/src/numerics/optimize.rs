use rand::Rng;

use crate::error::{invalid, Result};
use crate::seed;

/// Axis-aligned parameter box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstraint {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxConstraint {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return invalid("box bounds must be nonempty and of equal length");
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return invalid(format!("bad box side [{l}, {u}]"));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Whether coordinate `i` of `x` lies within `frac` of the box width of a bound.
    pub fn near_boundary(&self, x: &[f64], frac: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .any(|(v, (l, u))| {
                let w = u - l;
                (v - l) <= frac * w || (u - v) <= frac * w
            })
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub max_evals: usize,
    /// Stop when every vertex is within this distance of the best one.
    pub tol: f64,
    /// Initial simplex edge as a fraction of each box side.
    pub initial_step: f64,
    pub restart_seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            tol: 1e-6,
            initial_step: 0.1,
            restart_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// The objective did not change anywhere on the initial simplex, so the
    /// minimizer is not identified and `x` is the starting point.
    pub flat: bool,
}

/// Nelder-Mead with box projection and default options.
pub fn minimize_derivative_free<F>(
    objective: F,
    bounds: &BoxConstraint,
    init: &[f64],
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    minimize_with_options(objective, bounds, init, &MinimizeOptions::default())
}

/// Nelder-Mead simplex descent; every trial point is projected into the box.
/// After the first convergence the search restarts once from the incumbent
/// with a randomly scaled simplex, sharing the evaluation budget.
pub fn minimize_with_options<F>(
    mut objective: F,
    bounds: &BoxConstraint,
    init: &[f64],
    opts: &MinimizeOptions,
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    if init.len() != bounds.dim() {
        return invalid(format!(
            "init has {} entries, box has {}",
            init.len(),
            bounds.dim()
        ));
    }
    if !bounds.contains(init) {
        return invalid(format!("init {init:?} lies outside the box"));
    }
    let f0 = objective(init);
    if f0.is_nan() {
        return invalid(format!("objective is NaN at init {init:?}"));
    }
    let mut evals = 1usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let steps: Vec<f64> = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(l, u)| opts.initial_step * (u - l))
        .collect();
    let simplex = initial_simplex(bounds, init, &steps);
    let mut pts: Vec<(Vec<f64>, f64)> = vec![(init.to_vec(), f0)];
    for p in simplex.into_iter().skip(1) {
        let v = eval(&p, &mut evals);
        pts.push((p, v));
    }
    if pts.iter().all(|(_, v)| *v == f0) {
        return Ok(Minimum {
            x: init.to_vec(),
            value: f0,
            evaluations: evals,
            converged: true,
            flat: true,
        });
    }

    let mut converged = nelder_mead(&mut pts, bounds, opts, &mut evals, &mut eval);
    let mut best = best_of(&pts);

    if evals < opts.max_evals {
        let mut rng = seed::rng(opts.restart_seed);
        let scaled: Vec<f64> = steps
            .iter()
            .map(|s| s * rng.random_range(0.25..1.0))
            .collect();
        let start = best.0.clone();
        let mut pts2: Vec<(Vec<f64>, f64)> = vec![best.clone()];
        for p in initial_simplex(bounds, &start, &scaled).into_iter().skip(1) {
            let v = eval(&p, &mut evals);
            pts2.push((p, v));
        }
        let c2 = nelder_mead(&mut pts2, bounds, opts, &mut evals, &mut eval);
        let b2 = best_of(&pts2);
        converged = c2 || converged;
        if b2.1 < best.1 {
            best = b2;
            converged = c2;
        }
    }

    Ok(Minimum {
        x: best.0,
        value: best.1,
        evaluations: evals,
        converged,
        flat: false,
    })
}

fn initial_simplex(bounds: &BoxConstraint, x0: &[f64], steps: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut p = x0.to_vec();
        p[i] = if x0[i] + steps[i] <= bounds.upper[i] {
            x0[i] + steps[i]
        } else {
            x0[i] - steps[i]
        };
        bounds.project(&mut p);
        out.push(p);
    }
    out
}

fn best_of(pts: &[(Vec<f64>, f64)]) -> (Vec<f64>, f64) {
    pts.iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .expect("nonempty simplex")
}

fn nelder_mead<E>(
    pts: &mut [(Vec<f64>, f64)],
    bounds: &BoxConstraint,
    opts: &MinimizeOptions,
    evals: &mut usize,
    eval: &mut E,
) -> bool
where
    E: FnMut(&[f64], &mut usize) -> f64,
{
    let n = pts.len() - 1;
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        let mut p: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect();
        bounds.project(&mut p);
        p
    };
    loop {
        // stable sort keeps the earlier vertex first on ties
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = pts[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&pts[0].0)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < opts.tol {
            return true;
        }
        if *evals >= opts.max_evals {
            return false;
        }
        let mut centroid = vec![0.0; n];
        for (p, _) in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = pts[n].clone();
        let xr = along(&centroid, &worst.0, -1.0);
        let fr = eval(&xr, evals);
        if fr < pts[0].1 {
            let xe = along(&centroid, &worst.0, -2.0);
            let fe = eval(&xe, evals);
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[n - 1].1 {
            pts[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(&centroid, &worst.0, -0.5);
                let fc = eval(&xc, evals);
                (xc, fc)
            } else {
                let xc = along(&centroid, &worst.0, 0.5);
                let fc = eval(&xc, evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                pts[n] = (xc, fc);
            } else {
                let best = pts[0].0.clone();
                for vertex in pts.iter_mut().skip(1) {
                    let p = along(&best, &vertex.0, 0.5);
                    let v = eval(&p, evals);
                    *vertex = (p, v);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_1d() {
        let b = BoxConstraint::new(vec![0.0], vec![3.0]).unwrap();
        let m = minimize_derivative_free(|x| (x[0] - 1.0).powi(2), &b, &[0.5]).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4);
        assert!(m.converged && !m.flat);
    }

    #[test]
    fn constant_objective_is_flagged() {
        let b = BoxConstraint::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let m = minimize_derivative_free(|_| 3.0, &b, &[0.2, 0.7]).unwrap();
        assert!(m.flat);
        assert_eq!(m.x, vec![0.2, 0.7]);
    }

    #[test]
    fn rosenbrock() {
        let b = BoxConstraint::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize_derivative_free(f, &b, &[0.0, 0.0]).unwrap();
        assert!(
            (m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3,
            "{:?}",
            m
        );
    }

    #[test]
    fn minimum_on_the_boundary() {
        let b = BoxConstraint::new(vec![1.0], vec![4.0]).unwrap();
        let m = minimize_derivative_free(|x| x[0], &b, &[2.0]).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_init() {
        let b = BoxConstraint::new(vec![0.0], vec![1.0]).unwrap();
        assert!(minimize_derivative_free(|x| x[0], &b, &[2.0]).is_err());
        assert!(minimize_derivative_free(|_| f64::NAN, &b, &[0.5]).is_err());
        assert!(BoxConstraint::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn deterministic() {
        let b = BoxConstraint::new(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap();
        let f = |x: &[f64]| (x[0] - 0.3).abs() + (x[1] + 1.1).abs();
        let a = minimize_derivative_free(f, &b, &[0.0, 0.0]).unwrap();
        let c = minimize_derivative_free(f, &b, &[0.0, 0.0]).unwrap();
        assert_eq!(a, c);
    }
}
