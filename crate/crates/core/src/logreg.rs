//! L2-regularized logistic regression with likelihood-ratio uncertainty.
//!
//! The fitted model is the maximizer of the penalized log-likelihood. Support
//! for a class at a query point asks: how plausible (relative to that maximum)
//! is some parameter vector that would put the query's class probability at
//! level α, and how decisive would that level be? Each level is a linear
//! constraint on the parameters, solved by Newton iteration on the constraint
//! plane; sweeping levels from decisive to neutral lets the search stop as
//! soon as the remaining levels cannot improve the running support.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::uncertainty::{Assessment, SupportDegrees};

const GRAD_TOL: f64 = 1e-6;
const MAX_NEWTON_ITER: usize = 100;
const MAX_HALVINGS: usize = 30;
/// Predicted Newton gains below this relative threshold are smaller than the
/// rounding noise of evaluating the objective, so an improvement test carries
/// no signal there and the plain Newton step is taken instead.
const GAIN_NOISE: f64 = 1e-12;

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow for large |z|.
fn log1p_exp(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Penalized log-likelihood: Σ yᵢzᵢ - log(1+e^{zᵢ}) - γ/2·‖θ‖², where the
/// penalty covers every coordinate, intercept included.
pub fn loglik(x: &DMatrix<f64>, y: &DVector<f64>, gamma: f64, theta: &DVector<f64>) -> f64 {
    let z = x * theta;
    let data: f64 = z.iter().zip(y.iter()).map(|(&zi, &yi)| yi * zi - log1p_exp(zi)).sum();
    data - 0.5 * gamma * theta.norm_squared()
}

/// Gradient of the penalized log-likelihood: Xᵀ(y - σ(Xθ)) - γθ.
pub fn gradient(x: &DMatrix<f64>, y: &DVector<f64>, gamma: f64, theta: &DVector<f64>) -> DVector<f64> {
    let z = x * theta;
    let resid = DVector::from_iterator(
        y.len(),
        z.iter().zip(y.iter()).map(|(&zi, &yi)| yi - sigmoid(zi)),
    );
    x.tr_mul(&resid) - theta * gamma
}

/// Negative Hessian XᵀWX + γI (positive definite for γ > 0).
pub fn neg_hessian(x: &DMatrix<f64>, gamma: f64, theta: &DVector<f64>) -> DMatrix<f64> {
    let z = x * theta;
    let mut wx = x.clone();
    for (i, &zi) in z.iter().enumerate() {
        let s = sigmoid(zi);
        let w = s * (1.0 - s);
        wx.row_mut(i).scale_mut(w);
    }
    let mut b = x.tr_mul(&wx);
    for j in 0..b.nrows() {
        b[(j, j)] += gamma;
    }
    b
}

/// Maximizes the penalized log-likelihood by damped Newton from θ = 0.
pub fn fit_mle(x: &DMatrix<f64>, y: &DVector<f64>, gamma: f64) -> Result<(DVector<f64>, f64)> {
    let dim = x.ncols();
    let mut theta = DVector::zeros(dim);
    let mut l = loglik(x, y, gamma, &theta);
    for iter in 0..MAX_NEWTON_ITER {
        let g = gradient(x, y, gamma, &theta);
        let g_norm = g.norm();
        if g_norm <= GRAD_TOL {
            return Ok((theta, l));
        }
        let b = neg_hessian(x, gamma, &theta);
        let chol = Cholesky::new(b)
            .ok_or(Error::NoConvergence { grad_norm: g_norm, iterations: iter })?;
        let delta = chol.solve(&g);
        // Once the attainable gain sinks below evaluation noise, comparing
        // objectives only measures rounding; the undamped step is safely
        // contractive this close to the optimum of a strictly concave
        // function, and the gradient check above decides convergence.
        if 0.5 * g.dot(&delta) <= GAIN_NOISE * (1.0 + l.abs()) {
            theta += &delta;
            l = loglik(x, y, gamma, &theta);
            continue;
        }
        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..=MAX_HALVINGS {
            let candidate = &theta + &delta * step;
            let l_new = loglik(x, y, gamma, &candidate);
            if l_new > l {
                theta = candidate;
                l = l_new;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    let g_norm = gradient(x, y, gamma, &theta).norm();
    if g_norm <= GRAD_TOL {
        Ok((theta, l))
    } else {
        Err(Error::NoConvergence { grad_norm: g_norm, iterations: MAX_NEWTON_ITER })
    }
}

/// Four-way unrolled dot product; the independent accumulators let the
/// compiler keep several multiply-adds in flight instead of serializing on a
/// single running sum.
#[inline]
fn dot(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut cu = u.chunks_exact(4);
    let mut cv = v.chunks_exact(4);
    for (a, b) in (&mut cu).zip(&mut cv) {
        acc[0] += a[0] * b[0];
        acc[1] += a[1] * b[1];
        acc[2] += a[2] * b[2];
        acc[3] += a[3] * b[3];
    }
    let mut s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (a, b) in cu.remainder().iter().zip(cv.remainder()) {
        s += a * b;
    }
    s
}

/// The level-independent part of a constrained fit. Every level shares the
/// same constraint direction, so the pivot coordinate (the largest |cⱼ|, in
/// practice the intercept), the elimination vector a = c_free/c_pivot, and the
/// shifted design X_s = X_free - x_pivot·aᵀ are built once per query row and
/// reused across the whole sweep.
struct LevelProblem<'a> {
    y: &'a DVector<f64>,
    gamma: f64,
    pivot: usize,
    c_pivot: f64,
    free: Vec<usize>,
    a: DVector<f64>,
    x_s: DMatrix<f64>,
    col_pivot: DVector<f64>,
}

impl<'a> LevelProblem<'a> {
    fn new(x: &DMatrix<f64>, y: &'a DVector<f64>, gamma: f64, c: &DVector<f64>) -> Result<Self> {
        let dim = x.ncols();
        let n = x.nrows();
        if c.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: c.len() });
        }

        // Last max ties toward higher indices, so normalize to the first max.
        let pivot = (0..dim)
            .max_by(|&i, &j| c[i].abs().partial_cmp(&c[j].abs()).unwrap())
            .unwrap();
        let pivot = (0..dim).find(|&j| c[j].abs() == c[pivot].abs()).unwrap();
        if c[pivot] == 0.0 {
            return Err(Error::InvalidParameter {
                what: "constraint",
                why: "all coefficients are zero".into(),
            });
        }
        let free: Vec<usize> = (0..dim).filter(|&j| j != pivot).collect();
        let m = free.len();
        let a = DVector::from_iterator(m, free.iter().map(|&j| c[j] / c[pivot]));
        let mut x_s = DMatrix::zeros(n, m);
        for (k, &j) in free.iter().enumerate() {
            for i in 0..n {
                x_s[(i, k)] = x[(i, j)] - x[(i, pivot)] * a[k];
            }
        }
        let col_pivot = x.column(pivot).clone_owned();
        Ok(LevelProblem { y, gamma, pivot, c_pivot: c[pivot], free, a, x_s, col_pivot })
    }

    /// Free-space curvature X_sᵀWX_s + γ(I + aaᵀ), built column against
    /// column: only the upper triangle is computed and no scaled copy of the
    /// design is materialized.
    fn curvature(&self, w: &[f64], wc: &mut [f64]) -> DMatrix<f64> {
        let n = self.x_s.nrows();
        let m = self.x_s.ncols();
        let xs = self.x_s.as_slice();
        let mut b = DMatrix::zeros(m, m);
        for j in 0..m {
            let cj = &xs[j * n..(j + 1) * n];
            for ((t, &wi), &xij) in wc.iter_mut().zip(w).zip(cj) {
                *t = wi * xij;
            }
            for k in j..m {
                let ck = &xs[k * n..(k + 1) * n];
                let mut s = dot(wc, ck) + self.gamma * self.a[j] * self.a[k];
                if k == j {
                    s += self.gamma;
                }
                b[(j, k)] = s;
                b[(k, j)] = s;
            }
        }
        b
    }

    /// Newton iteration in the free coordinates φ for one level; the
    /// constraint holds to rounding at every iterate because the pivot
    /// coordinate is substituted, never stepped. `start` seeds the free
    /// coordinates from a full-dimension parameter vector.
    fn solve(&self, alpha: f64, start: Option<&DVector<f64>>) -> Result<(DVector<f64>, f64)> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha { alpha });
        }
        let r = (alpha / (1.0 - alpha)).ln();
        let n = self.x_s.nrows();
        let m = self.x_s.ncols();
        let dim = self.free.len() + 1;

        // θ_pivot = r/c_pivot - a·φ, hence z = X_s·φ + z0.
        let z0 = &self.col_pivot * (r / self.c_pivot);
        let theta_pivot =
            |phi: &DVector<f64>| (r - phi.dot(&self.a) * self.c_pivot) / self.c_pivot;
        let objective = |z: &DVector<f64>, phi: &DVector<f64>, tp: f64| -> f64 {
            let data: f64 =
                z.iter().zip(self.y.iter()).map(|(&zi, &yi)| yi * zi - log1p_exp(zi)).sum();
            data - 0.5 * self.gamma * (phi.norm_squared() + tp * tp)
        };

        let mut phi = match start {
            Some(seed) if seed.len() == dim => {
                DVector::from_iterator(m, self.free.iter().map(|&j| seed[j]))
            }
            _ => DVector::zeros(m),
        };
        let mut tp = theta_pivot(&phi);
        let mut z = &self.x_s * &phi + &z0;
        let mut l = objective(&z, &phi, tp);

        let mut w = vec![0.0; n];
        let mut wc = vec![0.0; n];
        let mut converged = false;
        for iter in 0..MAX_NEWTON_ITER {
            let resid = DVector::from_iterator(
                n,
                z.iter().zip(self.y.iter()).map(|(&zi, &yi)| yi - sigmoid(zi)),
            );
            let g = self.x_s.tr_mul(&resid) - (&phi - &self.a * tp) * self.gamma;
            if g.norm() <= GRAD_TOL {
                converged = true;
                break;
            }

            for (wi, &zi) in w.iter_mut().zip(z.iter()) {
                let s = sigmoid(zi);
                *wi = s * (1.0 - s);
            }
            let b = self.curvature(&w, &mut wc);
            let chol = Cholesky::new(b)
                .ok_or(Error::NoConvergence { grad_norm: g.norm(), iterations: iter })?;
            let delta = chol.solve(&g);
            let dz = &self.x_s * &delta;

            // Same noise guard as fit_mle: below this predicted gain the
            // improvement test is meaningless and the undamped step wins.
            if 0.5 * g.dot(&delta) <= GAIN_NOISE * (1.0 + l.abs()) {
                phi += &delta;
                tp = theta_pivot(&phi);
                z += &dz;
                l = objective(&z, &phi, tp);
                continue;
            }

            let mut step = 1.0;
            let mut advanced = false;
            for _ in 0..=MAX_HALVINGS {
                let phi_new = &phi + &delta * step;
                let tp_new = theta_pivot(&phi_new);
                let z_new = &z + &dz * step;
                let l_new = objective(&z_new, &phi_new, tp_new);
                if l_new > l {
                    phi = phi_new;
                    tp = tp_new;
                    z = z_new;
                    l = l_new;
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            if !advanced {
                break;
            }
        }

        if !converged {
            let resid = DVector::from_iterator(
                n,
                z.iter().zip(self.y.iter()).map(|(&zi, &yi)| yi - sigmoid(zi)),
            );
            let g = self.x_s.tr_mul(&resid) - (&phi - &self.a * tp) * self.gamma;
            if g.norm() > GRAD_TOL {
                return Err(Error::NoConvergence {
                    grad_norm: g.norm(),
                    iterations: MAX_NEWTON_ITER,
                });
            }
        }

        let mut theta = DVector::zeros(dim);
        for (k, &j) in self.free.iter().enumerate() {
            theta[j] = phi[k];
        }
        theta[self.pivot] = tp;
        Ok((theta, l))
    }
}

/// Maximizes the penalized log-likelihood subject to c·θ = logit(α), the
/// plane of parameters that put the class-1 probability of the point with
/// design row `c` exactly at α. One coordinate is eliminated and Newton runs
/// in the remaining free coordinates, so the constraint holds to rounding at
/// every iterate. `start` seeds the free coordinates, letting level sweeps
/// reuse the previous level's optimum.
pub fn constrained_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    gamma: f64,
    c: &DVector<f64>,
    alpha: f64,
    start: Option<&DVector<f64>>,
) -> Result<(DVector<f64>, f64)> {
    LevelProblem::new(x, y, gamma, c)?.solve(alpha, start)
}

/// Likelihood of a parameter vector relative to the fitted maximum, in [0,1].
pub fn relative_plausibility(l: f64, ml_loglik: f64) -> f64 {
    (l - ml_loglik).exp().clamp(0.0, 1.0)
}

/// Probability levels to sweep on each side of 0.5, stored in sweep order:
/// class-1 levels descend from 1 - 1/(2Q) to 0.5, class-0 levels ascend from
/// 1/(2Q) to 0.5; either way the decisiveness caps shrink monotonically.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    pub pos: Vec<f64>,
    pub neg: Vec<f64>,
}

impl AlphaGrid {
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter { what: "grid", why: format!("need at least 2 levels, got {q}") });
        }
        let top = 1.0 - 1.0 / (2.0 * q as f64);
        let step = (top - 0.5) / (q - 1) as f64;
        let pos: Vec<f64> = (0..q).map(|i| top - i as f64 * step).collect();
        let neg: Vec<f64> = pos.iter().map(|a| 1.0 - a).collect();
        Ok(AlphaGrid { pos, neg })
    }
}

/// Fitted regularized logistic model plus everything the level sweeps need.
#[derive(Debug, Clone)]
pub struct LogRegParams {
    pub gamma: f64,
    pub grid: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams { gamma: 1.0, grid: 50 }
    }
}

#[derive(Debug, Clone)]
pub struct LogRegModel {
    x: DMatrix<f64>,
    y: DVector<f64>,
    gamma: f64,
    theta: DVector<f64>,
    ml_loglik: f64,
    grid: AlphaGrid,
}

impl LogRegModel {
    pub fn fit(x: Vec<Vec<f64>>, y: Vec<u8>, params: &LogRegParams) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
        }
        if !params.gamma.is_finite() || params.gamma <= 0.0 {
            return Err(Error::OutOfRange { what: "gamma", value: params.gamma });
        }
        let grid = AlphaGrid::new(params.grid)?;
        let n = x.len();
        let d = x[0].len();
        let mut design = DMatrix::zeros(n, d + 1);
        for (i, row) in x.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
            design[(i, 0)] = 1.0;
            for (j, &v) in row.iter().enumerate() {
                design[(i, j + 1)] = v;
            }
        }
        let y = DVector::from_iterator(n, y.iter().map(|&v| v as f64));
        let (theta, ml_loglik) = fit_mle(&design, &y, params.gamma)?;
        Ok(LogRegModel { x: design, y, gamma: params.gamma, theta, ml_loglik, grid })
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn ml_loglik(&self) -> f64 {
        self.ml_loglik
    }

    fn design_row(&self, q: &[f64]) -> Result<DVector<f64>> {
        let d = self.x.ncols() - 1;
        if q.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: q.len() });
        }
        let mut row = DVector::zeros(d + 1);
        row[0] = 1.0;
        for (j, &v) in q.iter().enumerate() {
            row[j + 1] = v;
        }
        Ok(row)
    }

    /// Modeled probability of class 1 at `q`.
    pub fn posterior(&self, q: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.design_row(q)?.dot(&self.theta)))
    }

    /// Posterior ties at 0.5 go to class 1.
    pub fn predict(&self, q: &[f64]) -> Result<u8> {
        Ok(u8::from(self.posterior(q)? >= 0.5))
    }

    fn sweep(&self, row: &DVector<f64>, prune: bool) -> Result<SupportDegrees> {
        let problem = LevelProblem::new(&self.x, &self.y, self.gamma, row)?;
        let h = sigmoid(row.dot(&self.theta));
        // The fitted model itself certifies these levels with plausibility 1.
        let pi1 = self.sweep_side(&problem, true, (2.0 * h - 1.0).max(0.0), prune)?;
        let pi0 = self.sweep_side(&problem, false, (1.0 - 2.0 * h).max(0.0), prune)?;
        SupportDegrees::new(pi1, pi0)
    }

    /// Runs one side's levels in decreasing-cap order, accumulating the best
    /// capped plausibility. Each solve is seeded by linear extrapolation of
    /// the two previous optima (they vary smoothly along the level chain),
    /// falling back to the fitted parameters at the start of the chain.
    fn sweep_side(
        &self,
        problem: &LevelProblem<'_>,
        positive: bool,
        init: f64,
        prune: bool,
    ) -> Result<f64> {
        let levels = if positive { &self.grid.pos } else { &self.grid.neg };
        let mut pi = init;
        let mut prev: Option<DVector<f64>> = None;
        let mut prev2: Option<DVector<f64>> = None;
        for &alpha in levels {
            let cap = if positive { 2.0 * alpha - 1.0 } else { 1.0 - 2.0 * alpha };
            if prune && cap <= pi {
                break;
            }
            let seed = match (&prev, &prev2) {
                (Some(p), Some(q)) => p * 2.0 - q,
                (Some(p), None) => p.clone(),
                _ => self.theta.clone(),
            };
            let (theta, l) = problem.solve(alpha, Some(&seed))?;
            pi = pi.max(relative_plausibility(l, self.ml_loglik).min(cap));
            prev2 = prev.take();
            prev = Some(theta);
        }
        Ok(pi)
    }

    /// Aleatoric degree 1 - max(pi1, pi0), computed lazily: the side the
    /// posterior favors is swept first, and when its support already reaches
    /// everything the other side could possibly produce (that side's starting
    /// support or its first, largest cap), the second sweep is skipped. The
    /// skipped sweep's outcome is bounded by that threshold, so the returned
    /// value is identical to what `assess` reports, just cheaper for
    /// confidently classified instances.
    pub fn aleatoric_degree(&self, q: &[f64]) -> Result<f64> {
        let row = self.design_row(q)?;
        let problem = LevelProblem::new(&self.x, &self.y, self.gamma, &row)?;
        let h = sigmoid(row.dot(&self.theta));
        let init1 = (2.0 * h - 1.0).max(0.0);
        let init0 = (1.0 - 2.0 * h).max(0.0);
        let strong_positive = h >= 0.5;
        let (strong_init, weak_init) =
            if strong_positive { (init1, init0) } else { (init0, init1) };
        let strong = self.sweep_side(&problem, strong_positive, strong_init, true)?;
        let weak_first_cap = if strong_positive {
            1.0 - 2.0 * self.grid.neg[0]
        } else {
            2.0 * self.grid.pos[0] - 1.0
        };
        if strong >= weak_init.max(weak_first_cap) {
            return Ok(1.0 - strong);
        }
        let weak = self.sweep_side(&problem, !strong_positive, weak_init, true)?;
        Ok(1.0 - strong.max(weak))
    }

    /// Epistemic degree min(pi1, pi0), computed lazily with the roles of
    /// `aleatoric_degree` reversed: the disfavored side is swept first, and
    /// when the favored side's starting support already matches or beats that
    /// result, the favored sweep can only push its side further above the
    /// minimum and is skipped. Identical to what `assess` reports.
    pub fn epistemic_degree(&self, q: &[f64]) -> Result<f64> {
        let row = self.design_row(q)?;
        let problem = LevelProblem::new(&self.x, &self.y, self.gamma, &row)?;
        let h = sigmoid(row.dot(&self.theta));
        let init1 = (2.0 * h - 1.0).max(0.0);
        let init0 = (1.0 - 2.0 * h).max(0.0);
        let strong_positive = h >= 0.5;
        let (strong_init, weak_init) =
            if strong_positive { (init1, init0) } else { (init0, init1) };
        let weak = self.sweep_side(&problem, !strong_positive, weak_init, true)?;
        if strong_init >= weak {
            return Ok(weak);
        }
        let strong = self.sweep_side(&problem, strong_positive, strong_init, true)?;
        Ok(strong.min(weak))
    }

    /// Class support degrees from the pruned level sweep.
    pub fn support(&self, q: &[f64]) -> Result<SupportDegrees> {
        self.sweep(&self.design_row(q)?, true)
    }

    /// Full sweep with pruning disabled; exists to verify the pruned sweep.
    pub fn support_unpruned(&self, q: &[f64]) -> Result<SupportDegrees> {
        self.sweep(&self.design_row(q)?, false)
    }

    pub fn assess(&self, q: &[f64]) -> Result<Assessment> {
        Assessment::from_support(self.support(q)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Deterministic noisy two-blob dataset for solver tests.
    fn blob_data(n: usize, d: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let label = (i % 2) as u8;
            let center = if label == 1 { 0.7 } else { 0.3 };
            x.push((0..d).map(|_| (center + rng.random_range(-0.35..0.35)) as f64).collect());
            y.push(label);
        }
        (x, y)
    }

    fn design(x: &[Vec<f64>]) -> DMatrix<f64> {
        let n = x.len();
        let d = x[0].len();
        let mut m = DMatrix::zeros(n, d + 1);
        for (i, row) in x.iter().enumerate() {
            m[(i, 0)] = 1.0;
            for (j, &v) in row.iter().enumerate() {
                m[(i, j + 1)] = v;
            }
        }
        m
    }

    #[test]
    fn single_example_matches_scalar_root() {
        // One example with zero features: the optimal intercept t solves
        // σ(t) + t = 1. Bisection gives the reference root.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if sigmoid(mid) + mid < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);

        let model =
            LogRegModel::fit(vec![vec![0.0]], vec![1], &LogRegParams { gamma: 1.0, grid: 10 })
                .unwrap();
        assert!((model.theta()[0] - root).abs() < 1e-6, "theta0 {} root {root}", model.theta()[0]);
        assert!(model.theta()[1].abs() < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = blob_data(24, 3, 5);
        let xm = design(&x);
        let ym = DVector::from_iterator(y.len(), y.iter().map(|&v| v as f64));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let theta =
                DVector::from_iterator(4, (0..4).map(|_| rng.random_range(-2.0..2.0)));
            let g = gradient(&xm, &ym, 1.0, &theta);
            let h = 1e-5;
            for j in 0..4 {
                let mut plus = theta.clone();
                let mut minus = theta.clone();
                plus[j] += h;
                minus[j] -= h;
                let fd = (loglik(&xm, &ym, 1.0, &plus) - loglik(&xm, &ym, 1.0, &minus)) / (2.0 * h);
                let scale = g[j].abs().max(1.0);
                assert!(
                    (g[j] - fd).abs() / scale < 1e-4,
                    "coordinate {j}: analytic {} vs fd {fd}",
                    g[j]
                );
            }
        }
    }

    #[test]
    fn mle_gradient_vanishes() {
        let (x, y) = blob_data(30, 2, 7);
        let xm = design(&x);
        let ym = DVector::from_iterator(y.len(), y.iter().map(|&v| v as f64));
        let (theta, l) = fit_mle(&xm, &ym, 1.0).unwrap();
        assert!(gradient(&xm, &ym, 1.0, &theta).norm() <= GRAD_TOL);
        // No parameter vector may beat the reported maximum.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let probe =
                DVector::from_iterator(3, (0..3).map(|_| rng.random_range(-3.0..3.0)));
            assert!(loglik(&xm, &ym, 1.0, &probe) <= l + 1e-9);
        }
    }

    #[test]
    fn constrained_fit_satisfies_its_constraint() {
        let (x, y) = blob_data(20, 3, 9);
        let xm = design(&x);
        let ym = DVector::from_iterator(y.len(), y.iter().map(|&v| v as f64));
        let c = DVector::from_vec(vec![1.0, 0.4, 0.9, 0.1]);
        for alpha in [0.1, 0.4, 0.5, 0.77, 0.97] {
            let (theta, _) = constrained_fit(&xm, &ym, 1.0, &c, alpha, None).unwrap();
            let r = (alpha / (1.0 - alpha)).ln();
            assert!(
                (c.dot(&theta) - r).abs() <= 1e-8,
                "alpha {alpha}: residual {}",
                (c.dot(&theta) - r).abs()
            );
        }
    }

    #[test]
    fn constraint_through_the_optimum_has_full_plausibility() {
        let (x, y) = blob_data(26, 2, 13);
        let model = LogRegModel::fit(x.clone(), y, &LogRegParams { gamma: 1.0, grid: 10 }).unwrap();
        let q = &x[4];
        let h = model.posterior(q).unwrap();
        let row = model.design_row(q).unwrap();
        let (_, l) = constrained_fit(&model.x, &model.y, model.gamma, &row, h, None).unwrap();
        assert!((relative_plausibility(l, model.ml_loglik()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_alpha_outside_open_interval() {
        let (x, y) = blob_data(10, 2, 1);
        let xm = design(&x);
        let ym = DVector::from_iterator(y.len(), y.iter().map(|&v| v as f64));
        let c = DVector::from_vec(vec![1.0, 0.5, 0.5]);
        for alpha in [0.0, 1.0, -0.3, 1.7] {
            let err = constrained_fit(&xm, &ym, 1.0, &c, alpha, None).unwrap_err();
            assert!(matches!(err, Error::InvalidAlpha { .. }), "{err}");
        }
    }

    #[test]
    fn grid_levels_mirror_around_half() {
        let g = AlphaGrid::new(50).unwrap();
        assert_eq!(g.pos.len(), 50);
        assert_eq!(g.neg.len(), 50);
        assert!((g.pos[0] - 0.99).abs() < 1e-12);
        assert!((g.pos[49] - 0.5).abs() < 1e-12);
        assert!((g.neg[0] - 0.01).abs() < 1e-12);
        assert!((g.neg[49] - 0.5).abs() < 1e-12);
        for (p, n) in g.pos.iter().zip(&g.neg) {
            assert!((p + n - 1.0).abs() < 1e-12);
        }
        for w in g.pos.windows(2) {
            assert!(w[0] > w[1], "class-1 levels must descend");
        }
        assert!(AlphaGrid::new(1).is_err());
    }

    #[test]
    fn support_stays_in_unit_interval_and_covers_the_posterior() {
        let (x, y) = blob_data(24, 2, 21);
        let model = LogRegModel::fit(x.clone(), y, &LogRegParams { gamma: 1.0, grid: 12 }).unwrap();
        for q in x.iter().take(8) {
            let s = model.support(q).unwrap();
            assert!((0.0..=1.0).contains(&s.pi1));
            assert!((0.0..=1.0).contains(&s.pi0));
            let h = model.posterior(q).unwrap();
            assert!(s.pi1 >= (2.0 * h - 1.0).max(0.0) - 1e-12);
            assert!(s.pi0 >= (1.0 - 2.0 * h).max(0.0) - 1e-12);
        }
    }

    #[test]
    fn lazy_degrees_match_the_full_assessment() {
        for seed in [3, 11, 23] {
            let (x, y) = blob_data(20, 2, seed);
            let model =
                LogRegModel::fit(x.clone(), y, &LogRegParams { gamma: 1.0, grid: 12 }).unwrap();
            for q in x.iter().take(8) {
                let profile = model.assess(q).unwrap().profile;
                let aleatoric = model.aleatoric_degree(q).unwrap();
                let epistemic = model.epistemic_degree(q).unwrap();
                assert_eq!(aleatoric, profile.aleatoric, "aleatoric differs on seed {seed}");
                assert_eq!(epistemic, profile.epistemic, "epistemic differs on seed {seed}");
            }
        }
    }

    #[test]
    fn pruned_sweep_equals_full_sweep() {
        for seed in [2, 17, 29] {
            let (x, y) = blob_data(18, 2, seed);
            let model =
                LogRegModel::fit(x.clone(), y, &LogRegParams { gamma: 1.0, grid: 14 }).unwrap();
            for q in x.iter().take(6) {
                let fast = model.support(q).unwrap();
                let full = model.support_unpruned(q).unwrap();
                assert_eq!(fast.pi1, full.pi1, "pi1 differs on seed {seed}");
                assert_eq!(fast.pi0, full.pi0, "pi0 differs on seed {seed}");
            }
        }
    }

    #[test]
    fn warm_starts_agree_with_cold_starts() {
        let (x, y) = blob_data(16, 2, 31);
        let model = LogRegModel::fit(x.clone(), y, &LogRegParams { gamma: 1.0, grid: 10 }).unwrap();
        for q in x.iter().take(4) {
            let swept = model.support_unpruned(q).unwrap();
            let row = model.design_row(q).unwrap();
            let h = sigmoid(row.dot(model.theta()));
            let mut pi1 = (2.0 * h - 1.0).max(0.0);
            let mut pi0 = (1.0 - 2.0 * h).max(0.0);
            for &alpha in &model.grid.pos {
                let (_, l) =
                    constrained_fit(&model.x, &model.y, model.gamma, &row, alpha, None).unwrap();
                pi1 = pi1.max(relative_plausibility(l, model.ml_loglik()).min(2.0 * alpha - 1.0));
            }
            for &alpha in &model.grid.neg {
                let (_, l) =
                    constrained_fit(&model.x, &model.y, model.gamma, &row, alpha, None).unwrap();
                pi0 = pi0.max(relative_plausibility(l, model.ml_loglik()).min(1.0 - 2.0 * alpha));
            }
            assert!((swept.pi1 - pi1).abs() < 1e-6, "pi1 {} vs cold {pi1}", swept.pi1);
            assert!((swept.pi0 - pi0).abs() < 1e-6, "pi0 {} vs cold {pi0}", swept.pi0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (x, y) = blob_data(10, 2, 1);
        assert!(LogRegModel::fit(x.clone(), y.clone(), &LogRegParams { gamma: 0.0, grid: 10 })
            .is_err());
        assert!(LogRegModel::fit(x.clone(), y.clone(), &LogRegParams { gamma: -1.0, grid: 10 })
            .is_err());
        assert!(LogRegModel::fit(x, y, &LogRegParams { gamma: 1.0, grid: 1 }).is_err());
        assert!(LogRegModel::fit(vec![], vec![], &LogRegParams::default()).is_err());
    }
}
