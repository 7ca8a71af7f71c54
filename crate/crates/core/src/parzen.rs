//! Parzen-window classifier with count-based uncertainty.
//!
//! Classification looks at the labeled examples inside a fixed-width Euclidean
//! ball around the query point. The class-1/class-0 counts inside the window
//! feed a one-parameter Bernoulli model: each success rate θ is weighted by its
//! likelihood relative to the maximum-likelihood rate, and the support for a
//! class is the best case of "θ is plausible and favors that class". Because
//! support depends on the counts alone, solved pairs are memoized and shared.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::scalar::brent_minimize;
use crate::uncertainty::{Assessment, SupportDegrees};

/// Smallest admissible window width; a zero-width window would see nothing,
/// not even its own center.
pub const WIDTH_FLOOR: f64 = 1e-9;

const SOLVER_XATOL: f64 = 1e-8;
const SOLVER_MAX_ITER: usize = 500;
const SCAN_POINTS: usize = 101;

fn xlogy(count: u32, v: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * v.ln()
    }
}

/// Likelihood of rate `theta` for `pos` successes and `neg` failures, relative
/// to the empirical rate's likelihood. The all-zero count pair has no evidence
/// at all, so every rate is fully plausible.
fn rel_likelihood(pos: u32, neg: u32, theta: f64) -> f64 {
    if pos == 0 && neg == 0 {
        return 1.0;
    }
    let ml = pos as f64 / (pos + neg) as f64;
    let log_ml = xlogy(pos, ml) + xlogy(neg, 1.0 - ml);
    (xlogy(pos, theta) + xlogy(neg, 1.0 - theta) - log_ml).exp()
}

/// Best case over θ of "θ is plausible and θ favors class 1", for a window
/// holding `pos` class-1 and `neg` class-0 examples. The class-0 variant is the
/// same computation with the counts swapped.
fn support_one_class(pos: u32, neg: u32) -> f64 {
    let objective = |theta: f64| -(rel_likelihood(pos, neg, theta).min(2.0 * theta - 1.0));

    // The objective is piecewise-smooth with a kink where the two branches
    // cross; a coarse scan locates the basin and Brent polishes it. A second
    // full-interval pass guards against a misleading scan.
    let mut best_x = 0.0;
    let mut best = objective(0.0);
    for i in 1..SCAN_POINTS {
        let x = i as f64 / (SCAN_POINTS - 1) as f64;
        let v = objective(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let lo = (best_x - 0.01).max(0.0);
    let hi = (best_x + 0.01).min(1.0);
    if hi > lo {
        if let Ok(r) = brent_minimize(objective, lo, hi, SOLVER_XATOL, SOLVER_MAX_ITER) {
            if r.value < best {
                best = r.value;
            }
        }
    }
    if let Ok(r) = brent_minimize(objective, 0.0, 1.0, SOLVER_XATOL, SOLVER_MAX_ITER) {
        if r.value < best {
            best = r.value;
        }
    }
    (-best).clamp(0.0, 1.0)
}

/// Solves the class-1 and class-0 support degrees for one count pair.
pub fn solve_binomial_support(pos: u32, neg: u32) -> SupportDegrees {
    SupportDegrees {
        pi1: support_one_class(pos, neg),
        pi0: support_one_class(neg, pos),
    }
}

/// Memo table over count pairs; safe to share across threads and model refits.
#[derive(Debug, Default)]
pub struct SupportTable {
    cache: RwLock<HashMap<(u32, u32), SupportDegrees>>,
}

impl SupportTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Memoized support lookup; solves and stores on first sight of a pair.
    pub fn support(&self, pos: u32, neg: u32) -> SupportDegrees {
        if let Some(hit) = self.cache.read().unwrap().get(&(pos, neg)) {
            return *hit;
        }
        let solved = solve_binomial_support(pos, neg);
        self.cache.write().unwrap().entry((pos, neg)).or_insert(solved);
        solved
    }

    /// Solves every pair with pos ≤ max_pos and neg ≤ max_neg up front.
    pub fn prefill(&self, max_pos: u32, max_neg: u32) {
        for pos in 0..=max_pos {
            for neg in 0..=max_neg {
                self.support(pos, neg);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cache.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean distance to the k-th nearest neighbor (1-based), over all points.
/// `k` is capped at n-1 so it never reaches past the available neighbors.
pub fn determine_width(points: &[Vec<f64>], k: usize) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewExamples { needed: 2, got: n });
    }
    if k == 0 {
        return Err(Error::InvalidParameter { what: "k", why: "must be at least 1".into() });
    }
    let k = k.min(n - 1);
    let mut total = 0.0;
    let mut dists = Vec::with_capacity(n - 1);
    for (i, p) in points.iter().enumerate() {
        dists.clear();
        for (j, q) in points.iter().enumerate() {
            if i != j {
                dists.push(euclidean(p, q));
            }
        }
        let (_, kth, _) = dists.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
        total += *kth;
    }
    Ok(total / n as f64)
}

/// Parzen-window model: labeled points plus a window width.
#[derive(Debug, Clone)]
pub struct ParzenModel {
    x: Vec<Vec<f64>>,
    y: Vec<u8>,
    width: f64,
    table: Arc<SupportTable>,
}

impl ParzenModel {
    /// Fits on labeled rows; the width comes from the k-th-neighbor rule and is
    /// floored at `WIDTH_FLOOR` so degenerate duplicates stay classifiable.
    pub fn fit(x: Vec<Vec<f64>>, y: Vec<u8>, k: usize, table: Arc<SupportTable>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
        }
        let width = determine_width(&x, k)?.max(WIDTH_FLOOR);
        Ok(ParzenModel { x, y, width, table })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Class-1 and class-0 counts inside the (inclusive) window around `q`.
    pub fn window_counts(&self, q: &[f64]) -> Result<(u32, u32)> {
        if q.len() != self.x[0].len() {
            return Err(Error::DimensionMismatch { expected: self.x[0].len(), got: q.len() });
        }
        let mut pos = 0;
        let mut neg = 0;
        for (xi, &yi) in self.x.iter().zip(&self.y) {
            if euclidean(xi, q) <= self.width {
                if yi == 1 {
                    pos += 1;
                } else {
                    neg += 1;
                }
            }
        }
        Ok((pos, neg))
    }

    /// Class-1 frequency inside the window; an empty window is maximally
    /// noncommittal and reports 0.5.
    pub fn posterior(&self, q: &[f64]) -> Result<f64> {
        let (pos, neg) = self.window_counts(q)?;
        if pos + neg == 0 {
            Ok(0.5)
        } else {
            Ok(pos as f64 / (pos + neg) as f64)
        }
    }

    /// Majority label in the window (ties go to class 1); None when the window
    /// is empty and no prediction can be made.
    pub fn predict(&self, q: &[f64]) -> Result<Option<u8>> {
        let (pos, neg) = self.window_counts(q)?;
        if pos + neg == 0 {
            Ok(None)
        } else {
            Ok(Some(u8::from(pos >= neg)))
        }
    }

    /// Support degrees and uncertainty profile for `q`. An empty window finds
    /// both classes fully plausible: pure epistemic uncertainty.
    pub fn assess(&self, q: &[f64]) -> Result<Assessment> {
        let (pos, neg) = self.window_counts(q)?;
        Assessment::from_support(self.table.support(pos, neg))
    }
}
