//! Binary CART decision tree with leaf-count uncertainty.
//!
//! Standard greedy growth: at each node, try every midpoint between consecutive
//! distinct feature values, score splits by weighted Gini impurity, and stop on
//! purity, depth, or leaf-size limits. A leaf keeps its class counts, and those
//! counts drive the same count-based support solver the Parzen model uses —
//! a small leaf with mixed labels is epistemically uncertain, a large mixed
//! leaf aleatorically so.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::parzen::SupportTable;
use crate::uncertainty::Assessment;

/// Growth limits. `min_leaf` is enforced on both sides of every split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: 6, min_leaf: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        pos: u32,
        neg: u32,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Gini impurity of a two-class count pair; an empty pair counts as pure.
pub fn gini(pos: usize, neg: usize) -> f64 {
    let n = pos + neg;
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    let q = neg as f64 / n as f64;
    1.0 - p * p - q * q
}

/// Best (feature, threshold) by weighted child impurity, or None when no split
/// keeps `min_leaf` examples on both sides. Ties resolve to the lowest feature
/// index, then the lowest threshold, so growth is fully deterministic.
pub fn best_split(
    x: &[Vec<f64>],
    y: &[u8],
    rows: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64)> {
    let n = rows.len();
    let dim = x[rows[0]].len();
    let mut best: Option<(f64, usize, f64)> = None;

    let mut order: Vec<usize> = Vec::with_capacity(n);
    for feature in 0..dim {
        order.clear();
        order.extend_from_slice(rows);
        order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));

        let total_pos = rows.iter().filter(|&&r| y[r] == 1).count();
        let mut left_pos = 0usize;
        let mut left_n = 0usize;
        for w in 0..n - 1 {
            let r = order[w];
            left_n += 1;
            left_pos += usize::from(y[r] == 1);
            let here = x[r][feature];
            let next = x[order[w + 1]][feature];
            if here == next {
                continue;
            }
            let right_n = n - left_n;
            if left_n < min_leaf || right_n < min_leaf {
                continue;
            }
            let threshold = 0.5 * (here + next);
            let right_pos = total_pos - left_pos;
            let score = (left_n as f64 * gini(left_pos, left_n - left_pos)
                + right_n as f64 * gini(right_pos, right_n - right_pos))
                / n as f64;
            let better = match best {
                None => true,
                Some((s, _, _)) => score < s,
            };
            if better {
                best = Some((score, feature, threshold));
            }
        }
    }
    best.map(|(_, feature, threshold)| (feature, threshold))
}

fn grow(
    x: &[Vec<f64>],
    y: &[u8],
    rows: &[usize],
    depth: usize,
    params: &TreeParams,
) -> Node {
    let pos = rows.iter().filter(|&&r| y[r] == 1).count() as u32;
    let neg = rows.len() as u32 - pos;
    let leaf = Node::Leaf { pos, neg };
    if pos == 0 || neg == 0 || depth >= params.max_depth || rows.len() < 2 * params.min_leaf {
        return leaf;
    }
    let Some((feature, threshold)) = best_split(x, y, rows, params.min_leaf) else {
        return leaf;
    };
    let (left, right): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&r| x[r][feature] <= threshold);
    Node::Split {
        feature,
        threshold,
        left: Box::new(grow(x, y, &left, depth + 1, params)),
        right: Box::new(grow(x, y, &right, depth + 1, params)),
    }
}

/// Fitted tree; assessment routes a query to its leaf and reads the counts.
#[derive(Debug, Clone)]
pub struct TreeModel {
    root: Node,
    dim: usize,
    table: Arc<SupportTable>,
}

impl TreeModel {
    pub fn fit(
        x: Vec<Vec<f64>>,
        y: Vec<u8>,
        params: TreeParams,
        table: Arc<SupportTable>,
    ) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
        }
        if params.min_leaf == 0 {
            return Err(Error::InvalidParameter { what: "min_leaf", why: "must be at least 1".into() });
        }
        let rows: Vec<usize> = (0..x.len()).collect();
        let root = grow(&x, &y, &rows, 0, &params);
        Ok(TreeModel { root, dim: x[0].len(), table })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Class counts of the leaf that `q` lands in. Routing sends
    /// `q[feature] <= threshold` to the left child.
    pub fn leaf_counts(&self, q: &[f64]) -> Result<(u32, u32)> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: q.len() });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { pos, neg } => return Ok((*pos, *neg)),
                Node::Split { feature, threshold, left, right } => {
                    node = if q[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Class-1 fraction in the query's leaf; leaves are never empty.
    pub fn posterior(&self, q: &[f64]) -> Result<f64> {
        let (pos, neg) = self.leaf_counts(q)?;
        Ok(pos as f64 / (pos + neg) as f64)
    }

    /// Majority label of the leaf; posterior ties go to class 1.
    pub fn predict(&self, q: &[f64]) -> Result<u8> {
        let (pos, neg) = self.leaf_counts(q)?;
        Ok(u8::from(pos >= neg))
    }

    /// Count-based support and uncertainty profile of the query's leaf.
    pub fn assess(&self, q: &[f64]) -> Result<Assessment> {
        let (pos, neg) = self.leaf_counts(q)?;
        Assessment::from_support(self.table.support(pos, neg))
    }
}
