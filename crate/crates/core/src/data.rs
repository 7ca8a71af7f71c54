//! Dataset loading, feature normalization, and cross-validation splits.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// In-memory binary-labeled dataset with a fixed feature dimension.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from parallel feature rows and {0,1} labels.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch { left: features.len(), right: labels.len() });
        }
        let dim = features[0].len();
        for row in &features {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::InvalidParameter { what: "labels", why: "must be 0 or 1".into() });
        }
        Ok(Dataset { features, labels, dim })
    }

    /// Parses a headerless numeric CSV whose last column is the {0,1} label.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut text = String::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;

        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut dim = None;
        for (r, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() < 2 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row: r + 1,
                    col: 1,
                    msg: "need at least one feature and a label".into(),
                });
            }
            match dim {
                None => dim = Some(cells.len() - 1),
                Some(d) if d != cells.len() - 1 => {
                    return Err(Error::DimensionMismatch { expected: d, got: cells.len() - 1 })
                }
                _ => {}
            }
            let mut row = Vec::with_capacity(cells.len() - 1);
            for (c, cell) in cells[..cells.len() - 1].iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row: r + 1,
                    col: c + 1,
                    msg: format!("not a number: {cell:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row: r + 1,
                        col: c + 1,
                        msg: format!("non-finite feature: {cell:?}"),
                    });
                }
                row.push(v);
            }
            let label_cell = cells[cells.len() - 1].trim();
            let label = match label_cell {
                "0" => 0u8,
                "1" => 1u8,
                _ => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row: r + 1,
                        col: cells.len(),
                        msg: format!("label must be 0 or 1, got {label_cell:?}"),
                    })
                }
            };
            features.push(row);
            labels.push(label);
        }
        Dataset::new(features, labels)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// Per-feature min–max scaler fitted on a chosen subset of rows.
#[derive(Debug, Clone)]
pub struct Normalizer {
    mins: Vec<f64>,
    ranges: Vec<f64>,
}

impl Normalizer {
    /// Fits min/range per feature over `rows`. Constant features get range 0 and
    /// later map to 0.0.
    pub fn fit(data: &Dataset, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &r in rows {
            if r >= data.len() {
                return Err(Error::IndexOutOfRange { index: r, len: data.len() });
            }
        }
        let d = data.dim();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for &r in rows {
            for (j, &v) in data.row(r).iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();
        Ok(Normalizer { mins, ranges })
    }

    /// Maps a raw feature vector into [0,1]^d; out-of-range values are clipped
    /// so unseen test points stay inside the unit cube.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mins.len() {
            return Err(Error::DimensionMismatch { expected: self.mins.len(), got: x.len() });
        }
        Ok(x.iter()
            .zip(self.mins.iter().zip(&self.ranges))
            .map(|(&v, (&lo, &range))| {
                if range > 0.0 {
                    ((v - lo) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect())
    }

    /// Normalizes every row of the dataset into a dense matrix.
    pub fn apply_all(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        (0..data.len()).map(|i| self.apply(data.row(i))).collect()
    }
}

/// Index sets for one cross-validation fold: a small labeled seed, an unlabeled
/// pool, and a held-out test part.
#[derive(Debug, Clone)]
pub struct ProtocolSplit {
    pub fold: usize,
    pub train: Vec<usize>,
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
}

/// Builds `folds` cross-validation splits. Each fold's cell is the test part;
/// the shuffled remainder contributes `round(train_frac * n)` seed examples
/// (capped by availability) and leaves everything else as the pool.
pub fn make_protocol_splits(
    data: &Dataset,
    folds: usize,
    train_frac: f64,
    pool_frac: f64,
    seed: u64,
) -> Result<Vec<ProtocolSplit>> {
    let n = data.len();
    if folds < 2 {
        return Err(Error::InvalidProportions(format!("need at least 2 folds, got {folds}")));
    }
    if n < folds {
        return Err(Error::TooFewExamples { needed: folds, got: n });
    }
    if !(0.0..=1.0).contains(&train_frac) || !(0.0..=1.0).contains(&pool_frac) {
        return Err(Error::InvalidProportions(format!(
            "fractions must lie in [0,1], got train {train_frac} pool {pool_frac}"
        )));
    }
    if train_frac + pool_frac > 1.0 - 1.0 / folds as f64 + 1e-9 {
        return Err(Error::InvalidProportions(format!(
            "train {train_frac} + pool {pool_frac} + test 1/{folds} exceeds the whole dataset"
        )));
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream_rng(seed, Stream::Partition, 0));

    let train_size = (train_frac * n as f64).round() as usize;
    let mut splits = Vec::with_capacity(folds);
    for fold in 0..folds {
        let lo = fold * n / folds;
        let hi = (fold + 1) * n / folds;
        let test: Vec<usize> = perm[lo..hi].to_vec();
        let mut rest: Vec<usize> =
            perm[..lo].iter().chain(&perm[hi..]).copied().collect();
        rest.shuffle(&mut stream_rng(seed, Stream::TrainPool, fold as u64));
        let train_size = train_size.min(rest.len());
        let pool = rest.split_off(train_size);
        splits.push(ProtocolSplit { fold, train: rest, pool, test });
    }
    Ok(splits)
}

/// Fraction of positions where prediction and truth agree.
pub fn accuracy(predictions: &[u8], truth: &[u8]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: truth.len() });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predictions.len() as f64)
}
