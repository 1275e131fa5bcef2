//! Feature standardization, PCA, and target quantile transformation.
//!
//! The fitted models are immutable, serializable, and safe to share across
//! threads; fitting is single-threaded over one matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreprocessError {
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),
    #[error("shape mismatch: expected {expected} columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Z-score standardizer with population (divide-by-n) standard deviation.
/// Zero-variance columns are recorded in `dropped_columns` and removed from
/// the output instead of being scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub column_names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub dropped_columns: Vec<String>,
}

impl Standardizer {
    pub fn fit(matrix: &FeatureMatrix) -> Result<Standardizer, PreprocessError> {
        if matrix.rows.len() < 2 {
            return Err(PreprocessError::DegenerateMatrix(format!(
                "need at least 2 rows to standardize, got {}",
                matrix.rows.len()
            )));
        }
        let n = matrix.rows.len() as f64;
        let mut column_names = Vec::new();
        let mut mean = Vec::new();
        let mut std = Vec::new();
        let mut dropped = Vec::new();
        for (c, name) in matrix.column_names.iter().enumerate() {
            let m = matrix.rows.iter().map(|r| r[c]).sum::<f64>() / n;
            let var = matrix.rows.iter().map(|r| (r[c] - m).powi(2)).sum::<f64>() / n;
            let s = var.sqrt();
            if s > 0.0 {
                column_names.push(name.clone());
                mean.push(m);
                std.push(s);
            } else {
                dropped.push(name.clone());
            }
        }
        Ok(Standardizer {
            column_names,
            mean,
            std,
            dropped_columns: dropped,
        })
    }

    /// Standardize a matrix with the same column layout the fit saw.
    /// Dropped columns are removed; retained ones become (x - mean) / std.
    pub fn apply(&self, matrix: &FeatureMatrix) -> Result<DMatrix<f64>, PreprocessError> {
        let expected = self.column_names.len() + self.dropped_columns.len();
        if matrix.column_names.len() != expected {
            return Err(PreprocessError::ShapeMismatch {
                expected,
                got: matrix.column_names.len(),
            });
        }
        let keep: Vec<usize> = matrix
            .column_names
            .iter()
            .enumerate()
            .filter(|(_, name)| !self.dropped_columns.contains(name))
            .map(|(c, _)| c)
            .collect();
        if keep.len() != self.column_names.len() {
            return Err(PreprocessError::ShapeMismatch {
                expected: self.column_names.len(),
                got: keep.len(),
            });
        }
        let rows = matrix.rows.len();
        let mut out = DMatrix::zeros(rows, keep.len());
        for (i, row) in matrix.rows.iter().enumerate() {
            for (j, &c) in keep.iter().enumerate() {
                out[(i, j)] = (row[c] - self.mean[j]) / self.std[j];
            }
        }
        Ok(out)
    }
}

/// PCA fit by singular value decomposition of the centered matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// All components, one per row, in descending explained-variance order.
    pub components: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    pub n_retained: usize,
    pub cumulative_variance: f64,
    pub n_features: usize,
}

pub fn pca_fit(standardized: &DMatrix<f64>, threshold: f64) -> Result<PcaModel, PreprocessError> {
    let (n, p) = standardized.shape();
    if n < 2 {
        return Err(PreprocessError::DegenerateMatrix(format!(
            "need at least 2 rows for PCA, got {n}"
        )));
    }
    let mut centered = standardized.clone();
    for c in 0..p {
        let m = centered.column(c).sum() / n as f64;
        for r in 0..n {
            centered[(r, c)] -= m;
        }
    }
    let svd = centered.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| PreprocessError::DegenerateMatrix("SVD did not converge".into()))?;
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    if total <= 0.0 {
        return Err(PreprocessError::DegenerateMatrix(
            "matrix has no variance".into(),
        ));
    }
    let k = svd.singular_values.len();
    let mut components = Vec::with_capacity(k);
    for i in 0..k {
        let mut comp: Vec<f64> = vt.row(i).iter().copied().collect();
        // sign convention: largest-magnitude entry positive
        let lead = comp
            .iter()
            .cloned()
            .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if lead < 0.0 {
            for v in &mut comp {
                *v = -*v;
            }
        }
        components.push(comp);
    }
    let ratios: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| s * s / total)
        .collect();
    let mut cum = 0.0;
    let mut n_retained = k;
    for (i, r) in ratios.iter().enumerate() {
        cum += r;
        if cum >= threshold {
            n_retained = i + 1;
            break;
        }
    }
    let cumulative_variance: f64 = ratios[..n_retained].iter().sum();
    Ok(PcaModel {
        components,
        explained_variance_ratio: ratios,
        n_retained,
        cumulative_variance,
        n_features: p,
    })
}

/// Project onto the retained components: scores = X · Vᵀ.
pub fn pca_transform(
    model: &PcaModel,
    standardized: &DMatrix<f64>,
) -> Result<DMatrix<f64>, PreprocessError> {
    if standardized.ncols() != model.n_features {
        return Err(PreprocessError::ShapeMismatch {
            expected: model.n_features,
            got: standardized.ncols(),
        });
    }
    let n = standardized.nrows();
    let mut out = DMatrix::zeros(n, model.n_retained);
    for i in 0..n {
        for (j, comp) in model.components[..model.n_retained].iter().enumerate() {
            out[(i, j)] = (0..model.n_features)
                .map(|c| standardized[(i, c)] * comp[c])
                .sum();
        }
    }
    Ok(out)
}

/// Empirical-CDF quantile transformer with linear interpolation and
/// clamped out-of-range behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTransformer {
    /// Sorted reference values at the quantile grid levels.
    pub references: Vec<f64>,
    /// Equally spaced levels in [0, 1], same length as `references`.
    pub grid: Vec<f64>,
}

impl QuantileTransformer {
    pub fn fit(targets: &[f64], n_quantiles: usize) -> Result<QuantileTransformer, PreprocessError> {
        if targets.len() < 2 {
            return Err(PreprocessError::DegenerateMatrix(format!(
                "need at least 2 target values, got {}",
                targets.len()
            )));
        }
        let mut sorted = targets.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted[0] == sorted[sorted.len() - 1] {
            return Err(PreprocessError::DegenerateMatrix(
                "constant target cannot be quantile-transformed".into(),
            ));
        }
        let nq = n_quantiles.clamp(2, sorted.len());
        let grid: Vec<f64> = (0..nq).map(|i| i as f64 / (nq - 1) as f64).collect();
        let references: Vec<f64> = grid
            .iter()
            .map(|&u| {
                // linear-interpolated empirical quantile of the sorted data
                let pos = u * (sorted.len() - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = pos.ceil() as usize;
                let frac = pos - lo as f64;
                sorted[lo] * (1.0 - frac) + sorted[hi] * frac
            })
            .collect();
        Ok(QuantileTransformer { references, grid })
    }

    /// Map a GWP value to [0, 1]. Ties in the reference grid resolve to the
    /// averaged CDF value; out-of-range inputs clamp to the endpoints.
    pub fn transform(&self, x: f64) -> f64 {
        let lo = self.references[0];
        let hi = self.references[self.references.len() - 1];
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let fwd = interp(x, &self.references, &self.grid, Side::Left);
        let bwd = interp(x, &self.references, &self.grid, Side::Right);
        0.5 * (fwd + bwd)
    }

    /// Inverse map from [0, 1] back to the GWP scale; clamps outside [0, 1].
    pub fn inverse(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        interp(u, &self.grid, &self.references, Side::Left)
    }
}

enum Side {
    Left,
    Right,
}

/// Piecewise-linear interpolation of y(x) over sorted xs. For x exactly on a
/// run of tied xs, `Side` picks the first or last matching knot.
fn interp(x: f64, xs: &[f64], ys: &[f64], side: Side) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = match side {
        Side::Left => xs.partition_point(|&v| v < x),
        Side::Right => xs.partition_point(|&v| v <= x),
    };
    match side {
        Side::Left => {
            if xs[i] == x {
                return ys[i];
            }
            let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
        Side::Right => {
            if xs[i - 1] == x {
                return ys[i - 1];
            }
            let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}
