use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogregHyper {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
}

/// Per-feature affine scaling fitted on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Standard deviation, or 1 for constant features.
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Standardizer { mean: vec![0.0; dim], scale: vec![1.0; dim] }
    }

    /// Weighted mean and population standard deviation per column.
    pub fn fit(rows: &[&[f64]], weights: &[f64]) -> Self {
        let dim = rows.first().map_or(0, |r| r.len());
        let total: f64 = weights.iter().sum();
        let mut mean = vec![0.0; dim];
        for (r, &w) in rows.iter().zip(weights) {
            mean.iter_mut().zip(r.iter()).for_each(|(m, x)| *m += w * x);
        }
        mean.iter_mut().for_each(|m| *m /= total);
        let mut var = vec![0.0; dim];
        for (r, &w) in rows.iter().zip(weights) {
            var.iter_mut().zip(r.iter().zip(&mean)).for_each(|(v, (x, m))| *v += w * (x - m) * (x - m));
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let sd = (v / total).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(self.mean.iter().zip(&self.scale)).map(|(x, (m, s))| (x - m) / s).collect()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Linear model over standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn zeros(dim: usize) -> Self {
        LogisticModel { weights: vec![0.0; dim], bias: 0.0 }
    }

    /// Margin of an already standardized row.
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }

    /// Margin of a raw row, standardizing on the fly.
    pub fn margin_raw(&self, row: &[f64], standardizer: &Standardizer) -> f64 {
        let mut z = self.bias;
        for (j, &x) in row.iter().enumerate() {
            if self.weights[j] != 0.0 {
                z += self.weights[j] * (x - standardizer.mean[j]) / standardizer.scale[j];
            }
        }
        z
    }
}

/// Weighted, L2-regularized mean logistic loss
/// `(1/W) sum_i w_i [log(1 + e^z_i) - y_i z_i] + (l2/2) |w|^2`
/// with `z_i = b + sum_j w_j (x_ij - mean_j) / scale_j`.
///
/// The standardization is folded into the weights so raw rows can be used
/// as stored: columns that are mostly non-zero in a dense block, the rest
/// sparse.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    dim: usize,
    dense_cols: Vec<usize>,
    /// Row-major, `dense_cols.len()` values per row.
    dense: Vec<f64>,
    indptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    targets: Vec<f64>,
    weights: Vec<f64>,
    total_weight: f64,
    mean: Vec<f64>,
    inv_scale: Vec<f64>,
    pub l2: f64,
}

impl LogisticObjective {
    pub fn new(rows: &[&[f64]], labels: &[bool], weights: Option<&[f64]>, standardizer: Option<&Standardizer>, l2: f64) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.len() != labels.len() || weights.is_some_and(|w| w.len() != rows.len()) {
            return Err(Error::Invalid("logistic regression: rows, labels and weights differ in length".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("logistic regression: ragged feature rows".into()));
        }
        let weights: Vec<f64> = weights.map_or_else(|| vec![1.0; rows.len()], <[f64]>::to_vec);
        let has = |y: bool| labels.iter().zip(&weights).any(|(&l, &w)| l == y && w > 0.0);
        if !has(true) || !has(false) {
            return Err(Error::Invalid("logistic regression needs both classes in the training data".into()));
        }
        let std = standardizer.cloned().unwrap_or_else(|| Standardizer::identity(dim));
        let mut is_dense = vec![0usize; dim];
        for r in rows {
            is_dense.iter_mut().zip(r.iter()).for_each(|(c, &x)| *c += usize::from(x != 0.0));
        }
        let dense_cols: Vec<usize> = (0..dim).filter(|&j| 2 * is_dense[j] > rows.len()).collect();
        let is_dense: Vec<bool> = is_dense.iter().map(|&c| 2 * c > rows.len()).collect();
        let mut dense = Vec::with_capacity(rows.len() * dense_cols.len());
        let mut indptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            dense.extend(dense_cols.iter().map(|&j| r[j]));
            for (j, &x) in r.iter().enumerate() {
                if x != 0.0 && !is_dense[j] {
                    cols.push(j as u32);
                    vals.push(x);
                }
            }
            indptr.push(cols.len());
        }
        Ok(LogisticObjective {
            dim,
            dense_cols,
            dense,
            indptr,
            cols,
            vals,
            targets: labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect(),
            total_weight: weights.iter().sum(),
            weights,
            mean: std.mean,
            inv_scale: std.scale.iter().map(|s| 1.0 / s).collect(),
            l2,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Loss and gradient (weights, bias) at `model`.
    pub fn evaluate(&self, model: &LogisticModel) -> (f64, Vec<f64>, f64) {
        let mut scratch = Scratch::new(self);
        let mut grad = vec![0.0; self.dim];
        let mut loss = 0.0;
        let grad_b = self.pass(model, &mut scratch, &mut grad, |w, y, z| loss += w * (softplus(z) - y * z));
        loss = loss / self.total_weight + 0.5 * self.l2 * model.weights.iter().map(|w| w * w).sum::<f64>();
        (loss, grad, grad_b)
    }

    /// One pass over the rows writing the gradient into `grad` and returning
    /// the bias gradient; `each` sees weight, target and margin per row.
    fn pass<F: FnMut(f64, f64, f64)>(&self, model: &LogisticModel, s: &mut Scratch, grad: &mut [f64], mut each: F) -> f64 {
        s.a.iter_mut().zip(model.weights.iter().zip(&self.inv_scale)).for_each(|(a, (w, k))| *a = w * k);
        s.a_dense.iter_mut().zip(&self.dense_cols).for_each(|(a, &j)| *a = s.a[j]);
        let c = model.bias - s.a.iter().zip(&self.mean).map(|(a, m)| a * m).sum::<f64>();
        s.raw.iter_mut().for_each(|g| *g = 0.0);
        s.raw_dense.iter_mut().for_each(|g| *g = 0.0);
        let width = self.dense_cols.len();
        let mut grad_b = 0.0;
        for i in 0..self.targets.len() {
            let w = self.weights[i];
            if w == 0.0 {
                continue;
            }
            let dense = &self.dense[i * width..(i + 1) * width];
            let range = self.indptr[i]..self.indptr[i + 1];
            let (cols, vals) = (&self.cols[range.clone()], &self.vals[range]);
            let mut z = c + dense.iter().zip(&s.a_dense).map(|(x, a)| x * a).sum::<f64>();
            for (&j, &x) in cols.iter().zip(vals) {
                z += s.a[j as usize] * x;
            }
            let y = self.targets[i];
            each(w, y, z);
            let r = w * (sigmoid(z) - y);
            grad_b += r;
            s.raw_dense.iter_mut().zip(dense).for_each(|(g, x)| *g += r * x);
            for (&j, &x) in cols.iter().zip(vals) {
                s.raw[j as usize] += r * x;
            }
        }
        for (k, &j) in self.dense_cols.iter().enumerate() {
            s.raw[j] += s.raw_dense[k];
        }
        let inv_w = 1.0 / self.total_weight;
        grad_b *= inv_w;
        for j in 0..self.dim {
            grad[j] = self.inv_scale[j] * (s.raw[j] * inv_w - self.mean[j] * grad_b) + self.l2 * model.weights[j];
        }
        grad_b
    }

    pub fn loss(&self, model: &LogisticModel) -> f64 {
        self.evaluate(model).0
    }

    /// Full-batch gradient descent from zero, snapshotting the model after
    /// each epoch count in `checkpoints` (ascending).
    pub fn descend(&self, learning_rate: f64, checkpoints: &[usize]) -> Result<Vec<LogisticModel>> {
        let last = checkpoints.iter().copied().max().unwrap_or(0);
        let mut model = LogisticModel::zeros(self.dim);
        let mut snapshots = Vec::with_capacity(checkpoints.len());
        let mut next = checkpoints.iter().peekable();
        let mut scratch = Scratch::new(self);
        let mut grad = vec![0.0; self.dim];
        while next.peek() == Some(&&0) {
            snapshots.push(model.clone());
            next.next();
        }
        for epoch in 1..=last {
            let grad_b = self.pass(&model, &mut scratch, &mut grad, |_, _, _| {});
            if !grad_b.is_finite() {
                return Err(Error::NonFiniteLoss);
            }
            model.weights.iter_mut().zip(&grad).for_each(|(w, g)| *w -= learning_rate * g);
            model.bias -= learning_rate * grad_b;
            while next.peek() == Some(&&epoch) {
                snapshots.push(model.clone());
                next.next();
            }
        }
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        Ok(snapshots)
    }
}

struct Scratch {
    a: Vec<f64>,
    a_dense: Vec<f64>,
    raw: Vec<f64>,
    raw_dense: Vec<f64>,
}

impl Scratch {
    fn new(obj: &LogisticObjective) -> Self {
        let (d, k) = (obj.dim, obj.dense_cols.len());
        Scratch { a: vec![0.0; d], a_dense: vec![0.0; k], raw: vec![0.0; d], raw_dense: vec![0.0; k] }
    }
}

/// Fits logistic regression on already standardized rows by full-batch
/// gradient descent from zero; deterministic.
pub fn train_logreg(rows: &[Vec<f64>], labels: &[bool], hyper: &LogregHyper) -> Result<LogisticModel> {
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let obj = LogisticObjective::new(&refs, labels, None, None, hyper.l2)?;
    let mut snaps = obj.descend(hyper.learning_rate, &[hyper.epochs])?;
    Ok(snaps.pop().expect("one checkpoint"))
}
