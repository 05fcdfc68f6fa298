use serde::{Deserialize, Serialize};

use super::auc::weighted_auc;
use super::gbdt::{GbdtHyper, GbdtModel, GbdtTrainer};
use super::logreg::{LogisticModel, LogisticObjective, LogregHyper, Standardizer};
use super::model::{Hyper, ModelParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogregGrid {
    pub learning_rate: Vec<f64>,
    pub l2: Vec<f64>,
    pub epochs: Vec<usize>,
}

impl Default for LogregGrid {
    fn default() -> Self {
        LogregGrid { learning_rate: vec![0.3, 0.1, 0.03], l2: vec![0.0, 0.001, 0.01], epochs: vec![200, 500] }
    }
}

impl LogregGrid {
    /// Points in search order: learning rate, then l2, then epochs.
    pub fn points(&self) -> Vec<LogregHyper> {
        let mut out = Vec::new();
        for &learning_rate in &self.learning_rate {
            for &l2 in &self.l2 {
                for &epochs in &self.epochs {
                    out.push(LogregHyper { learning_rate, l2, epochs });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_empty() || self.l2.is_empty() || self.epochs.is_empty() {
            return Err(Error::Invalid("logreg grid has an empty value list".into()));
        }
        if self.learning_rate.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Invalid("logreg grid: learning rates must be positive".into()));
        }
        if self.l2.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Invalid("logreg grid: l2 must be >= 0".into()));
        }
        if self.epochs.contains(&0) {
            return Err(Error::Invalid("logreg grid: epochs must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtGrid {
    pub learning_rate: Vec<f64>,
    pub max_depth: Vec<usize>,
    pub rounds: Vec<usize>,
    pub min_leaf: Vec<usize>,
}

impl Default for GbdtGrid {
    fn default() -> Self {
        GbdtGrid { learning_rate: vec![0.3, 0.1], max_depth: vec![2, 4, 6], rounds: vec![50, 200], min_leaf: vec![1] }
    }
}

impl GbdtGrid {
    /// Points in search order: learning rate, max depth, min leaf, rounds.
    pub fn points(&self) -> Vec<GbdtHyper> {
        let mut out = Vec::new();
        for &learning_rate in &self.learning_rate {
            for &max_depth in &self.max_depth {
                for &min_leaf in &self.min_leaf {
                    for &rounds in &self.rounds {
                        out.push(GbdtHyper { learning_rate, max_depth, rounds, min_leaf });
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_empty() || self.max_depth.is_empty() || self.rounds.is_empty() || self.min_leaf.is_empty()
        {
            return Err(Error::Invalid("gbdt grid has an empty value list".into()));
        }
        if self.learning_rate.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Invalid("gbdt grid: learning rates must be positive".into()));
        }
        if self.max_depth.contains(&0) || self.rounds.contains(&0) {
            return Err(Error::Invalid("gbdt grid: max_depth and rounds must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Logreg(LogregGrid),
    Gbdt(GbdtGrid),
}

/// Rows of one split with their oversampling multiplicities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedSplit {
    pub index: Vec<usize>,
    pub labels: Vec<bool>,
    pub weights: Vec<f64>,
}

impl WeightedSplit {
    /// Collapses a multiset of `(row, label)` into distinct rows with counts,
    /// ordered by row index.
    pub fn from_multiset(sample: &[(usize, bool)]) -> Self {
        let mut sorted: Vec<(usize, bool)> = sample.to_vec();
        sorted.sort_unstable();
        let mut out = WeightedSplit::default();
        for (i, l) in sorted {
            if out.index.last() == Some(&i) {
                *out.weights.last_mut().expect("non-empty") += 1.0;
            } else {
                out.index.push(i);
                out.labels.push(l);
                out.weights.push(1.0);
            }
        }
        out
    }

    pub fn rows<'a>(&self, rows: &'a [Vec<f64>]) -> Vec<&'a [f64]> {
        self.index.iter().map(|&i| rows[i].as_slice()).collect()
    }

    pub fn auc(&self, scores: &[f64]) -> Result<f64> {
        weighted_auc(scores, &self.labels, Some(&self.weights))
    }
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: Hyper,
    pub tune_auc: f64,
    /// Model trained on the training split with the best point.
    pub params: ModelParams,
    /// Every point with its tune AUC, in search order.
    pub scores: Vec<(Hyper, f64)>,
}

fn pick_best<M>(points: Vec<(Hyper, f64, M)>) -> (Hyper, f64, M, Vec<(Hyper, f64)>) {
    let scores: Vec<(Hyper, f64)> = points.iter().map(|(h, a, _)| (*h, *a)).collect();
    let mut best_i = 0;
    for (i, (_, a, _)) in points.iter().enumerate() {
        if *a > points[best_i].1 {
            best_i = i;
        }
    }
    let (h, a, m) = points.into_iter().nth(best_i).expect("grid is not empty");
    (h, a, m, scores)
}

/// Trains every grid point on `train`, scores `tune`, and keeps the point
/// with the highest tune AUC (first in search order on ties). Points that
/// differ only in epochs or rounds share one training run, read off at
/// each length.
pub fn grid_search(grid: &Grid, rows: &[Vec<f64>], train: &WeightedSplit, tune: &WeightedSplit) -> Result<GridOutcome> {
    if tune.index.is_empty() {
        return Err(Error::Invalid("grid search needs a non-empty tune split".into()));
    }
    let train_rows = train.rows(rows);
    let tune_rows = tune.rows(rows);
    match grid {
        Grid::Logreg(g) => {
            g.validate()?;
            let std = Standardizer::fit(&train_rows, &train.weights);
            let mut checkpoints = g.epochs.clone();
            checkpoints.sort_unstable();
            checkpoints.dedup();
            let base = LogisticObjective::new(&train_rows, &train.labels, Some(&train.weights), Some(&std), 0.0)?;
            let mut fitted: Vec<(LogregHyper, LogisticModel)> = Vec::new();
            for &lr in &g.learning_rate {
                for &l2 in &g.l2 {
                    let mut obj = base.clone();
                    obj.l2 = l2;
                    let snaps = obj.descend(lr, &checkpoints)?;
                    for (&epochs, m) in checkpoints.iter().zip(snaps) {
                        fitted.push((LogregHyper { learning_rate: lr, l2, epochs }, m));
                    }
                }
            }
            let mut points = Vec::new();
            for h in g.points() {
                let m = fitted.iter().find(|(f, _)| *f == h).map(|(_, m)| m.clone()).expect("trained");
                let scores: Vec<f64> = tune_rows.iter().map(|r| m.margin_raw(r, &std)).collect();
                points.push((Hyper::Logreg(h), tune.auc(&scores)?, m));
            }
            let (best, tune_auc, model, scores) = pick_best(points);
            Ok(GridOutcome { best, tune_auc, params: ModelParams::Logreg { model, standardizer: std }, scores })
        }
        Grid::Gbdt(g) => {
            g.validate()?;
            let trainer = GbdtTrainer::new(&train_rows, &train.labels, Some(&train.weights))?;
            let max_rounds = *g.rounds.iter().max().expect("validated");
            let mut fitted: Vec<(GbdtHyper, f64, GbdtModel)> = Vec::new();
            for &lr in &g.learning_rate {
                for &depth in &g.max_depth {
                    for &min_leaf in &g.min_leaf {
                        let full = GbdtHyper { learning_rate: lr, max_depth: depth, rounds: max_rounds, min_leaf };
                        let mut sums = vec![0.0; tune_rows.len()];
                        let mut at_round: Vec<(usize, f64)> = Vec::new();
                        let mut err = None;
                        let model = trainer.fit_with(&full, |round, tree| {
                            for (s, r) in sums.iter_mut().zip(&tune_rows) {
                                *s += tree.predict(r);
                            }
                            if g.rounds.contains(&(round + 1)) {
                                match tune.auc(&sums) {
                                    Ok(a) => at_round.push((round + 1, a)),
                                    Err(e) => err = Some(e),
                                }
                            }
                        })?;
                        if let Some(e) = err {
                            return Err(e);
                        }
                        for (rounds, a) in at_round {
                            fitted.push((GbdtHyper { rounds, ..full }, a, model.truncated(rounds)));
                        }
                    }
                }
            }
            let mut points = Vec::new();
            for h in g.points() {
                let (_, a, m) = fitted.iter().find(|(f, _, _)| *f == h).expect("trained");
                points.push((Hyper::Gbdt(h), *a, m.clone()));
            }
            let (best, tune_auc, model, scores) = pick_best(points);
            Ok(GridOutcome { best, tune_auc, params: ModelParams::Gbdt { model }, scores })
        }
    }
}
