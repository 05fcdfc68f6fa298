use serde::{Deserialize, Serialize};

use super::logreg::sigmoid;
use crate::error::{Error, Result};

/// L2 penalty on leaf values.
pub const LEAF_LAMBDA: f64 = 1.0;
/// Splits with gain at least this (essentially zero) are taken.
const MIN_GAIN: f64 = -1e-12;
const MIN_HESSIAN: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtHyper {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub rounds: usize,
    /// Minimum (weighted) number of samples in each child of a split.
    pub min_leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: f64 },
}

/// Regression tree; a row goes left when `x[feature] < threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Split { feature, threshold, left, right } => i = if row[feature] < threshold { left } else { right },
                Node::Leaf { value } => return value,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub base_margin: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

impl GbdtModel {
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.base_margin + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }

    /// The same ensemble cut to its first `rounds` trees.
    pub fn truncated(&self, rounds: usize) -> GbdtModel {
        GbdtModel { trees: self.trees[..rounds.min(self.trees.len())].to_vec(), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    g: f64,
    h: f64,
    c: f64,
    n: usize,
}

impl Stats {
    fn add(&mut self, [g, h, c]: [f64; 3]) {
        self.g += g;
        self.h += h;
        self.c += c;
        self.n += 1;
    }

    fn plus(self, o: Stats) -> Stats {
        Stats { g: self.g + o.g, h: self.h + o.h, c: self.c + o.c, n: self.n + o.n }
    }

    fn minus(self, o: Stats) -> Stats {
        Stats { g: self.g - o.g, h: self.h - o.h, c: self.c - o.c, n: self.n - o.n }
    }

    fn score(&self) -> f64 {
        self.g * self.g / (self.h + LEAF_LAMBDA)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    left: Stats,
}

/// A node of the level being grown, with its rows and per-bin totals.
struct Open {
    node: usize,
    stats: Stats,
    rows: Vec<u32>,
    hist: Vec<Stats>,
}

/// Training rows prepared for exact greedy split search. Each feature's
/// distinct values (zero included) form its bins, so a histogram over
/// them offers the same candidate splits as a sorted scan. A child's
/// histogram is built from its rows only when it is the smaller sibling;
/// the other is the parent's minus it.
pub struct GbdtTrainer<'a> {
    rows: Vec<&'a [f64]>,
    targets: Vec<f64>,
    weights: Vec<f64>,
    /// Bin values, ascending per feature; feature `j` owns `offsets[j]..offsets[j + 1]`.
    values: Vec<f64>,
    offsets: Vec<usize>,
    zero_bin: Vec<usize>,
    /// Bins of each row's non-zero values.
    row_ptr: Vec<usize>,
    row_bins: Vec<u32>,
}

impl<'a> GbdtTrainer<'a> {
    pub fn new(rows: &[&'a [f64]], labels: &[bool], weights: Option<&[f64]>) -> Result<Self> {
        if rows.len() != labels.len() || weights.is_some_and(|w| w.len() != rows.len()) {
            return Err(Error::Invalid("gbdt: rows, labels and weights differ in length".into()));
        }
        let weights: Vec<f64> = weights.map_or_else(|| vec![1.0; rows.len()], <[f64]>::to_vec);
        let keep: Vec<usize> = (0..rows.len()).filter(|&i| weights[i] > 0.0).collect();
        let rows: Vec<&[f64]> = keep.iter().map(|&i| rows[i]).collect();
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("gbdt: ragged feature rows".into()));
        }
        if rows.iter().all(|r| *r == rows[0]) {
            return Err(Error::Invalid("gbdt needs at least two distinct feature rows".into()));
        }
        let labels: Vec<bool> = keep.iter().map(|&i| labels[i]).collect();
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            return Err(Error::Invalid("gbdt needs both classes in the training data".into()));
        }
        let (mut values, mut offsets, mut zero_bin) = (Vec::new(), vec![0], Vec::with_capacity(dim));
        for j in 0..dim {
            let mut v: Vec<f64> = rows.iter().map(|r| r[j]).filter(|&x| x != 0.0).collect();
            v.push(0.0);
            v.sort_by(f64::total_cmp);
            v.dedup();
            zero_bin.push(values.len() + v.partition_point(|&x| x < 0.0));
            values.extend(v);
            offsets.push(values.len());
        }
        let (mut row_ptr, mut row_bins) = (vec![0], Vec::new());
        for r in &rows {
            for (j, &x) in r.iter().enumerate() {
                if x != 0.0 {
                    let bins = &values[offsets[j]..offsets[j + 1]];
                    row_bins.push((offsets[j] + bins.partition_point(|&b| b < x)) as u32);
                }
            }
            row_ptr.push(row_bins.len());
        }
        Ok(GbdtTrainer {
            rows,
            targets: labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect(),
            weights: keep.iter().map(|&i| weights[i]).collect(),
            values,
            offsets,
            zero_bin,
            row_ptr,
            row_bins,
        })
    }

    /// Boosts `hyper.rounds` trees, calling `after_round` with each new tree.
    pub fn fit_with<F: FnMut(usize, &Tree)>(&self, hyper: &GbdtHyper, mut after_round: F) -> Result<GbdtModel> {
        if hyper.max_depth < 1 || hyper.rounds < 1 {
            return Err(Error::Invalid("gbdt needs max_depth >= 1 and rounds >= 1".into()));
        }
        if !(hyper.learning_rate > 0.0 && hyper.learning_rate.is_finite()) {
            return Err(Error::Invalid("gbdt learning rate must be positive".into()));
        }
        let pos: f64 = self.weights.iter().zip(&self.targets).map(|(w, y)| w * y).sum();
        let neg: f64 = self.weights.iter().sum::<f64>() - pos;
        let base_margin = (pos / neg).ln();
        let n = self.rows.len();
        let mut margin = vec![base_margin; n];
        let mut ghw = vec![[0.0; 3]; n];
        let mut trees = Vec::with_capacity(hyper.rounds);
        for round in 0..hyper.rounds {
            for i in 0..n {
                let p = sigmoid(margin[i]);
                let w = self.weights[i];
                ghw[i] = [w * (p - self.targets[i]), (w * p * (1.0 - p)).max(MIN_HESSIAN * w), w];
            }
            let (tree, leaf_of) = self.grow(&ghw, hyper);
            for i in 0..n {
                if let Node::Leaf { value } = tree.nodes[leaf_of[i]] {
                    margin[i] += hyper.learning_rate * value;
                }
            }
            after_round(round, &tree);
            trees.push(tree);
        }
        Ok(GbdtModel { base_margin, learning_rate: hyper.learning_rate, trees })
    }

    pub fn fit(&self, hyper: &GbdtHyper) -> Result<GbdtModel> {
        self.fit_with(hyper, |_, _| {})
    }

    /// Per-bin totals of `rows`; zero bins are left empty.
    fn histogram(&self, rows: &[u32], ghw: &[[f64; 3]]) -> Vec<Stats> {
        let mut hist = vec![Stats::default(); self.values.len()];
        for &i in rows {
            let i = i as usize;
            let x = ghw[i];
            for &b in &self.row_bins[self.row_ptr[i]..self.row_ptr[i + 1]] {
                hist[b as usize].add(x);
            }
        }
        hist
    }

    /// Best split of a node over all features, scanning each feature's bins
    /// in ascending order; the first feature wins ties.
    fn best_split(&self, open: &Open, min_leaf: f64) -> Option<Candidate> {
        let stats = open.stats;
        let parent = stats.score();
        let mut best: Option<Candidate> = None;
        for j in 0..self.offsets.len() - 1 {
            let range = self.offsets[j]..self.offsets[j + 1];
            let (bins, values) = (&open.hist[range.clone()], &self.values[range]);
            let z = self.zero_bin[j] - self.offsets[j];
            let nonzero = bins.iter().fold(Stats::default(), |acc, s| acc.plus(*s));
            if nonzero.n == 0 {
                continue;
            }
            let zeros = stats.minus(nonzero);
            let mut found = None;
            let mut left = Stats::default();
            let mut lo = f64::NAN;
            for (k, (&s, &v)) in bins.iter().zip(values).enumerate() {
                let s = if k == z { zeros } else { s };
                if s.n == 0 {
                    continue;
                }
                if left.n > 0 {
                    offer(&mut found, &stats, parent, left, j, lo, v, min_leaf);
                }
                left = left.plus(s);
                lo = v;
            }
            if let Some(c) = found {
                if best.is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// `ghw` holds gradient, hessian and weight per row.
    fn grow(&self, ghw: &[[f64; 3]], hyper: &GbdtHyper) -> (Tree, Vec<usize>) {
        let n = self.rows.len();
        let all: Vec<u32> = (0..n as u32).collect();
        let root = ghw.iter().fold(Stats::default(), |mut s, &x| {
            s.add(x);
            s
        });
        let mut nodes = vec![Node::Leaf { value: 0.0 }];
        let mut node_stats = vec![root];
        let mut leaf_of = vec![0usize; n];
        let mut level = vec![Open { node: 0, stats: root, hist: self.histogram(&all, ghw), rows: all }];
        let min_leaf = hyper.min_leaf as f64;

        for depth in 0..hyper.max_depth {
            let last = depth + 1 == hyper.max_depth;
            let mut next = Vec::new();
            for open in level {
                let Some(best) = self.best_split(&open, min_leaf) else { continue };
                let (l, r) = (nodes.len(), nodes.len() + 1);
                let right = open.stats.minus(best.left);
                nodes.push(Node::Leaf { value: 0.0 });
                nodes.push(Node::Leaf { value: 0.0 });
                node_stats.push(best.left);
                node_stats.push(right);
                nodes[open.node] = Node::Split { feature: best.feature, threshold: best.threshold, left: l, right: r };
                let (lrows, rrows): (Vec<u32>, Vec<u32>) =
                    open.rows.iter().partition(|&&i| self.rows[i as usize][best.feature] < best.threshold);
                lrows.iter().for_each(|&i| leaf_of[i as usize] = l);
                rrows.iter().for_each(|&i| leaf_of[i as usize] = r);
                if last {
                    continue;
                }
                let small = self.histogram(if lrows.len() <= rrows.len() { &lrows } else { &rrows }, ghw);
                let mut large = open.hist;
                large.iter_mut().zip(&small).for_each(|(p, s)| *p = p.minus(*s));
                let (lhist, rhist) = if lrows.len() <= rrows.len() { (small, large) } else { (large, small) };
                next.push(Open { node: l, stats: best.left, rows: lrows, hist: lhist });
                next.push(Open { node: r, stats: right, rows: rrows, hist: rhist });
            }
            if next.is_empty() {
                break;
            }
            level = next;
        }
        for (k, node) in nodes.iter_mut().enumerate() {
            if let Node::Leaf { value } = node {
                let s = node_stats[k];
                *value = -s.g / (s.h + LEAF_LAMBDA);
            }
        }
        (Tree { nodes }, leaf_of)
    }
}

/// Offers the split between adjacent values `lo < hi` with `left` on the low
/// side. Equal gains keep the lower threshold. Scores are
/// compared as cross-multiplied fractions; the gain is only divided out for
/// a split that is kept.
fn offer(best: &mut Option<Candidate>, node: &Stats, parent: f64, left: Stats, feature: usize, lo: f64, hi: f64, min_leaf: f64) {
    let right = node.minus(left);
    if left.c < min_leaf || right.c < min_leaf {
        return;
    }
    let (lh, rh) = (left.h + LEAF_LAMBDA, right.h + LEAF_LAMBDA);
    let num = left.g * left.g * rh + right.g * right.g * lh;
    let den = lh * rh;
    let bar = best.map_or(parent + MIN_GAIN, |b| parent + b.gain) * den;
    // The midpoint of two adjacent floats can round down onto the lower one.
    let mid = 0.5 * (lo + hi);
    let threshold = if mid > lo { mid } else { hi };
    let better = match best {
        None => num >= bar,
        Some(b) => num > bar || (num == bar && threshold < b.threshold),
    };
    if better {
        let gain = left.score() + right.score() - parent;
        *best = Some(Candidate { gain, feature, threshold, left });
    }
}

/// Gradient-boosted trees on logistic-loss gradients with exact greedy
/// splits and Newton leaf values.
pub fn train_gbdt(rows: &[Vec<f64>], labels: &[bool], hyper: &GbdtHyper) -> Result<GbdtModel> {
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    GbdtTrainer::new(&refs, labels, None)?.fit(hyper)
}
