use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 10;

/// Positive and negative members of one split.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split<T> {
    pub positives: Vec<T>,
    pub negatives: Vec<T>,
}

impl<T: Clone> Split<T> {
    pub fn labeled(&self) -> Vec<(T, bool)> {
        self.positives
            .iter()
            .map(|p| (p.clone(), true))
            .chain(self.negatives.iter().map(|n| (n.clone(), false)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold<T> {
    pub train: Split<T>,
    pub tune: Split<T>,
    pub test: Split<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan<T> {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Fold<T>>,
}

/// SplitMix64 step, used to derive independent sub-seeds from one seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunks<T: Clone>(mut items: Vec<T>, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    items.shuffle(rng);
    let n = items.len();
    (0..k).map(|i| items[i * n / k..(i + 1) * n / k].to_vec()).collect()
}

/// Stratified k-fold plan. Each class is shuffled and cut into k nearly
/// equal chunks; fold i tests on chunk i, tunes on chunk i+1 (mod k) and
/// trains on the rest, giving 80/10/10 for k = 10.
pub fn make_folds<T: Clone>(positives: &[T], negatives: &[T], k: usize, seed: u64) -> Result<FoldPlan<T>> {
    if k < 3 {
        return Err(Error::Invalid(format!("cross-validation needs k >= 3 (train, tune and test), got {k}")));
    }
    if positives.len() < k || negatives.len() < k {
        return Err(Error::Invalid(format!(
            "{k}-fold cross-validation needs at least {k} samples per class, have {} positive and {} negative",
            positives.len(),
            negatives.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = chunks(positives.to_vec(), k, &mut rng);
    let n = chunks(negatives.to_vec(), k, &mut rng);
    let gather = |c: &[Vec<T>], pick: &dyn Fn(usize) -> bool| -> Vec<T> {
        c.iter().enumerate().filter(|(j, _)| pick(*j)).flat_map(|(_, v)| v.iter().cloned()).collect()
    };
    let folds = (0..k)
        .map(|i| {
            let tune = (i + 1) % k;
            let split = |pick: &dyn Fn(usize) -> bool| Split { positives: gather(&p, pick), negatives: gather(&n, pick) };
            Fold { train: split(&|j| j != i && j != tune), tune: split(&|j| j == tune), test: split(&|j| j == i) }
        })
        .collect();
    Ok(FoldPlan { k, seed, folds })
}

/// Randomly duplicates minority-class items (with replacement) until both
/// classes have the same count. Every input item is kept.
pub fn oversample<T: Clone>(items: &[(T, bool)], seed: u64) -> Result<Vec<(T, bool)>> {
    let pos: Vec<&(T, bool)> = items.iter().filter(|x| x.1).collect();
    let neg: Vec<&(T, bool)> = items.iter().filter(|x| !x.1).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Invalid("oversampling needs both classes".into()));
    }
    let minority = if pos.len() < neg.len() { &pos } else { &neg };
    let deficit = pos.len().abs_diff(neg.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = items.to_vec();
    out.extend((0..deficit).map(|_| minority[rng.gen_range(0..minority.len())].clone()));
    Ok(out)
}

/// Multiplicity of each index `0..n` in an oversampled multiset of indices.
pub fn multiplicities(sample: &[(usize, bool)], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for &(i, _) in sample {
        w[i] += 1.0;
    }
    w
}
