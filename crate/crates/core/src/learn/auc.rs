use crate::error::{Error, Result};

/// Area under the ROC curve: the probability that a random positive scores
/// above a random negative, ties counting half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    weighted_auc(scores, labels, None)
}

/// [`auc`] where row `i` stands for `weights[i]` identical copies.
pub fn weighted_auc(scores: &[f64], labels: &[bool], weights: Option<&[f64]>) -> Result<f64> {
    if scores.len() != labels.len() || weights.is_some_and(|w| w.len() != scores.len()) {
        return Err(Error::Invalid("auc: scores, labels and weights differ in length".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Invalid("auc: non-finite score".into()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut order: Vec<usize> = (0..scores.len()).filter(|&i| w(i) > 0.0).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let (mut pos_total, mut neg_total) = (0.0, 0.0);
    let mut neg_below = 0.0;
    let mut acc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos_group, mut neg_group) = (0.0, 0.0);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            let k = order[j];
            if labels[k] {
                pos_group += w(k);
            } else {
                neg_group += w(k);
            }
            j += 1;
        }
        acc += pos_group * (neg_below + 0.5 * neg_group);
        neg_below += neg_group;
        pos_total += pos_group;
        neg_total += neg_group;
        i = j;
    }
    if pos_total == 0.0 || neg_total == 0.0 {
        return Err(Error::Invalid("auc needs both positive and negative samples".into()));
    }
    Ok(acc / (pos_total * neg_total))
}
