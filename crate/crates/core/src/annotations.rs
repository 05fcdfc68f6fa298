//! Crowd-label quality control, consensus, agreement and training sets.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::AnnotationRecord;
use crate::dimension::Dimension;
use crate::error::{Error, Result};

pub const DEFAULT_FAIL_THRESHOLD: f64 = 0.4;
pub const DEFAULT_QUORUM: usize = 2;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GoldScore {
    pub failed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Default)]
pub struct GateResult {
    pub kept: Vec<AnnotationRecord>,
    pub banned: BTreeSet<String>,
    pub gold_scores: BTreeMap<String, GoldScore>,
}

/// Bans annotators failing at least `fail_threshold` of their gold
/// sentences and drops every record they made. A gold answer counts as
/// correct when it shares at least one dimension with the gold labels.
pub fn apply_gold_gate(records: &[AnnotationRecord], fail_threshold: f64) -> GateResult {
    let mut gold_scores: BTreeMap<String, GoldScore> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_gold) {
        let s = gold_scores.entry(r.annotator_id.clone()).or_default();
        s.total += 1;
        if r.labels.is_disjoint(&r.gold_labels) {
            s.failed += 1;
        }
    }
    let banned: BTreeSet<String> = gold_scores
        .iter()
        .filter(|(_, s)| s.total > 0 && s.failed as f64 / s.total as f64 >= fail_threshold)
        .map(|(a, _)| a.clone())
        .collect();
    let kept = records.iter().filter(|r| !banned.contains(&r.annotator_id)).cloned().collect();
    GateResult { kept, banned, gold_scores }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusLabel {
    pub sentence_id: String,
    pub positive_dims: BTreeSet<Dimension>,
    pub annotator_count: usize,
    /// Annotators selecting each dimension, in canonical order.
    pub votes: [usize; 10],
}

impl ConsensusLabel {
    pub fn votes_for(&self, d: Dimension) -> usize {
        self.votes[d.index()]
    }
}

/// Per-sentence view of the non-gold records: annotator -> selected labels.
/// Duplicate records of one annotator are merged.
fn by_sentence(records: &[AnnotationRecord]) -> BTreeMap<&str, BTreeMap<&str, BTreeSet<Dimension>>> {
    let mut out: BTreeMap<&str, BTreeMap<&str, BTreeSet<Dimension>>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.is_gold) {
        out.entry(&r.sentence_id)
            .or_default()
            .entry(&r.annotator_id)
            .or_default()
            .extend(r.labels.iter().copied());
    }
    out
}

/// A dimension is positive for a sentence when at least `quorum`
/// annotators picked it. Output is sorted by sentence id.
pub fn consensus_labels(records: &[AnnotationRecord], quorum: usize) -> Vec<ConsensusLabel> {
    by_sentence(records)
        .into_iter()
        .map(|(sid, annotators)| {
            let mut votes = [0usize; 10];
            for labels in annotators.values() {
                for d in labels {
                    votes[d.index()] += 1;
                }
            }
            let positive_dims = Dimension::ALL.iter().copied().filter(|d| votes[d.index()] >= quorum.max(1)).collect();
            ConsensusLabel { sentence_id: sid.to_string(), positive_dims, annotator_count: annotators.len(), votes }
        })
        .collect()
}

pub fn write_consensus_csv<W: Write>(consensus: &[ConsensusLabel], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sentence_id", "positive_dims", "annotator_count"])?;
    for c in consensus {
        let dims: Vec<&str> = c.positive_dims.iter().map(|d| d.name()).collect();
        w.write_record([c.sentence_id.as_str(), &dims.join(";"), &c.annotator_count.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("consensus csv", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionAgreement {
    pub dimension: Dimension,
    /// Mean pairwise kappa over the pairs where it is defined.
    pub kappa: Option<f64>,
    pub pairs: usize,
    /// Pairs where neither rater varied the same way (chance agreement 1).
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementStats {
    pub per_dimension: Vec<DimensionAgreement>,
    /// Macro average of the defined per-dimension kappas.
    pub macro_kappa: Option<f64>,
    pub items: usize,
}

/// 2x2 table counts: [both yes, a only, b only, both no].
pub fn cohen_kappa(table: [usize; 4]) -> Option<f64> {
    let n = table.iter().sum::<usize>() as f64;
    if n == 0.0 {
        return None;
    }
    let [yy, yn, ny, nn] = table.map(|c| c as f64);
    let p_o = (yy + nn) / n;
    let a_yes = (yy + yn) / n;
    let b_yes = (yy + ny) / n;
    let p_e = a_yes * b_yes + (1.0 - a_yes) * (1.0 - b_yes);
    if (1.0 - p_e).abs() < 1e-12 {
        return None;
    }
    Some((p_o - p_e) / (1.0 - p_e))
}

/// Pairwise Cohen's kappa per dimension over items rated by both members of
/// each annotator pair, averaged over pairs; items with fewer than two
/// annotators are ignored.
pub fn agreement_stats(records: &[AnnotationRecord]) -> AgreementStats {
    let items = by_sentence(records);
    let mut tables: BTreeMap<(&str, &str), [[usize; 4]; 10]> = BTreeMap::new();
    let mut used = 0;
    for annotators in items.values().filter(|a| a.len() >= 2) {
        used += 1;
        let list: Vec<(&&str, &BTreeSet<Dimension>)> = annotators.iter().collect();
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let t = tables.entry((list[i].0, list[j].0)).or_insert([[0; 4]; 10]);
                for d in Dimension::ALL {
                    let cell = match (list[i].1.contains(&d), list[j].1.contains(&d)) {
                        (true, true) => 0,
                        (true, false) => 1,
                        (false, true) => 2,
                        (false, false) => 3,
                    };
                    t[d.index()][cell] += 1;
                }
            }
        }
    }
    let per_dimension: Vec<DimensionAgreement> = Dimension::ALL
        .iter()
        .map(|&d| {
            let kappas: Vec<Option<f64>> = tables.values().map(|t| cohen_kappa(t[d.index()])).collect();
            let defined: Vec<f64> = kappas.iter().flatten().copied().collect();
            DimensionAgreement {
                dimension: d,
                kappa: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
                pairs: defined.len(),
                excluded: kappas.len() - defined.len(),
            }
        })
        .collect();
    let defined: Vec<f64> = per_dimension.iter().filter_map(|a| a.kappa).collect();
    let macro_kappa = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    AgreementStats { per_dimension, macro_kappa, items: used }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSets {
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSets {
    pub sets: BTreeMap<Dimension, DimensionSets>,
}

impl TrainingSets {
    pub fn get(&self, d: Dimension) -> &DimensionSets {
        static EMPTY: DimensionSets = DimensionSets { positives: Vec::new(), negatives: Vec::new() };
        self.sets.get(&d).unwrap_or(&EMPTY)
    }

    /// Dimensions with no positive sentence.
    pub fn untrainable(&self) -> Vec<Dimension> {
        Dimension::ALL.iter().copied().filter(|&d| self.get(d).positives.is_empty()).collect()
    }

    pub fn check_trainable(&self, d: Dimension) -> Result<&DimensionSets> {
        let s = self.get(d);
        if s.positives.is_empty() {
            return Err(Error::Untrainable { dimension: d, message: "no positive sentences".into() });
        }
        if s.negatives.is_empty() {
            return Err(Error::Untrainable { dimension: d, message: "no negative sentences".into() });
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSetOptions {
    /// Treat sentences with some but fewer than quorum votes as negatives
    /// instead of leaving them out.
    pub sub_quorum_as_negative: bool,
}

/// Positives reach consensus for the dimension; negatives were never
/// labeled with it by anyone.
pub fn build_training_sets(consensus: &[ConsensusLabel], options: TrainingSetOptions) -> TrainingSets {
    let mut sets: BTreeMap<Dimension, DimensionSets> = Dimension::ALL.iter().map(|&d| (d, Default::default())).collect();
    for c in consensus {
        for d in Dimension::ALL {
            let s = sets.get_mut(&d).expect("all dimensions present");
            if c.positive_dims.contains(&d) {
                s.positives.push(c.sentence_id.clone());
            } else if c.votes_for(d) == 0 || options.sub_quorum_as_negative {
                s.negatives.push(c.sentence_id.clone());
            }
        }
    }
    TrainingSets { sets }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub source: String,
    pub sentences: usize,
    /// Sentences with 0, 1, 2 and 3 or more consensus dimensions.
    pub counts: [usize; 4],
}

impl DistributionRow {
    pub fn fractions(&self) -> [f64; 4] {
        if self.sentences == 0 {
            return [0.0; 4];
        }
        self.counts.map(|c| c as f64 / self.sentences as f64)
    }
}

/// Histogram of consensus dimensions per sentence for each source, plus an
/// `all` row last. `source_of` maps a sentence id to its source label.
pub fn label_distribution<F>(consensus: &[ConsensusLabel], source_of: F) -> Vec<DistributionRow>
where
    F: Fn(&str) -> Option<String>,
{
    let mut rows: BTreeMap<String, [usize; 4]> = BTreeMap::new();
    let mut all = [0usize; 4];
    for c in consensus {
        let bucket = c.positive_dims.len().min(3);
        all[bucket] += 1;
        if let Some(src) = source_of(&c.sentence_id) {
            rows.entry(src).or_default()[bucket] += 1;
        }
    }
    let mut out: Vec<DistributionRow> = rows
        .into_iter()
        .map(|(source, counts)| DistributionRow { source, sentences: counts.iter().sum(), counts })
        .collect();
    out.push(DistributionRow { source: "all".into(), sentences: all.iter().sum(), counts: all });
    out
}
