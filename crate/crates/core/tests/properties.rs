use std::collections::BTreeSet;

use proptest::prelude::*;

use socdim_core::annotations::consensus_labels;
use socdim_core::corpus::AnnotationRecord;
use socdim_core::learn::{auc, make_folds, oversample, weighted_auc};
use socdim_core::text::{split_sentences, tokenize};
use socdim_core::Dimension;

fn scored() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    prop::collection::vec((0u8..6, any::<bool>()), 2..60)
        .prop_filter("both classes", |v| v.iter().any(|x| x.1) && v.iter().any(|x| !x.1))
        .prop_map(|v| v.into_iter().map(|(s, l)| (s as f64, l)).unzip())
}

proptest! {
    #[test]
    fn auc_is_bounded_and_flips((scores, labels) in scored()) {
        let a = auc(&scores, &labels).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        prop_assert!((auc(&negated, &labels).unwrap() - (1.0 - a)).abs() < 1e-12);
    }

    #[test]
    fn auc_ignores_monotone_transforms((scores, labels) in scored()) {
        let squashed: Vec<f64> = scores.iter().map(|s| (s * 0.7 - 1.0).exp()).collect();
        prop_assert_eq!(auc(&scores, &labels).unwrap(), auc(&squashed, &labels).unwrap());
    }

    #[test]
    fn integer_weights_match_repetition((scores, labels) in scored(), reps in prop::collection::vec(1usize..4, 60)) {
        let weights: Vec<f64> = (0..scores.len()).map(|i| reps[i] as f64).collect();
        let mut s2 = Vec::new();
        let mut l2 = Vec::new();
        for i in 0..scores.len() {
            for _ in 0..reps[i] {
                s2.push(scores[i]);
                l2.push(labels[i]);
            }
        }
        let weighted = weighted_auc(&scores, &labels, Some(&weights)).unwrap();
        prop_assert!((weighted - auc(&s2, &l2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tokenizing_surfaces_is_stable(text in "[a-zA-Z0-9 ,.!?'@#:-]{0,80}") {
        let once: Vec<String> = tokenize(&text).into_iter().map(|t| t.surface).collect();
        let twice: Vec<String> = tokenize(&once.join(" ")).into_iter().map(|t| t.surface).collect();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn sentence_split_keeps_every_token(text in "[a-z ]{1,20}([.!?] [A-Z][a-z ]{1,20}){0,4}") {
        let whole: Vec<String> = tokenize(&text).into_iter().map(|t| t.surface).collect();
        let parts: Vec<String> = split_sentences(&text).into_iter().flat_map(|s| s.tokens).map(|t| t.surface).collect();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn consensus_ignores_record_order(
        votes in prop::collection::vec((0usize..5, 0usize..6, prop::collection::btree_set(0usize..10, 0..3)), 1..40),
        seed in any::<u64>(),
    ) {
        let mut seen = BTreeSet::new();
        let records: Vec<AnnotationRecord> = votes
            .into_iter()
            .filter(|(s, a, _)| seen.insert((*s, *a)))
            .map(|(s, a, dims)| AnnotationRecord {
                sentence_id: format!("s{s}"),
                annotator_id: format!("a{a}"),
                other_flag: dims.is_empty(),
                labels: dims.into_iter().map(|d| Dimension::ALL[d]).collect(),
                is_gold: false,
                gold_labels: BTreeSet::new(),
            })
            .collect();
        let mut shuffled = records.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(consensus_labels(&records, 2), consensus_labels(&shuffled, 2));
    }

    #[test]
    fn folds_partition_each_class(np in 10usize..60, nn in 10usize..120, k in 3usize..8, seed in any::<u64>()) {
        let pos: Vec<usize> = (0..np).collect();
        let neg: Vec<usize> = (np..np + nn).collect();
        let plan = make_folds(&pos, &neg, k, seed).unwrap();
        let mut tested: Vec<usize> = plan.folds.iter().flat_map(|f| f.test.positives.iter().chain(&f.test.negatives).copied()).collect();
        tested.sort_unstable();
        prop_assert_eq!(tested, (0..np + nn).collect::<Vec<_>>());
        for f in &plan.folds {
            let mut all: Vec<usize> = [&f.train, &f.tune, &f.test]
                .iter()
                .flat_map(|s| s.positives.iter().chain(&s.negatives).copied())
                .collect();
            all.sort_unstable();
            all.dedup();
            prop_assert_eq!(all.len(), np + nn);
        }
    }

    #[test]
    fn oversampling_balances(np in 1usize..30, nn in 1usize..30, seed in any::<u64>()) {
        let items: Vec<(usize, bool)> = (0..np + nn).map(|i| (i, i < np)).collect();
        let out = oversample(&items, seed).unwrap();
        let pos = out.iter().filter(|x| x.1).count();
        prop_assert_eq!(pos * 2, out.len());
        prop_assert_eq!(out.len(), 2 * np.max(nn));
    }
}
