//! Per-dimension binary classifiers and their evaluation protocol.

mod auc;
mod effect;
mod evaluate;
mod folds;
mod gbdt;
mod grid;
mod logreg;
mod model;

pub use auc::{auc, weighted_auc};
pub use effect::{cohen_d, effect_sizes, EffectSize, EffectSizes, DEFAULT_EFFECT_THRESHOLD};
pub use evaluate::{
    evaluate, evaluate_scores, train_model, write_reports_csv, EvalConfig, EvaluationReport, FoldFeatures, FoldRows,
    FINAL_TUNE_FRACTION,
};
pub use folds::{derive_seed, make_folds, multiplicities, oversample, Fold, FoldPlan, Split, DEFAULT_FOLDS};
pub use gbdt::{train_gbdt, GbdtHyper, GbdtModel, GbdtTrainer, Node, Tree, LEAF_LAMBDA};
pub use grid::{grid_search, GbdtGrid, Grid, GridOutcome, LogregGrid, WeightedSplit};
pub use logreg::{sigmoid, train_logreg, LogisticModel, LogisticObjective, LogregHyper, Standardizer};
pub use model::{
    predict, Hyper, Model, ModelKind, ModelParams, ModelScorer, PredictInput, TrainingMeta, MODEL_FORMAT_VERSION,
};
