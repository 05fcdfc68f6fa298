//! Detection of ten social dimensions of relationships (knowledge, power,
//! status, trust, support, romance, similarity, identity, fun, conflict) in
//! conversational text.
//!
//! The crate is organized bottom-up:
//!
//! * [`corpus`] parses message corpora, annotation exports and geo tables.
//! * [`text`] segments, tokenizes and builds annotation passages.
//! * [`lexicon`] is a generic category-lexicon engine plus syllable counting.
//! * [`features`] computes interpretable feature families and n-gram vocabularies.
//! * [`embeddings`] holds the averaged-word-vector distance baseline.
//! * [`annotations`] turns crowd judgments into consensus labels and training sets.
//! * [`learn`] trains and evaluates per-dimension binary classifiers.
//! * [`analytics`] applies models at corpus scale (timelines, relationships, regression).
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod analytics;
pub mod annotations;
pub mod corpus;
pub mod dimension;
pub mod embeddings;
pub mod error;
pub mod features;
pub mod learn;
pub mod lexicon;
pub mod par;
pub mod resources;
pub mod synthetic;
pub mod text;

pub use dimension::Dimension;
pub use error::{Error, Result};
pub use resources::Resources;
