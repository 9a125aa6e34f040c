//! Entity-centric pronoun resolution.
//!
//! Documents are read from a 13-column tab-separated annotation format,
//! mentions are detected from chunk/NER/pronoun annotations, and a pipeline
//! of seven precision-ordered rule sieves builds partial entity clusters.
//! A trained classifier (bagged CART forest, or a logistic baseline) then
//! links each still-unresolved pronoun to the best preceding entity.
//!
//! The crate is deterministic end to end: identical inputs and seeds yield
//! byte-identical models and resolution dumps.

pub mod ablation;
pub mod attrs;
pub mod cli;
pub mod corpus;
pub mod embedding;
pub mod engine;
pub mod entity;
pub mod error;
pub mod features;
pub mod learner;
pub mod lexicon;
pub mod mention;
pub mod resolver;
pub mod sieves;
pub mod synth;

pub use attrs::{
    AnimacyValue, AttributeLattice, GenderValue, NumberValue, PersonValue, ValueSet,
};
pub use corpus::{parse_conll, read_corpus, write_conll, write_corpus, Document, Span, Token};
pub use embedding::EmbeddingTable;
pub use entity::{order_candidates, select_active_mentions, Entity, EntityStore};
pub use error::{Error, Result};
pub use features::{FeatureLayout, FeatureVocab, Mode};
pub use learner::Classifier;
pub use lexicon::Lexicons;
pub use mention::{detect_mentions, DetectionMode, HeadRule, Mention, MentionKind};
pub use resolver::{
    evaluate, resolve_document, EvalPolicy, EvalReport, Resolution, ResolverConfig,
};
pub use sieves::{run_pipeline, SieveConfig, SieveName};
