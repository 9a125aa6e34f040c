//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Variants carry
//! enough position information (line numbers, mention ids) to make corpus
//! problems diagnosable without a debugger.

use crate::features::Mode;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A corpus line did not have the expected number of tab-separated columns.
    #[error("line {line}: expected {expected} columns, found {found}")]
    MalformedLine {
        line: usize,
        expected: usize,
        found: usize,
    },

    /// Coreference columns describe an impossible chain layout.
    #[error("line {line}: inconsistent coreference annotation: {reason}")]
    InconsistentChain { line: usize, reason: String },

    /// The input held no token lines at all.
    #[error("empty corpus input")]
    EmptyInput,

    /// A synthetic-corpus spec asked for something unsatisfiable.
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    /// Mention detection needs phrase-type annotations and found none.
    #[error("mention detection requires phrase-type annotations, found none in document {0:?}")]
    MissingAnnotations(String),

    /// A sieve name in configuration did not match any known sieve.
    #[error("unknown sieve name {0:?}")]
    UnknownSieveName(String),

    /// Attempted to merge an entity with itself.
    #[error("cannot merge entity {0} with itself")]
    SameEntity(usize),

    /// A mention id passed where a pronoun was required is not a pronoun.
    #[error("mention {0} is not a pronoun")]
    NotAPronoun(usize),

    /// A scoring candidate does not precede the pronoun in document order.
    #[error("candidate mention {candidate} does not precede pronoun {pronoun}")]
    CandidateNotPreceding { pronoun: usize, candidate: usize },

    /// An embedding vector had a different width than the table dimension.
    #[error("line {line}: embedding has {found} components, table dimension is {expected}")]
    RaggedDimensions {
        line: usize,
        expected: usize,
        found: usize,
    },

    /// A lookup or operation mixed vectors of different dimensions.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A file that must carry data (embeddings, lexicon) was empty.
    #[error("empty file: {0}")]
    EmptyFile(String),

    /// Training was requested on zero examples.
    #[error("training set is empty")]
    EmptyTrainingSet,

    /// Training corpus has no gold chains, so no labels can be derived.
    #[error("no gold coreference chains in the training corpus")]
    NoGoldChains,

    /// Fewer documents than cross-validation folds.
    #[error("{folds}-fold cross-validation needs at least {folds} documents, found {found}")]
    TooFewDocuments { folds: usize, found: usize },

    /// A feature vector does not match the vocabulary/layout a model was trained with.
    #[error("feature vocabulary mismatch: {0}")]
    VocabMismatch(String),

    /// A model trained in one pairing mode was used under the other.
    #[error("model was trained in {model:?} mode but the run is configured for {requested:?}")]
    ModelModeMismatch { model: Mode, requested: Mode },

    /// Evaluation was requested but the corpus carries no gold annotations.
    #[error("no gold annotations available for evaluation")]
    MissingGold,

    /// A lexicon file was missing or malformed.
    #[error("lexicon error: {0}")]
    Lexicon(String),

    /// Configuration file or flag combination is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A model file could not be read or has an unsupported layout.
    #[error("model file error: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
