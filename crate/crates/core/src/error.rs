use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // schema
    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),
    #[error("duplicate value `{value}` in feature `{feature}`")]
    DuplicateValue { feature: String, value: String },
    #[error("feature `{0}` has an empty value list")]
    EmptyValues(String),
    #[error("schema has no features")]
    EmptySchema,
    #[error("non-contiguous bit layout: feature `{feature}` declares offset {declared}, expected {expected}")]
    NonContiguousLayout {
        feature: String,
        declared: usize,
        expected: usize,
    },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown value `{value}` for feature `{feature}`")]
    UnknownValue { feature: String, value: String },
    #[error("feature `{0}` is not nullable but no value was given")]
    NullNotAllowed(String),
    #[error("malformed vector: {0}")]
    MalformedVector(String),

    // ipa
    #[error("unknown IPA symbol `{symbol}` at position {position}")]
    UnknownSymbol { symbol: String, position: usize },
    #[error("dangling mark `{mark}` at position {position}: no preceding base symbol")]
    DanglingMark { mark: String, position: usize },
    #[error("stress mark at position {0} has no following vowel")]
    StrayStress(usize),
    #[error("tie bar at position {0} does not join two consonants")]
    BadTieBar(usize),
    #[error("segment `{0}` cannot be analyzed: base symbol not in chart or overrides")]
    Unanalyzable(String),
    #[error("diacritic `{0}` is not a value of the schema's diacritic feature")]
    UnknownDiacritic(String),

    // frontend
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("duplicate headword `{word}` at line {line}")]
    DuplicateHeadword { word: String, line: usize },
    #[error("empty pronunciation for `{word}` at line {line}")]
    EmptyPronunciation { word: String, line: usize },
    #[error("resource symbol `{symbol}` is not mapped by table `{table}`")]
    UnmappedSymbol { symbol: String, table: String },
    #[error("out-of-vocabulary word `{0}`")]
    OutOfVocabulary(String),

    // zeroshot / metrics / projection
    #[error("inventory is empty")]
    EmptyInventory,
    #[error("override target `{0}` is not a member of the inventory")]
    UnknownOverrideTarget(String),
    #[error("random strategy requires a seed")]
    MissingSeed,
    #[error("utterance has no phonemes")]
    NoPhonemes,
    #[error("no utterances given")]
    NoUtterances,
    #[error("dimensions must be positive (got dim={dim}, total_bits={total_bits})")]
    BadDimensions { dim: usize, total_bits: usize },
    #[error("no injective projection found for seed {seed} after {attempts} draws")]
    DegenerateProjection { seed: u64, attempts: u64 },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
