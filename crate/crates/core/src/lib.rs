//! Phonological-feature input pipeline for zero-shot text-to-speech.
//!
//! Phonemes are represented by ten categorical features (consonant/vowel,
//! voicing, vowel frontness, openness and roundedness, stress, consonant
//! place and manner, diacritic, and a symbol type for silences and
//! boundaries), one-hot encoded into 60 bits. Because features come straight
//! from the IPA, a phoneme never seen in training still gets a meaningful
//! vector.
//!
//! - [`schema`]: feature catalog and binarization
//! - [`ipa`]: IPA tokenizer and chart-based analysis
//! - [`frontend`]: lexicon and mapping-table driven text to segments
//! - [`zeroshot`]: out-of-sample phoneme detection and AUTO/MANUAL/RANDOM plans
//! - [`projection`]: linear input layer, neighbour queries, embedding export
//! - [`metrics`]: unseen phoneme rate and inventory statistics

pub mod error;
pub mod frontend;
pub mod ipa;
pub mod metrics;
pub mod projection;
pub mod schema;
pub mod zeroshot;

pub use error::{Error, Result};
pub use ipa::{Analyzer, IpaChart, Segment, SegmentKind};
pub use schema::{BitVector, Categorical, FeatureSchema, PfVector};

// Keeps the guide's examples compiling and passing.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/schema.md")]
    mod schema {}
    #[doc = include_str!("../../../book/src/ipa.md")]
    mod ipa {}
    #[doc = include_str!("../../../book/src/frontend.md")]
    mod frontend {}
    #[doc = include_str!("../../../book/src/zeroshot.md")]
    mod zeroshot {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
}
