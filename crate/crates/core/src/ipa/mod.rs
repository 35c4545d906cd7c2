//! IPA tokenization and compositional feature analysis.

mod analyze;
mod chart;
mod segment;
mod tokenize;

pub use analyze::{analyze, Analyzer, Overrides, DIACRITIC_PRIORITY};
pub use chart::{ConsonantRow, IpaChart, VowelRow};
pub use segment::{
    render, Segment, SegmentKind, LENGTH_MARK, SECONDARY_STRESS_MARK, STRESS_MARK, TIE_BAR,
    TIE_BAR_BELOW,
};
pub use tokenize::{tokenize, BoundaryTokens, Tokenizer};
