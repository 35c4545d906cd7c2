use std::fmt;

use serde::{Serialize, Serializer};

use super::chart::mark_for;

pub const STRESS_MARK: char = '\u{02C8}';
pub const SECONDARY_STRESS_MARK: char = '\u{02CC}';
pub const LENGTH_MARK: char = '\u{02D0}';
pub const TIE_BAR: char = '\u{0361}';
pub const TIE_BAR_BELOW: char = '\u{035C}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Phoneme,
    Silence,
    WordBoundary,
    SentenceEnd,
}

impl SegmentKind {
    /// Value of the `symbol_type` feature.
    pub fn symbol_type(self) -> &'static str {
        match self {
            SegmentKind::Phoneme => "phoneme",
            SegmentKind::Silence => "silence",
            SegmentKind::WordBoundary => "word_boundary",
            SegmentKind::SentenceEnd => "sentence_end",
        }
    }
}

impl fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol_type())
    }
}

/// One parsed IPA unit, or a non-phoneme symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub kind: SegmentKind,
    /// Base symbol. Affricates store both components joined by a tie bar.
    pub base: Option<String>,
    pub diacritics: Vec<String>,
    pub stressed: bool,
    pub long: bool,
    pub affricate: Option<(char, char)>,
}

impl Segment {
    pub fn phoneme(base: char) -> Self {
        Segment {
            kind: SegmentKind::Phoneme,
            base: Some(base.to_string()),
            diacritics: Vec::new(),
            stressed: false,
            long: false,
            affricate: None,
        }
    }

    pub fn affricate(first: char, second: char) -> Self {
        Segment {
            base: Some(format!("{first}{TIE_BAR}{second}")),
            affricate: Some((first, second)),
            ..Segment::phoneme(first)
        }
    }

    pub fn boundary(kind: SegmentKind) -> Self {
        Segment {
            kind,
            base: None,
            diacritics: Vec::new(),
            stressed: false,
            long: false,
            affricate: None,
        }
    }

    pub fn with_diacritic(mut self, name: &str) -> Self {
        self.diacritics.push(name.to_string());
        self
    }

    pub fn stressed(mut self, stressed: bool) -> Self {
        self.stressed = stressed;
        self
    }

    pub fn is_phoneme(&self) -> bool {
        self.kind == SegmentKind::Phoneme
    }

    /// First codepoint of the base, used for deterministic tie-breaking.
    pub fn base_char(&self) -> Option<char> {
        self.base.as_deref().and_then(|b| b.chars().next())
    }

    /// Base plus diacritic marks, without stress or length.
    pub fn symbol(&self) -> String {
        match &self.base {
            None => self.to_string(),
            Some(base) => {
                let mut out = base.clone();
                for d in &self.diacritics {
                    if let Some(mark) = mark_for(d) {
                        out.push(mark);
                    }
                }
                out
            }
        }
    }

    /// Copy with length cleared and, unless `keep_stress`, stress cleared.
    pub fn identity(&self, keep_stress: bool) -> Segment {
        Segment {
            stressed: keep_stress && self.stressed,
            long: false,
            ..self.clone()
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SegmentKind::Silence => f.write_str("_"),
            SegmentKind::WordBoundary => f.write_str("#"),
            SegmentKind::SentenceEnd => f.write_str("."),
            SegmentKind::Phoneme => {
                if self.stressed {
                    write!(f, "{STRESS_MARK}")?;
                }
                f.write_str(&self.symbol())?;
                if self.long {
                    write!(f, "{LENGTH_MARK}")?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for Segment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Renders a sequence so that re-tokenizing it gives the same segments.
/// Phonemes are concatenated; boundary symbols stand as separate tokens.
pub fn render(segments: &[Segment]) -> String {
    let mut out = String::new();
    let mut prev_boundary = true;
    for seg in segments {
        if seg.is_phoneme() {
            if prev_boundary && !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&seg.to_string());
            prev_boundary = false;
        } else {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&seg.to_string());
            prev_boundary = true;
        }
    }
    out
}
