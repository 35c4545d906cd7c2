use std::collections::BTreeMap;

use unicode_normalization::UnicodeNormalization;

use super::chart::IpaChart;
use super::segment::*;
use crate::error::{Error, Result};

/// Whitespace-delimited tokens that produce non-phoneme segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTokens {
    pub silence: String,
    pub word_boundary: String,
    pub sentence_end: String,
}

impl Default for BoundaryTokens {
    fn default() -> Self {
        BoundaryTokens {
            silence: "_".into(),
            word_boundary: "#".into(),
            sentence_end: ".".into(),
        }
    }
}

impl BoundaryTokens {
    fn kind_of(&self, token: &str) -> Option<SegmentKind> {
        if token == self.silence {
            Some(SegmentKind::Silence)
        } else if token == self.word_boundary {
            Some(SegmentKind::WordBoundary)
        } else if token == self.sentence_end {
            Some(SegmentKind::SentenceEnd)
        } else {
            None
        }
    }
}

/// Splits IPA text into [`Segment`]s.
///
/// Rules, applied left to right:
/// - `ˈ` stresses the next vowel; `ˌ` and in-word `.` are skipped
/// - `ː` marks the preceding segment long
/// - combining and modifier diacritics attach to the preceding segment
/// - a tie bar joins the preceding and following consonant into an affricate
/// - a whitespace-delimited boundary token yields a non-phoneme segment
#[derive(Debug, Clone)]
pub struct Tokenizer<'a> {
    chart: &'a IpaChart,
    extra_bases: BTreeMap<char, bool>,
    boundaries: BoundaryTokens,
}

#[derive(Default)]
struct State {
    pending_stress: Option<usize>,
    pending_tie: Option<usize>,
    /// Index into the output of the last phoneme of the current token.
    last: Option<usize>,
}

impl<'a> Tokenizer<'a> {
    pub fn new(chart: &'a IpaChart) -> Self {
        Tokenizer {
            chart,
            extra_bases: BTreeMap::new(),
            boundaries: BoundaryTokens::default(),
        }
    }

    pub fn with_boundaries(mut self, boundaries: BoundaryTokens) -> Self {
        self.boundaries = boundaries;
        self
    }

    /// Accept `base` as a symbol even though the chart lacks it.
    pub fn with_extra_base(mut self, base: char, is_vowel: bool) -> Self {
        if !self.chart.is_base(base) {
            self.extra_bases.insert(base, is_vowel);
        }
        self
    }

    fn is_vowel(&self, c: char) -> bool {
        self.chart.is_vowel(c) || self.extra_bases.get(&c).copied().unwrap_or(false)
    }

    fn is_base(&self, c: char) -> bool {
        self.chart.is_base(c) || self.extra_bases.contains_key(&c)
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<Segment>> {
        let mut out = Vec::new();
        let mut state = State::default();
        for (start, token) in tokens(text) {
            state.last = None;
            if let Some(kind) = self.boundaries.kind_of(token) {
                if let Some(pos) = state.pending_stress {
                    return Err(Error::StrayStress(pos));
                }
                out.push(Segment::boundary(kind));
                continue;
            }
            for (offset, c) in token.chars().enumerate() {
                self.step(c, start + offset, &mut state, &mut out)?;
            }
            if let Some(pos) = state.pending_tie {
                return Err(Error::BadTieBar(pos));
            }
        }
        if let Some(pos) = state.pending_stress {
            return Err(Error::StrayStress(pos));
        }
        Ok(out)
    }

    fn step(&self, c: char, pos: usize, st: &mut State, out: &mut Vec<Segment>) -> Result<()> {
        // ASCII g is a common stand-in for the IPA letter.
        let c = if c == 'g' { '\u{0261}' } else { c };
        match c {
            STRESS_MARK => {
                if let Some(prev) = st.pending_stress {
                    return Err(Error::StrayStress(prev));
                }
                st.pending_stress = Some(pos);
            }
            SECONDARY_STRESS_MARK | '.' => {}
            LENGTH_MARK => {
                let idx = st.last.ok_or_else(|| dangling(c, pos))?;
                out[idx].long = true;
            }
            TIE_BAR | TIE_BAR_BELOW => {
                let idx = st.last.ok_or_else(|| dangling(c, pos))?;
                let seg = &out[idx];
                let ok = seg.affricate.is_none()
                    && st.pending_tie.is_none()
                    && seg.base_char().is_some_and(|b| !self.is_vowel(b));
                if !ok {
                    return Err(Error::BadTieBar(pos));
                }
                st.pending_tie = Some(pos);
            }
            _ if self.is_base(c) => self.push_base(c, pos, st, out)?,
            _ => {
                if let Some(name) = self.chart.diacritic(c) {
                    if st.pending_tie.is_some() {
                        return Err(Error::BadTieBar(pos));
                    }
                    let idx = st.last.ok_or_else(|| dangling(c, pos))?;
                    out[idx].diacritics.push(name.to_string());
                    return Ok(());
                }
                // Precomposed letters such as ã decompose into base + mark.
                let decomposed: Vec<char> = c.to_string().nfd().collect();
                if decomposed.len() > 1 && decomposed.iter().all(|&d| self.is_base(d) || self.chart.diacritic(d).is_some()) {
                    for d in decomposed {
                        self.step(d, pos, st, out)?;
                    }
                    return Ok(());
                }
                return Err(Error::UnknownSymbol {
                    symbol: c.to_string(),
                    position: pos,
                });
            }
        }
        Ok(())
    }

    fn push_base(&self, c: char, pos: usize, st: &mut State, out: &mut Vec<Segment>) -> Result<()> {
        if st.pending_tie.take().is_some() {
            if self.is_vowel(c) {
                return Err(Error::BadTieBar(pos));
            }
            let idx = st.last.expect("tie bar follows a base");
            let first = out[idx].base_char().expect("phoneme has a base");
            let diacritics = std::mem::take(&mut out[idx].diacritics);
            let long = out[idx].long;
            out[idx] = Segment {
                diacritics,
                long,
                ..Segment::affricate(first, c)
            };
            return Ok(());
        }
        let mut seg = match self.chart.ligature(c) {
            Some((a, b)) => Segment::affricate(a, b),
            None => Segment::phoneme(c),
        };
        if self.is_vowel(c) && st.pending_stress.take().is_some() {
            seg.stressed = true;
        }
        out.push(seg);
        st.last = Some(out.len() - 1);
        Ok(())
    }
}

fn dangling(c: char, pos: usize) -> Error {
    Error::DanglingMark {
        mark: c.to_string(),
        position: pos,
    }
}

/// Whitespace-delimited tokens with their starting character position.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut byte_start = None;
    let mut token_char_start = 0;
    let mut pieces = Vec::new();
    for (char_pos, (byte, c)) in text.char_indices().enumerate() {
        if c.is_whitespace() {
            if let Some(s) = byte_start.take() {
                pieces.push((token_char_start, &text[s..byte]));
            }
        } else if byte_start.is_none() {
            byte_start = Some(byte);
            token_char_start = char_pos;
        }
    }
    if let Some(s) = byte_start {
        pieces.push((token_char_start, &text[s..]));
    }
    pieces.into_iter()
}

/// Tokenizes with the default chart and boundary tokens.
pub fn tokenize(text: &str, chart: &IpaChart) -> Result<Vec<Segment>> {
    Tokenizer::new(chart).tokenize(text)
}
