//! Lexicon-driven linguistic frontend.
//!
//! Words are looked up in a pronunciation [`Lexicon`], their resource-specific
//! phoneme symbols are mapped to IPA through a [`MappingTable`], and the
//! resulting segments are encoded row by row into a feature matrix.
//!
//! The mapping step normalizes resource conventions:
//! - diphthong symbols expand to their two component vowels
//! - lexical stress lands on the vowel of the stressed syllable, and on the
//!   first component of a diphthong
//! - vowel length is dropped

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ipa::{Analyzer, Segment, SegmentKind};
use crate::schema::{BitVector, FeatureSchema};

/// One token of a lexicon pronunciation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PronToken {
    /// Start of the primary-stressed syllable (`"`).
    Stress,
    /// Start of a secondary-stressed syllable (`%`); treated as unstressed.
    SecondaryStress,
    /// Syllable boundary (`.`).
    SyllableBreak,
    Symbol(String),
}

/// Parses a space-separated pronunciation such as `"h aU . z @ z`.
pub fn parse_pronunciation(pron: &str) -> Vec<PronToken> {
    let mut out = Vec::new();
    for raw in pron.split_whitespace() {
        if raw == "." {
            out.push(PronToken::SyllableBreak);
            continue;
        }
        let mut rest = raw;
        loop {
            if let Some(r) = rest.strip_prefix('"') {
                out.push(PronToken::Stress);
                rest = r;
            } else if let Some(r) = rest.strip_prefix('%') {
                out.push(PronToken::SecondaryStress);
                rest = r;
            } else {
                break;
            }
        }
        if !rest.is_empty() {
            out.push(PronToken::Symbol(rest.to_string()));
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub name: String,
    /// Resource tag, e.g. `combilex-rp` or `mary-de`.
    pub source: String,
    entries: BTreeMap<String, Vec<PronToken>>,
}

fn is_comment(line: &str) -> bool {
    line.trim().is_empty() || line.starts_with("//")
}

impl Lexicon {
    /// Parses `word<TAB>pronunciation` lines. Headwords are case-folded.
    pub fn parse(text: &str, name: &str, source: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if is_comment(line) {
                continue;
            }
            let (word, pron) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: name.to_string(),
                line: line_no,
                message: "expected `word<TAB>pronunciation`".into(),
            })?;
            let word = word.trim().to_lowercase();
            let tokens = parse_pronunciation(pron);
            if !tokens.iter().any(|t| matches!(t, PronToken::Symbol(_))) {
                return Err(Error::EmptyPronunciation { word, line: line_no });
            }
            if entries.contains_key(&word) {
                return Err(Error::DuplicateHeadword { word, line: line_no });
            }
            entries.insert(word, tokens);
        }
        if entries.is_empty() {
            log::warn!("lexicon `{name}` is empty");
        }
        Ok(Lexicon {
            name: name.to_string(),
            source: source.to_string(),
            entries,
        })
    }

    pub fn get(&self, word: &str) -> Option<&[PronToken]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_lexicon(path: &Path, source: &str) -> Result<Lexicon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Lexicon::parse(&text, &path.display().to_string(), source)
}

/// Resource symbol to IPA. Lines are `symbol<TAB>ipa`, with an optional
/// third column `diphthong`.
#[derive(Debug, Clone, Default)]
pub struct MappingTable {
    pub name: String,
    map: BTreeMap<String, Vec<Segment>>,
    diphthongs: BTreeSet<String>,
}

impl MappingTable {
    pub fn parse(text: &str, name: &str, analyzer: &Analyzer) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut diphthongs = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if is_comment(line) {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: name.to_string(),
                line: line_no,
                message,
            };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let (symbol, ipa, flag) = match cols.as_slice() {
                [s, ipa] => (*s, *ipa, None),
                [s, ipa, f] => (*s, *ipa, Some(*f)),
                _ => return Err(err("expected `symbol<TAB>ipa[<TAB>diphthong]`".into())),
            };
            if symbol.is_empty() {
                return Err(err("empty resource symbol".into()));
            }
            let segments = analyzer
                .tokenize(ipa)
                .map_err(|e| err(format!("`{ipa}`: {e}")))?;
            if segments.is_empty() || segments.iter().any(|s| !s.is_phoneme()) {
                return Err(err(format!("`{ipa}` must be one or more phonemes")));
            }
            for seg in &segments {
                analyzer.analyze(seg).map_err(|e| err(format!("`{ipa}`: {e}")))?;
            }
            match flag {
                None | Some("") => {}
                Some("diphthong") => {
                    let vowels = segments.len() == 2
                        && segments.iter().all(|s| {
                            s.base_char().is_some_and(|c| analyzer.chart().is_vowel(c))
                        });
                    if !vowels {
                        return Err(err(format!("diphthong `{symbol}` must map to two vowels")));
                    }
                    diphthongs.insert(symbol.to_string());
                }
                Some(other) => return Err(err(format!("unknown flag `{other}`"))),
            }
            if map.insert(symbol.to_string(), segments).is_some() {
                return Err(err(format!("duplicate symbol `{symbol}`")));
            }
        }
        Ok(MappingTable {
            name: name.to_string(),
            map,
            diphthongs,
        })
    }

    pub fn load(path: &Path, analyzer: &Analyzer) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&text, &name, analyzer)
    }

    pub fn get(&self, symbol: &str) -> Option<&[Segment]> {
        self.map.get(symbol).map(Vec::as_slice)
    }

    pub fn is_diphthong(&self, symbol: &str) -> bool {
        self.diphthongs.contains(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

/// Maps a lexicon pronunciation to IPA segments.
pub fn to_ipa(pron: &[PronToken], table: &MappingTable, analyzer: &Analyzer) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    let mut pending_stress = false;
    for token in pron {
        match token {
            PronToken::Stress => pending_stress = true,
            PronToken::SecondaryStress | PronToken::SyllableBreak => pending_stress = false,
            PronToken::Symbol(sym) => {
                let segments = table.get(sym).ok_or_else(|| Error::UnmappedSymbol {
                    symbol: sym.clone(),
                    table: table.name.clone(),
                })?;
                for seg in segments {
                    let is_vowel = seg.base_char().is_some_and(|c| {
                        analyzer.chart().is_vowel(c)
                            || analyzer.analyze(seg).is_ok_and(|v| {
                                v.categorical.get(crate::schema::CV) == Some("vowel")
                            })
                    });
                    let mut seg = seg.clone();
                    seg.long = false;
                    seg.stressed = is_vowel && pending_stress;
                    if seg.stressed {
                        pending_stress = false;
                    }
                    out.push(seg);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub text: String,
    pub words: Vec<String>,
    pub segments: Vec<Segment>,
    pub pf_matrix: Vec<BitVector>,
}

#[derive(Serialize)]
struct UtteranceJson<'a> {
    text: &'a str,
    words: &'a [String],
    segments: Vec<SegmentRow<'a>>,
}

#[derive(Serialize)]
struct SegmentRow<'a> {
    symbol: &'a Segment,
    kind: SegmentKind,
    bits: String,
}

impl Utterance {
    pub fn phoneme_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_phoneme()).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let segments = self
            .segments
            .iter()
            .zip(&self.pf_matrix)
            .map(|(symbol, bits)| SegmentRow {
                symbol,
                kind: symbol.kind,
                bits: bits.to_string(),
            })
            .collect();
        serde_json::to_value(UtteranceJson {
            text: &self.text,
            words: &self.words,
            segments,
        })
        .expect("utterance serializes")
    }

    /// One row per segment: symbol, kind, then one 0/1 column per bit.
    pub fn write_csv<W: Write>(&self, schema: &FeatureSchema, out: W, header: bool) -> Result<()> {
        write_matrix_csv(&self.segments, &self.pf_matrix, schema, out, header)
    }
}

pub fn write_matrix_csv<W: Write>(
    segments: &[Segment],
    rows: &[BitVector],
    schema: &FeatureSchema,
    out: W,
    header: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if header {
        let mut cols = vec!["symbol".to_string(), "kind".to_string()];
        cols.extend(schema.bit_labels());
        w.write_record(&cols)?;
    }
    for (seg, bits) in segments.iter().zip(rows) {
        let mut rec = vec![seg.to_string(), seg.kind.to_string()];
        rec.extend(bits.as_slice().iter().map(|&b| if b { "1" } else { "0" }.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// A lexicon, mapping table and analyzer, ready to turn sentences into
/// [`Utterance`]s.
#[derive(Debug, Clone)]
pub struct Frontend {
    pub lexicon: Lexicon,
    pub table: MappingTable,
    pub analyzer: Analyzer,
}

enum Item {
    Word(Vec<Segment>),
    Silence,
    SentenceEnd,
}

impl Frontend {
    pub fn new(lexicon: Lexicon, table: MappingTable, analyzer: Analyzer) -> Self {
        Frontend {
            lexicon,
            table,
            analyzer,
        }
    }

    /// Text to segments: words separated by word boundaries, terminated by
    /// a sentence end. Punctuation attached to words is stripped; `.`, `!`
    /// or `?` at the end of a word closes a sentence, and a standalone `_`
    /// inserts a silence.
    pub fn segments(&self, text: &str) -> Result<(Vec<String>, Vec<Segment>)> {
        let mut items = Vec::new();
        let mut words = Vec::new();
        for raw in text.split_whitespace() {
            if raw == "_" {
                items.push(Item::Silence);
                continue;
            }
            let closes = raw
                .trim_end_matches(['"', '\'', ')', ']', '»', '”', '’'])
                .ends_with(['.', '!', '?']);
            let word = raw.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
            if !word.is_empty() {
                let pron = self
                    .lexicon
                    .get(&word)
                    .ok_or_else(|| Error::OutOfVocabulary(word.clone()))?;
                items.push(Item::Word(to_ipa(pron, &self.table, &self.analyzer)?));
                words.push(word);
            }
            if closes && !matches!(items.last(), Some(Item::SentenceEnd)) {
                items.push(Item::SentenceEnd);
            }
        }
        if !matches!(items.last(), Some(Item::SentenceEnd)) {
            items.push(Item::SentenceEnd);
        }

        let mut segments = Vec::new();
        let mut prev_word = false;
        for item in items {
            match item {
                Item::Word(segs) => {
                    if prev_word {
                        segments.push(Segment::boundary(SegmentKind::WordBoundary));
                    }
                    segments.extend(segs);
                    prev_word = true;
                }
                Item::Silence => {
                    segments.push(Segment::boundary(SegmentKind::Silence));
                    prev_word = false;
                }
                Item::SentenceEnd => {
                    segments.push(Segment::boundary(SegmentKind::SentenceEnd));
                    prev_word = false;
                }
            }
        }
        Ok((words, segments))
    }

    pub fn utterance(&self, text: &str) -> Result<Utterance> {
        let (words, segments) = self.segments(text)?;
        let pf_matrix = self.analyzer.encode(&segments)?;
        Ok(Utterance {
            text: text.to_string(),
            words,
            segments,
            pf_matrix,
        })
    }
}

pub fn text_to_utterance(
    text: &str,
    lexicon: &Lexicon,
    table: &MappingTable,
    analyzer: &Analyzer,
) -> Result<Utterance> {
    Frontend::new(lexicon.clone(), table.clone(), analyzer.clone()).utterance(text)
}
