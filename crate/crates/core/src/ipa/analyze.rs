use std::collections::BTreeMap;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use super::chart::IpaChart;
use super::segment::{Segment, SegmentKind};
use super::tokenize::{BoundaryTokens, Tokenizer};
use crate::error::{Error, Result};
use crate::schema::{self, BitVector, Categorical, FeatureSchema, PfVector};

/// Diacritics that win when several are stacked on one segment, highest
/// first. Anything else ranks after these, in schema order.
pub const DIACRITIC_PRIORITY: &[&str] = &[
    "nasalized",
    "velarized",
    "pharyngealized",
    "palatalized",
    "labialized",
    "aspirated",
];

/// IPA symbol to full categorical record. An entry replaces the chart-based
/// analysis of any segment whose symbol matches it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    entries: BTreeMap<String, Categorical>,
}

impl Overrides {
    /// Parses `ipa<TAB>feature=value;feature=value` lines. Blank lines and
    /// lines starting with `//` are skipped.
    pub fn parse(text: &str, origin: &str, chart: &IpaChart) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with("//") {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: line_no,
                message,
            };
            let (key, spec) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `ipa<TAB>features`".into()))?;
            let key = normalize_key(key.trim(), chart);
            if key.is_empty() {
                return Err(parse_err("empty IPA key".into()));
            }
            let record = Categorical::parse(spec)
                .ok_or_else(|| parse_err(format!("malformed feature list `{spec}`")))?;
            if entries.insert(key.clone(), record).is_some() {
                return Err(parse_err(format!("duplicate override for `{key}`")));
            }
        }
        Ok(Overrides { entries })
    }

    pub fn load(path: &Path, chart: &IpaChart) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string(), chart)
    }

    pub fn insert(&mut self, ipa: &str, record: Categorical, chart: &IpaChart) {
        self.entries.insert(normalize_key(ipa, chart), record);
    }

    pub fn get(&self, symbol: &str) -> Option<&Categorical> {
        self.entries.get(symbol)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Leading symbols of override keys that the chart does not know, with
    /// whether the override describes a vowel.
    fn extra_bases<'a>(&'a self, chart: &'a IpaChart) -> impl Iterator<Item = (char, bool)> + 'a {
        self.entries.iter().filter_map(move |(key, rec)| {
            let first = key.chars().next()?;
            (!chart.is_base(first) && chart.diacritic(first).is_none())
                .then(|| (first, rec.get(schema::CV) == Some("vowel")))
        })
    }
}

fn normalize_key(key: &str, chart: &IpaChart) -> String {
    key.chars()
        .flat_map(|c| {
            if chart.is_base(c) {
                vec![c]
            } else {
                c.to_string().nfd().collect()
            }
        })
        .collect()
}

/// Maps a segment to its phonological feature vector.
///
/// Overrides are consulted first, by full symbol (base plus diacritics).
/// Otherwise the chart row of the base supplies the articulatory features,
/// with three additions: the stress flag of a vowel, the highest-priority
/// diacritic, and for affricates voicing from the first component and place
/// from the second. A base that only has a bare override entry still takes
/// diacritics compositionally.
pub fn analyze(
    segment: &Segment,
    schema: &FeatureSchema,
    chart: &IpaChart,
    overrides: Option<&Overrides>,
) -> Result<PfVector> {
    let record = categorical(segment, schema, chart, overrides)?;
    PfVector::new(record, schema)
}

fn categorical(
    segment: &Segment,
    schema: &FeatureSchema,
    chart: &IpaChart,
    overrides: Option<&Overrides>,
) -> Result<Categorical> {
    let mut rec = Categorical::new().with(schema::SYMBOL_TYPE, segment.kind.symbol_type());
    if segment.kind != SegmentKind::Phoneme {
        return Ok(rec);
    }
    let unanalyzable = || Error::Unanalyzable(segment.symbol());
    let base = segment.base.as_deref().ok_or_else(unanalyzable)?;

    if let Some(full) = overrides.and_then(|o| o.get(&segment.symbol())) {
        let mut full = full.clone();
        apply_stress(&mut full, segment.stressed);
        return Ok(full);
    }

    let mut candidates: Vec<&str> = Vec::new();
    let mut is_vowel = false;
    if let Some((first, second)) = segment.affricate {
        let a = chart.consonant(first).ok_or_else(unanalyzable)?;
        let b = chart.consonant(second).ok_or_else(unanalyzable)?;
        rec.set(schema::CV, "consonant");
        rec.set(schema::VOICING, a.voicing);
        rec.set(schema::PLACE, b.place);
        rec.set(schema::MANNER, "affricate");
        candidates.extend(b.inherent);
        candidates.extend(a.inherent);
    } else {
        let mut chars = base.chars();
        let c = chars.next().ok_or_else(unanalyzable)?;
        if chars.next().is_some() {
            return Err(unanalyzable());
        }
        if let Some(row) = chart.consonant(c) {
            rec.set(schema::CV, "consonant");
            rec.set(schema::VOICING, row.voicing);
            rec.set(schema::PLACE, row.place);
            rec.set(schema::MANNER, row.manner);
            candidates.extend(row.inherent);
        } else if let Some(row) = chart.vowel(c) {
            is_vowel = true;
            rec.set(schema::CV, "vowel");
            rec.set(schema::VOICING, "voiced");
            rec.set(schema::FRONTNESS, row.frontness);
            rec.set(schema::OPENNESS, row.openness);
            rec.set(schema::ROUNDEDNESS, row.roundedness);
            candidates.extend(row.inherent);
        } else if let Some(bare) = overrides.and_then(|o| o.get(base)) {
            rec = bare.clone();
            is_vowel = rec.get(schema::CV) == Some("vowel");
            candidates.extend(bare.get(schema::DIACRITIC));
            rec.clear(schema::DIACRITIC);
        } else {
            return Err(unanalyzable());
        }
    }
    candidates.extend(segment.diacritics.iter().map(String::as_str));

    if let Some(d) = select_diacritic(&candidates, schema)? {
        rec.set(schema::DIACRITIC, d);
    }
    if is_vowel {
        apply_stress(&mut rec, segment.stressed);
    }
    Ok(rec)
}

fn apply_stress(rec: &mut Categorical, stressed: bool) {
    if rec.get(schema::CV) == Some("vowel") && rec.get(schema::STRESS).is_none() {
        rec.set(
            schema::STRESS,
            if stressed { "stressed" } else { "unstressed" },
        );
    }
}

/// Picks one diacritic from a stack by [`DIACRITIC_PRIORITY`], then schema
/// order. Extra diacritics are dropped with a warning.
fn select_diacritic<'a>(candidates: &[&'a str], schema: &FeatureSchema) -> Result<Option<&'a str>> {
    if candidates.is_empty() {
        return Ok(None);
    }
    let feature = schema
        .feature(schema::DIACRITIC)
        .ok_or_else(|| Error::UnknownFeature(schema::DIACRITIC.into()))?;
    let mut ranked = Vec::with_capacity(candidates.len());
    for &name in candidates {
        let idx = feature
            .value_index(name)
            .ok_or_else(|| Error::UnknownDiacritic(name.to_string()))?;
        let rank = DIACRITIC_PRIORITY
            .iter()
            .position(|p| *p == name)
            .unwrap_or(DIACRITIC_PRIORITY.len());
        ranked.push((rank, idx, name));
    }
    ranked.sort();
    ranked.dedup();
    if ranked.len() > 1 {
        log::warn!(
            "stacked diacritics {:?}: keeping `{}`",
            candidates,
            ranked[0].2
        );
    }
    Ok(Some(ranked[0].2))
}

/// Schema, chart, overrides and boundary tokens bundled together; the usual
/// entry point for turning IPA text into feature vectors.
#[derive(Debug, Clone)]
pub struct Analyzer {
    schema: FeatureSchema,
    chart: IpaChart,
    overrides: Overrides,
    boundaries: BoundaryTokens,
}

impl Default for Analyzer {
    fn default() -> Self {
        Analyzer::new(FeatureSchema::default())
    }
}

impl Analyzer {
    pub fn new(schema: FeatureSchema) -> Self {
        Analyzer {
            schema,
            chart: IpaChart::default(),
            overrides: Overrides::default(),
            boundaries: BoundaryTokens::default(),
        }
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn with_boundaries(mut self, boundaries: BoundaryTokens) -> Self {
        self.boundaries = boundaries;
        self
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn chart(&self) -> &IpaChart {
        &self.chart
    }

    pub fn overrides(&self) -> &Overrides {
        &self.overrides
    }

    pub fn tokenizer(&self) -> Tokenizer<'_> {
        self.overrides
            .extra_bases(&self.chart)
            .fold(
                Tokenizer::new(&self.chart).with_boundaries(self.boundaries.clone()),
                |t, (c, vowel)| t.with_extra_base(c, vowel),
            )
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<Segment>> {
        self.tokenizer().tokenize(text)
    }

    pub fn analyze(&self, segment: &Segment) -> Result<PfVector> {
        analyze(segment, &self.schema, &self.chart, Some(&self.overrides))
    }

    pub fn encode(&self, segments: &[Segment]) -> Result<Vec<BitVector>> {
        segments
            .iter()
            .map(|s| self.analyze(s).map(|v| v.bits))
            .collect()
    }

    /// Categorical distance: the number of features, other than
    /// `symbol_type`, on which the two segments disagree. NULL against a
    /// value counts as a disagreement.
    pub fn pf_distance(&self, a: &Segment, b: &Segment) -> Result<usize> {
        let a = self.analyze(a)?.categorical;
        let b = self.analyze(b)?.categorical;
        Ok(self
            .schema
            .features()
            .iter()
            .filter(|f| f.name != schema::SYMBOL_TYPE)
            .filter(|f| a.get(&f.name) != b.get(&f.name))
            .count())
    }
}
