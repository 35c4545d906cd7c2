//! Out-of-sample (OOS) phonemes and the three ways of handling them.
//!
//! - **AUTO**: the phoneme's features come straight from the IPA; nothing
//!   changes downstream.
//! - **MANUAL**: each OOS phoneme is replaced by an inventory member, either
//!   an expert override or the nearest member by categorical feature distance.
//! - **RANDOM**: each OOS phoneme gets a new, untrained embedding row drawn
//!   from a seeded generator.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ipa::{Analyzer, Segment};
use crate::schema::{self, BitVector};

/// Half-width of the uniform range for RANDOM embedding rows.
pub const RANDOM_INIT_RANGE: f64 = 0.1;

/// A set of phonemes observed in some corpus or required by a language.
///
/// Members are keyed by base and diacritics. Length is never part of the
/// key; stress is part of it only when `count_stress_variants` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeInventory {
    pub name: String,
    pub source: String,
    count_stress_variants: bool,
    members: BTreeSet<Segment>,
}

impl PhonemeInventory {
    pub fn new(name: &str, count_stress_variants: bool) -> Self {
        PhonemeInventory {
            name: name.to_string(),
            source: String::new(),
            count_stress_variants,
            members: BTreeSet::new(),
        }
    }

    pub fn from_segments<'a>(
        name: &str,
        count_stress_variants: bool,
        segments: impl IntoIterator<Item = &'a Segment>,
    ) -> Self {
        let mut inv = Self::new(name, count_stress_variants);
        for seg in segments {
            inv.insert(seg);
        }
        inv
    }

    /// Collects the phonemes of IPA text. Non-phoneme segments are ignored.
    pub fn parse(text: &str, name: &str, count_stress_variants: bool, analyzer: &Analyzer) -> Result<Self> {
        let mut inv = Self::new(name, count_stress_variants);
        for line in text.lines().filter(|l| !l.starts_with("//")) {
            for seg in analyzer.tokenize(line)? {
                inv.insert(&seg);
            }
        }
        Ok(inv)
    }

    pub fn load(path: &Path, count_stress_variants: bool, analyzer: &Analyzer) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut inv = Self::parse(&text, &name, count_stress_variants, analyzer)?;
        inv.source = path.display().to_string();
        Ok(inv)
    }

    pub fn counts_stress_variants(&self) -> bool {
        self.count_stress_variants
    }

    pub fn key(&self, segment: &Segment) -> Segment {
        segment.identity(self.count_stress_variants)
    }

    /// Adds a phoneme; returns false for duplicates and non-phonemes.
    pub fn insert(&mut self, segment: &Segment) -> bool {
        segment.is_phoneme() && self.members.insert(self.key(segment))
    }

    pub fn contains(&self, segment: &Segment) -> bool {
        self.members.contains(&self.key(segment))
    }

    pub fn members(&self) -> impl Iterator<Item = &Segment> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Phoneme segments missing from `inventory`, keyed as the inventory keys
/// them, in order of first occurrence.
pub fn detect_oos(segments: &[Segment], inventory: &PhonemeInventory) -> Vec<Segment> {
    let mut seen = HashSet::new();
    segments
        .iter()
        .filter(|s| s.is_phoneme() && !inventory.contains(s))
        .map(|s| inventory.key(s))
        .filter(|k| seen.insert(k.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighbor {
    pub segment: Segment,
    pub distance: usize,
}

/// Inventory members ranked by categorical distance to `oos`.
///
/// Ties are broken by agreement in manner, then place, then voicing, then by
/// ascending codepoint of the base, so the ranking does not depend on the
/// order of the inventory.
pub fn suggest_nearest(
    oos: &Segment,
    inventory: &PhonemeInventory,
    k: usize,
    analyzer: &Analyzer,
) -> Result<Vec<Neighbor>> {
    if inventory.is_empty() {
        return Err(Error::EmptyInventory);
    }
    let query = analyzer.analyze(oos)?.categorical;
    let mut ranked = Vec::with_capacity(inventory.len());
    for member in inventory.members() {
        let cand = analyzer.analyze(member)?.categorical;
        let distance = analyzer.pf_distance(oos, member)?;
        let differs = |f: &str| query.get(f) != cand.get(f);
        let key = (
            distance,
            differs(schema::MANNER),
            differs(schema::PLACE),
            differs(schema::VOICING),
            member.base_char(),
            member.clone(),
        );
        ranked.push(key);
    }
    ranked.sort();
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(distance, .., segment)| Neighbor { segment, distance })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Auto,
    Manual,
    Random,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Strategy::Auto),
            "manual" => Ok(Strategy::Manual),
            "random" => Ok(Strategy::Random),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Manual => "manual",
            Strategy::Random => "random",
        })
    }
}

/// Expert OOS to target mappings, from `oos_ipa<TAB>target_ipa` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManualOverrides(BTreeMap<Segment, Segment>);

impl ManualOverrides {
    pub fn parse(text: &str, origin: &str, analyzer: &Analyzer) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with("//") {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                message,
            };
            let (from, to) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `oos<TAB>target`".into()))?;
            let single = |ipa: &str| -> Result<Segment> {
                let segs = analyzer.tokenize(ipa).map_err(|e| err(e.to_string()))?;
                match segs.as_slice() {
                    [s] if s.is_phoneme() => Ok(s.identity(false)),
                    _ => Err(err(format!("`{ipa}` is not a single phoneme"))),
                }
            };
            map.insert(single(from.trim())?, single(to.trim())?);
        }
        Ok(ManualOverrides(map))
    }

    pub fn load(path: &Path, analyzer: &Analyzer) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string(), analyzer)
    }

    pub fn insert(&mut self, oos: Segment, target: Segment) {
        self.0.insert(oos.identity(false), target.identity(false));
    }

    pub fn get(&self, oos: &Segment) -> Option<&Segment> {
        self.0.get(&oos.identity(false))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub oos: Segment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Segment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overridden: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector_id: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroShotPlan {
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub resolutions: Vec<Resolution>,
    #[serde(skip)]
    keep_stress: bool,
}

/// One input position after a plan is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum InputRow {
    Features(BitVector),
    /// Row of the embedding table reserved for an untrained vector.
    Embedding(usize),
}

impl ZeroShotPlan {
    pub fn resolution(&self, segment: &Segment) -> Option<&Resolution> {
        let key = segment.identity(self.keep_stress);
        self.resolutions.iter().find(|r| r.oos == key)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// Applies the plan to a segment sequence.
    pub fn encode(&self, segments: &[Segment], analyzer: &Analyzer) -> Result<Vec<InputRow>> {
        segments
            .iter()
            .map(|seg| {
                let res = seg.is_phoneme().then(|| self.resolution(seg)).flatten();
                match res {
                    Some(Resolution { vector_id: Some(id), .. }) => Ok(InputRow::Embedding(*id)),
                    Some(Resolution { target: Some(t), .. }) => {
                        let mut t = t.clone();
                        t.stressed = seg.stressed;
                        let v = analyzer.analyze(&t)?;
                        Ok(InputRow::Features(v.bits))
                    }
                    _ => Ok(InputRow::Features(analyzer.analyze(seg)?.bits)),
                }
            })
            .collect()
    }
}

/// Embedding row for a RANDOM resolution: `dim` values uniform in
/// [-0.1, 0.1] from ChaCha8 seeded with `seed`, on stream `vector_id`.
pub fn random_vector(seed: u64, vector_id: usize, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(vector_id as u64);
    (0..dim)
        .map(|_| rng.random_range(-RANDOM_INIT_RANGE..=RANDOM_INIT_RANGE))
        .collect()
}

pub fn build_plan(
    strategy: Strategy,
    oos: &[Segment],
    inventory: &PhonemeInventory,
    overrides: Option<&ManualOverrides>,
    seed: Option<u64>,
    analyzer: &Analyzer,
) -> Result<ZeroShotPlan> {
    let keep_stress = inventory.counts_stress_variants();
    let mut seen = HashSet::new();
    let oos: Vec<Segment> = oos
        .iter()
        .map(|s| s.identity(keep_stress))
        .filter(|s| seen.insert(s.clone()))
        .collect();
    let resolutions = match strategy {
        Strategy::Auto => Vec::new(),
        Strategy::Manual => {
            if inventory.is_empty() {
                return Err(Error::EmptyInventory);
            }
            let mut out = Vec::with_capacity(oos.len());
            for seg in oos {
                let (target, overridden) = match overrides.and_then(|o| o.get(&seg)) {
                    Some(t) => {
                        if !inventory.contains(t) {
                            return Err(Error::UnknownOverrideTarget(t.to_string()));
                        }
                        (t.clone(), true)
                    }
                    None => {
                        let best = suggest_nearest(&seg, inventory, 1, analyzer)?
                            .into_iter()
                            .next()
                            .expect("inventory is non-empty");
                        (best.segment, false)
                    }
                };
                let distance = analyzer.pf_distance(&seg, &target)?;
                out.push(Resolution {
                    oos: seg,
                    target: Some(target),
                    distance: Some(distance),
                    overridden: Some(overridden),
                    vector_id: None,
                });
            }
            out
        }
        Strategy::Random => {
            seed.ok_or(Error::MissingSeed)?;
            oos.into_iter()
                .enumerate()
                .map(|(i, seg)| Resolution {
                    oos: seg,
                    target: None,
                    distance: None,
                    overridden: None,
                    vector_id: Some(inventory.len() + i),
                })
                .collect()
        }
    };
    Ok(ZeroShotPlan {
        strategy,
        seed: if strategy == Strategy::Random { seed } else { None },
        resolutions,
        keep_stress,
    })
}
