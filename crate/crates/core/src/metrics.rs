//! Unseen Phoneme Rate (UPR) and inventory statistics.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ipa::Segment;
use crate::zeroshot::{detect_oos, PhonemeInventory};

/// Whether OOS phonemes are counted per occurrence or per distinct phoneme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OosCounting {
    #[default]
    Tokens,
    Types,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtteranceStats {
    pub word_count: usize,
    pub phoneme_count: usize,
    pub oos_count: usize,
    pub upr_percent: f64,
}

/// UPR of one utterance: OOS phonemes over all phonemes, in percent.
/// Boundaries and silences count toward neither.
pub fn upr(segments: &[Segment], inventory: &PhonemeInventory, counting: OosCounting) -> Result<UtteranceStats> {
    let phonemes: Vec<&Segment> = segments.iter().filter(|s| s.is_phoneme()).collect();
    if phonemes.is_empty() {
        return Err(Error::NoPhonemes);
    }
    let (phoneme_count, oos_count) = match counting {
        OosCounting::Tokens => (
            phonemes.len(),
            phonemes.iter().filter(|s| !inventory.contains(s)).count(),
        ),
        OosCounting::Types => {
            let types: BTreeSet<Segment> = phonemes.iter().map(|s| inventory.key(s)).collect();
            (types.len(), detect_oos(segments, inventory).len())
        }
    };
    Ok(UtteranceStats {
        word_count: word_count(segments),
        phoneme_count,
        oos_count,
        upr_percent: 100.0 * oos_count as f64 / phoneme_count as f64,
    })
}

/// Maximal runs of phonemes between non-phoneme segments.
fn word_count(segments: &[Segment]) -> usize {
    let mut count = 0;
    let mut in_word = false;
    for s in segments {
        if s.is_phoneme() && !in_word {
            count += 1;
        }
        in_word = s.is_phoneme();
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InventoryStats {
    pub unique: usize,
    pub oos: usize,
}

/// Size of the corpus inventory and the number of target phonemes missing
/// from it. Target members are re-keyed with the corpus's stress policy.
pub fn inventory_stats(corpus: &PhonemeInventory, target: &PhonemeInventory) -> InventoryStats {
    let missing: BTreeSet<Segment> = target
        .members()
        .filter(|m| !corpus.contains(m))
        .map(|m| corpus.key(m))
        .collect();
    InventoryStats {
        unique: corpus.len(),
        oos: missing.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestSetStats {
    pub sentence_count: usize,
    pub min_length: usize,
    pub max_length: usize,
    pub upr_min: f64,
    pub upr_max: f64,
    /// Unweighted mean over sentences.
    pub upr_mean: f64,
}

impl TestSetStats {
    pub fn from_utterances(stats: &[UtteranceStats]) -> Result<Self> {
        let mut acc = TestSetAccumulator::default();
        for s in stats {
            acc.push(s);
        }
        acc.finish()
    }
}

/// Running test-set aggregate, for streaming over large files.
#[derive(Debug, Clone, Default)]
pub struct TestSetAccumulator {
    stats: Option<TestSetStats>,
    sum: f64,
}

impl TestSetAccumulator {
    pub fn push(&mut self, s: &UtteranceStats) {
        self.sum += s.upr_percent;
        match &mut self.stats {
            None => {
                self.stats = Some(TestSetStats {
                    sentence_count: 1,
                    min_length: s.word_count,
                    max_length: s.word_count,
                    upr_min: s.upr_percent,
                    upr_max: s.upr_percent,
                    upr_mean: 0.0,
                })
            }
            Some(t) => {
                t.sentence_count += 1;
                t.min_length = t.min_length.min(s.word_count);
                t.max_length = t.max_length.max(s.word_count);
                t.upr_min = t.upr_min.min(s.upr_percent);
                t.upr_max = t.upr_max.max(s.upr_percent);
            }
        }
    }

    pub fn count(&self) -> usize {
        self.stats.as_ref().map_or(0, |t| t.sentence_count)
    }

    pub fn finish(self) -> Result<TestSetStats> {
        let mut t = self.stats.ok_or(Error::NoUtterances)?;
        t.upr_mean = self.sum / t.sentence_count as f64;
        Ok(t)
    }
}

pub fn testset_stats<S: AsRef<[Segment]>>(
    utterances: &[S],
    inventory: &PhonemeInventory,
    counting: OosCounting,
) -> Result<TestSetStats> {
    let stats = utterances
        .iter()
        .map(|u| upr(u.as_ref(), inventory, counting))
        .collect::<Result<Vec<_>>>()?;
    TestSetStats::from_utterances(&stats)
}

/// Corpus / Phonemes / OOS table.
pub fn inventory_table(rows: &[(&str, InventoryStats)]) -> String {
    let width = rows.iter().map(|(n, _)| n.chars().count()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>4}", "Corpus", "Phonemes", "OOS");
    for (name, s) in rows {
        let _ = writeln!(out, "{:<width$}  {:>8}  {:>4}", name, s.unique, s.oos);
    }
    out
}

fn length_range(s: &TestSetStats) -> String {
    if s.min_length == s.max_length {
        s.min_length.to_string()
    } else {
        format!("{}-{}", s.min_length, s.max_length)
    }
}

/// Set / n sents / sent. len. / UPR% table, UPR shown as `min-max (μ=mean)`.
pub fn testset_table(rows: &[(&str, TestSetStats)]) -> String {
    let width = rows.iter().map(|(n, _)| n.chars().count()).max().unwrap_or(0).max(3);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>7}  {:>10}  {:<20}",
        "Set", "n sents", "sent. len.", "UPR%"
    );
    for (name, s) in rows {
        let upr = format!("{:.1}-{:.1} (μ={:.1})", s.upr_min, s.upr_max, s.upr_mean);
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>10}  {:<20}",
            name,
            s.sentence_count,
            length_range(s),
            upr
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipa::Analyzer;

    fn inv(ipa: &str) -> PhonemeInventory {
        PhonemeInventory::parse(ipa, "t", false, &Analyzer::default()).unwrap()
    }

    fn segs(ipa: &str) -> Vec<Segment> {
        Analyzer::default().tokenize(ipa).unwrap()
    }

    #[test]
    fn upr_cases() {
        let i = inv("p a t");
        let s = upr(&segs("pa # ta ."), &i, OosCounting::Tokens).unwrap();
        assert_eq!((s.word_count, s.phoneme_count, s.oos_count), (2, 4, 0));
        assert_eq!(s.upr_percent, 0.0);

        let s = upr(&segs("ça ç"), &i, OosCounting::Tokens).unwrap();
        assert_eq!(s.upr_percent, 100.0 * 2.0 / 3.0);
        let s = upr(&segs("ça ç"), &i, OosCounting::Types).unwrap();
        assert_eq!((s.phoneme_count, s.oos_count), (2, 1));

        let s = upr(&segs("çy"), &i, OosCounting::Tokens).unwrap();
        assert_eq!(s.upr_percent, 100.0);

        assert!(matches!(upr(&segs("# ."), &i, OosCounting::Tokens), Err(Error::NoPhonemes)));
    }

    #[test]
    fn inventory_counts() {
        let s = inventory_stats(&inv("p t k s m"), &inv("a i u"));
        assert_eq!(s, InventoryStats { unique: 5, oos: 3 });
        assert_eq!(inventory_stats(&inv("p t k"), &inv("p k")).oos, 0);
        // stressed and unstressed vowel collapse unless counted separately
        let counted = PhonemeInventory::parse("ˈa a", "c", true, &Analyzer::default()).unwrap();
        assert_eq!(inventory_stats(&counted, &inv("a")).unique, 2);
    }

    #[test]
    fn testset() {
        let i = inv("p a t");
        let single = testset_stats(&[segs("pat")], &i, OosCounting::Tokens).unwrap();
        assert_eq!((single.upr_min, single.upr_max, single.upr_mean), (0.0, 0.0, 0.0));

        // 0% and 4% (1 OOS in 25)
        let four = format!("ç{}", "pa".repeat(12));
        let s = testset_stats(&[segs("pat"), segs(&four)], &i, OosCounting::Tokens).unwrap();
        assert_eq!(s.upr_max, 4.0);
        assert_eq!(s.upr_mean, 2.0);
        assert_eq!(s.sentence_count, 2);

        let empty: [Vec<Segment>; 0] = [];
        assert!(matches!(testset_stats(&empty, &i, OosCounting::Tokens), Err(Error::NoUtterances)));
    }

    #[test]
    fn tables() {
        let t = inventory_table(&[("VCTK", InventoryStats { unique: 73, oos: 14 })]);
        assert!(t.contains("VCTK"));
        assert!(t.contains("73"));
        let s = TestSetStats {
            sentence_count: 30,
            min_length: 7,
            max_length: 7,
            upr_min: 0.0,
            upr_max: 5.6,
            upr_mean: 2.9,
        };
        let t = testset_table(&[("1", s)]);
        assert!(t.contains("0.0-5.6 (μ=2.9)"), "{t}");
    }
}
