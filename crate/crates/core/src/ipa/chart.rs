//! Embedded IPA chart: pulmonic consonants, vowels, affricate ligatures and
//! diacritic marks.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsonantRow {
    pub voicing: &'static str,
    pub place: &'static str,
    pub manner: &'static str,
    /// Secondary articulation that is part of the symbol itself, e.g. the
    /// labialization of [w].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inherent: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VowelRow {
    pub frontness: &'static str,
    pub openness: &'static str,
    pub roundedness: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inherent: Option<&'static str>,
}

type C = (char, &'static str, &'static str, &'static str, Option<&'static str>);
type V = (char, &'static str, &'static str, &'static str, Option<&'static str>);

#[rustfmt::skip]
const CONSONANTS: &[C] = &[
    // plosives
    ('p', "unvoiced", "bilabial", "plosive", None),
    ('b', "voiced", "bilabial", "plosive", None),
    ('t', "unvoiced", "alveolar", "plosive", None),
    ('d', "voiced", "alveolar", "plosive", None),
    ('ʈ', "unvoiced", "retroflex", "plosive", None),
    ('ɖ', "voiced", "retroflex", "plosive", None),
    ('c', "unvoiced", "palatal", "plosive", None),
    ('ɟ', "voiced", "palatal", "plosive", None),
    ('k', "unvoiced", "velar", "plosive", None),
    ('ɡ', "voiced", "velar", "plosive", None),
    ('g', "voiced", "velar", "plosive", None),
    ('q', "unvoiced", "uvular", "plosive", None),
    ('ɢ', "voiced", "uvular", "plosive", None),
    ('ʡ', "unvoiced", "pharyngeal", "plosive", None),
    ('ʔ', "unvoiced", "glottal", "plosive", None),
    // nasals
    ('m', "voiced", "bilabial", "nasal", None),
    ('ɱ', "voiced", "labiodental", "nasal", None),
    ('n', "voiced", "alveolar", "nasal", None),
    ('ɳ', "voiced", "retroflex", "nasal", None),
    ('ɲ', "voiced", "palatal", "nasal", None),
    ('ŋ', "voiced", "velar", "nasal", None),
    ('ɴ', "voiced", "uvular", "nasal", None),
    // trills
    ('ʙ', "voiced", "bilabial", "trill", None),
    ('r', "voiced", "alveolar", "trill", None),
    ('ʀ', "voiced", "uvular", "trill", None),
    // taps and flaps
    ('ⱱ', "voiced", "labiodental", "tap_flap", None),
    ('ɾ', "voiced", "alveolar", "tap_flap", None),
    ('ɽ', "voiced", "retroflex", "tap_flap", None),
    // fricatives
    ('ɸ', "unvoiced", "bilabial", "fricative", None),
    ('β', "voiced", "bilabial", "fricative", None),
    ('f', "unvoiced", "labiodental", "fricative", None),
    ('v', "voiced", "labiodental", "fricative", None),
    ('θ', "unvoiced", "dental", "fricative", None),
    ('ð', "voiced", "dental", "fricative", None),
    ('s', "unvoiced", "alveolar", "fricative", None),
    ('z', "voiced", "alveolar", "fricative", None),
    ('ʃ', "unvoiced", "postalveolar", "fricative", None),
    ('ʒ', "voiced", "postalveolar", "fricative", None),
    ('ʂ', "unvoiced", "retroflex", "fricative", None),
    ('ʐ', "voiced", "retroflex", "fricative", None),
    ('ç', "unvoiced", "palatal", "fricative", None),
    ('ʝ', "voiced", "palatal", "fricative", None),
    ('x', "unvoiced", "velar", "fricative", None),
    ('ɣ', "voiced", "velar", "fricative", None),
    ('χ', "unvoiced", "uvular", "fricative", None),
    ('ʁ', "voiced", "uvular", "fricative", None),
    ('ħ', "unvoiced", "pharyngeal", "fricative", None),
    ('ʕ', "voiced", "pharyngeal", "fricative", None),
    ('h', "unvoiced", "glottal", "fricative", None),
    ('ɦ', "voiced", "glottal", "fricative", None),
    ('ɕ', "unvoiced", "postalveolar", "fricative", Some("palatalized")),
    ('ʑ', "voiced", "postalveolar", "fricative", Some("palatalized")),
    // lateral fricatives
    ('ɬ', "unvoiced", "alveolar", "lateral_fricative", None),
    ('ɮ', "voiced", "alveolar", "lateral_fricative", None),
    // approximants
    ('ʋ', "voiced", "labiodental", "approximant", None),
    ('ɹ', "voiced", "alveolar", "approximant", None),
    ('ɻ', "voiced", "retroflex", "approximant", None),
    ('j', "voiced", "palatal", "approximant", None),
    ('ɰ', "voiced", "velar", "approximant", None),
    ('w', "voiced", "velar", "approximant", Some("labialized")),
    ('ʍ', "unvoiced", "velar", "approximant", Some("labialized")),
    ('ɥ', "voiced", "palatal", "approximant", Some("labialized")),
    // lateral approximants
    ('l', "voiced", "alveolar", "lateral_approximant", None),
    ('ɭ', "voiced", "retroflex", "lateral_approximant", None),
    ('ʎ', "voiced", "palatal", "lateral_approximant", None),
    ('ʟ', "voiced", "velar", "lateral_approximant", None),
    ('ɫ', "voiced", "alveolar", "lateral_approximant", Some("velarized")),
    // affricate ligatures
    ('ʦ', "unvoiced", "alveolar", "affricate", None),
    ('ʣ', "voiced", "alveolar", "affricate", None),
    ('ʧ', "unvoiced", "postalveolar", "affricate", None),
    ('ʤ', "voiced", "postalveolar", "affricate", None),
    ('ʨ', "unvoiced", "postalveolar", "affricate", Some("palatalized")),
    ('ʥ', "voiced", "postalveolar", "affricate", Some("palatalized")),
];

const LIGATURES: &[(char, char, char)] = &[
    ('ʦ', 't', 's'),
    ('ʣ', 'd', 'z'),
    ('ʧ', 't', 'ʃ'),
    ('ʤ', 'd', 'ʒ'),
    ('ʨ', 't', 'ɕ'),
    ('ʥ', 'd', 'ʑ'),
];

#[rustfmt::skip]
const VOWELS: &[V] = &[
    ('i', "front", "close", "unrounded", None),
    ('y', "front", "close", "rounded", None),
    ('ɨ', "central", "close", "unrounded", None),
    ('ʉ', "central", "close", "rounded", None),
    ('ɯ', "back", "close", "unrounded", None),
    ('u', "back", "close", "rounded", None),
    ('ɪ', "near_front", "near_close", "unrounded", None),
    ('ʏ', "near_front", "near_close", "rounded", None),
    ('ʊ', "near_back", "near_close", "rounded", None),
    ('e', "front", "close_mid", "unrounded", None),
    ('ø', "front", "close_mid", "rounded", None),
    ('ɘ', "central", "close_mid", "unrounded", None),
    ('ɵ', "central", "close_mid", "rounded", None),
    ('ɤ', "back", "close_mid", "unrounded", None),
    ('o', "back", "close_mid", "rounded", None),
    ('ə', "central", "mid", "unrounded", None),
    ('ɛ', "front", "open_mid", "unrounded", None),
    ('œ', "front", "open_mid", "rounded", None),
    ('ɜ', "central", "open_mid", "unrounded", None),
    ('ɞ', "central", "open_mid", "rounded", None),
    ('ʌ', "back", "open_mid", "unrounded", None),
    ('ɔ', "back", "open_mid", "rounded", None),
    ('æ', "front", "near_open", "unrounded", None),
    ('ɐ', "central", "near_open", "unrounded", None),
    ('a', "front", "open", "unrounded", None),
    ('ɶ', "front", "open", "rounded", None),
    ('ɑ', "back", "open", "unrounded", None),
    ('ɒ', "back", "open", "rounded", None),
    ('ɚ', "central", "mid", "unrounded", Some("rhotic")),
    ('ɝ', "central", "open_mid", "unrounded", Some("rhotic")),
];

/// Combining and modifier marks. The first mark listed for a name is the
/// one used when rendering.
pub(crate) const DIACRITIC_MARKS: &[(char, &str)] = &[
    ('\u{0303}', "nasalized"),
    ('\u{02E0}', "velarized"),
    ('\u{0334}', "velarized"),
    ('\u{02B7}', "labialized"),
    ('\u{02B2}', "palatalized"),
    ('\u{02E4}', "pharyngealized"),
    ('\u{02B0}', "aspirated"),
    ('\u{031A}', "unreleased"),
    ('\u{0324}', "breathy_voiced"),
    ('\u{02B1}', "breathy_voiced"),
    ('\u{0330}', "creaky_voiced"),
    ('\u{032A}', "dental_mod"),
    ('\u{033A}', "apical"),
    ('\u{033B}', "laminal"),
    ('\u{031F}', "advanced"),
    ('\u{0320}', "retracted"),
    ('\u{02DE}', "rhotic"),
    ('\u{0329}', "syllabic"),
    ('\u{030D}', "syllabic"),
];

pub(crate) fn mark_for(name: &str) -> Option<char> {
    DIACRITIC_MARKS.iter().find(|(_, n)| *n == name).map(|(c, _)| *c)
}

#[derive(Debug, Clone, Serialize)]
pub struct IpaChart {
    consonants: BTreeMap<char, ConsonantRow>,
    vowels: BTreeMap<char, VowelRow>,
    diacritic_marks: BTreeMap<char, &'static str>,
    #[serde(skip)]
    ligatures: BTreeMap<char, (char, char)>,
}

impl Default for IpaChart {
    fn default() -> Self {
        let consonants = CONSONANTS
            .iter()
            .map(|&(c, voicing, place, manner, inherent)| {
                (c, ConsonantRow { voicing, place, manner, inherent })
            })
            .collect();
        let vowels = VOWELS
            .iter()
            .map(|&(c, frontness, openness, roundedness, inherent)| {
                (c, VowelRow { frontness, openness, roundedness, inherent })
            })
            .collect();
        IpaChart {
            consonants,
            vowels,
            diacritic_marks: DIACRITIC_MARKS.iter().copied().collect(),
            ligatures: LIGATURES.iter().map(|&(l, a, b)| (l, (a, b))).collect(),
        }
    }
}

impl IpaChart {
    pub fn consonant(&self, c: char) -> Option<&ConsonantRow> {
        self.consonants.get(&c)
    }

    pub fn vowel(&self, c: char) -> Option<&VowelRow> {
        self.vowels.get(&c)
    }

    pub fn is_vowel(&self, c: char) -> bool {
        self.vowels.contains_key(&c)
    }

    pub fn is_consonant(&self, c: char) -> bool {
        self.consonants.contains_key(&c)
    }

    pub fn is_base(&self, c: char) -> bool {
        self.is_vowel(c) || self.is_consonant(c)
    }

    pub fn diacritic(&self, mark: char) -> Option<&'static str> {
        self.diacritic_marks.get(&mark).copied()
    }

    /// Component bases of an affricate ligature such as ʧ.
    pub fn ligature(&self, c: char) -> Option<(char, char)> {
        self.ligatures.get(&c).copied()
    }

    /// Every base symbol, consonants first, each in codepoint order.
    pub fn bases(&self) -> impl Iterator<Item = char> + '_ {
        self.consonants.keys().chain(self.vowels.keys()).copied()
    }

    pub fn len(&self) -> usize {
        self.consonants.len() + self.vowels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Audit export of the chart tables.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chart serializes")
    }
}
