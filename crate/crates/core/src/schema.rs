//! Phonological feature schema and the one-hot binarization contract.
//!
//! A [`FeatureSchema`] is an ordered list of categorical features. Each
//! feature owns a contiguous block of bits, one bit per value, laid out in
//! declaration order. A NULL feature (not applicable to the segment) is
//! encoded as an all-zeros block, so a block never has more than one bit set.
//!
//! The default schema has 10 features and 60 bits:
//!
//! | feature      | values |
//! |--------------|-------:|
//! | symbol_type  | 4      |
//! | cv           | 2      |
//! | voicing      | 2      |
//! | frontness    | 5      |
//! | openness     | 7      |
//! | roundedness  | 2      |
//! | stress       | 2      |
//! | place        | 11     |
//! | manner       | 9      |
//! | diacritic    | 16     |

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SYMBOL_TYPE: &str = "symbol_type";
pub const CV: &str = "cv";
pub const VOICING: &str = "voicing";
pub const FRONTNESS: &str = "frontness";
pub const OPENNESS: &str = "openness";
pub const ROUNDEDNESS: &str = "roundedness";
pub const STRESS: &str = "stress";
pub const PLACE: &str = "place";
pub const MANNER: &str = "manner";
pub const DIACRITIC: &str = "diacritic";

const DEFAULT_SCHEMA_JSON: &str = include_str!("../data/default_schema.json");

/// One categorical feature and the location of its bit block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureDef {
    pub name: String,
    pub values: Vec<String>,
    pub bit_offset: usize,
    pub nullable: bool,
}

impl FeatureDef {
    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn bit_range(&self) -> std::ops::Range<usize> {
        self.bit_offset..self.bit_offset + self.values.len()
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureSchema {
    features: Vec<FeatureDef>,
    total_bits: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    features: Vec<FeatureEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureEntry {
    name: String,
    values: Vec<String>,
    #[serde(default = "default_nullable")]
    nullable: bool,
    // Accepted only so that audited exports can be re-read; must agree with
    // the computed layout.
    #[serde(default)]
    bit_offset: Option<usize>,
}

fn default_nullable() -> bool {
    true
}

impl FeatureSchema {
    /// Builds a schema from `(name, values, nullable)` triples, computing the
    /// bit layout from declaration order.
    pub fn new<I, S>(features: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>, bool)>,
        S: Into<String>,
    {
        let entries = features
            .into_iter()
            .map(|(name, values, nullable)| FeatureEntry {
                name: name.into(),
                values: values.into_iter().map(Into::into).collect(),
                nullable,
                bit_offset: None,
            })
            .collect();
        Self::from_entries(entries)
    }

    fn from_entries(entries: Vec<FeatureEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySchema);
        }
        let mut names = HashSet::new();
        let mut features = Vec::with_capacity(entries.len());
        let mut offset = 0;
        for entry in entries {
            if !names.insert(entry.name.clone()) {
                return Err(Error::DuplicateFeature(entry.name));
            }
            if entry.values.is_empty() {
                return Err(Error::EmptyValues(entry.name));
            }
            let mut seen = HashSet::new();
            for value in &entry.values {
                if !seen.insert(value.as_str()) {
                    return Err(Error::DuplicateValue {
                        feature: entry.name.clone(),
                        value: value.clone(),
                    });
                }
            }
            if let Some(declared) = entry.bit_offset {
                if declared != offset {
                    return Err(Error::NonContiguousLayout {
                        feature: entry.name,
                        declared,
                        expected: offset,
                    });
                }
            }
            let width = entry.values.len();
            features.push(FeatureDef {
                name: entry.name,
                values: entry.values,
                bit_offset: offset,
                nullable: entry.nullable,
            });
            offset += width;
        }
        Ok(FeatureSchema {
            features,
            total_bits: offset,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemaFile = serde_json::from_str(text)?;
        Self::from_entries(file.features)
    }

    /// Serializes to the schema file format, including the computed offsets.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({ "features": self.features }))
            .expect("schema serializes")
    }

    pub fn features(&self) -> &[FeatureDef] {
        &self.features
    }

    pub fn total_bits(&self) -> usize {
        self.total_bits
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureDef> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Column labels for the binarized vector, `feature=value`.
    pub fn bit_labels(&self) -> Vec<String> {
        self.features
            .iter()
            .flat_map(|f| f.values.iter().map(move |v| format!("{}={}", f.name, v)))
            .collect()
    }

    pub fn binarize(&self, categorical: &Categorical) -> Result<BitVector> {
        for name in categorical.0.keys() {
            if self.feature(name).is_none() {
                return Err(Error::UnknownFeature(name.clone()));
            }
        }
        let mut bits = vec![false; self.total_bits];
        for feature in &self.features {
            match categorical.get(&feature.name) {
                Some(value) => {
                    let idx = feature
                        .value_index(value)
                        .ok_or_else(|| Error::UnknownValue {
                            feature: feature.name.clone(),
                            value: value.to_string(),
                        })?;
                    bits[feature.bit_offset + idx] = true;
                }
                None if !feature.nullable => {
                    return Err(Error::NullNotAllowed(feature.name.clone()))
                }
                None => {}
            }
        }
        Ok(BitVector(bits))
    }

    pub fn debinarize(&self, bits: &BitVector) -> Result<Categorical> {
        if bits.len() != self.total_bits {
            return Err(Error::LengthMismatch {
                expected: self.total_bits,
                actual: bits.len(),
            });
        }
        let mut out = Categorical::default();
        for feature in &self.features {
            let mut set = feature
                .bit_range()
                .filter(|&i| bits.get(i))
                .map(|i| i - feature.bit_offset);
            match (set.next(), set.next()) {
                (Some(idx), None) => {
                    out.set(&feature.name, &feature.values[idx]);
                }
                (Some(_), Some(_)) => {
                    return Err(Error::MalformedVector(format!(
                        "more than one bit set in the `{}` block",
                        feature.name
                    )))
                }
                (None, _) if !feature.nullable => {
                    return Err(Error::MalformedVector(format!(
                        "no bit set in the block of non-nullable feature `{}`",
                        feature.name
                    )))
                }
                (None, _) => {}
            }
        }
        Ok(out)
    }
}

impl Default for FeatureSchema {
    fn default() -> Self {
        Self::from_json(DEFAULT_SCHEMA_JSON).expect("built-in schema is valid")
    }
}

/// Loads a schema file, or the built-in default when `path` is `None`.
pub fn load_schema(path: Option<&Path>) -> Result<FeatureSchema> {
    match path {
        None => Ok(FeatureSchema::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            FeatureSchema::from_json(&text)
        }
    }
}

/// A categorical feature record: feature name to value name. Absent
/// features are NULL.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Categorical(BTreeMap<String, String>);

impl Categorical {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, feature: &str, value: &str) -> Self {
        self.set(feature, value);
        self
    }

    pub fn set(&mut self, feature: &str, value: &str) {
        self.0.insert(feature.to_string(), value.to_string());
    }

    pub fn clear(&mut self, feature: &str) {
        self.0.remove(feature);
    }

    pub fn get(&self, feature: &str) -> Option<&str> {
        self.0.get(feature).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `feature=value;feature=value`.
    pub fn parse(spec: &str) -> Option<Self> {
        let mut out = Self::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=')?;
            out.set(k.trim(), v.trim());
        }
        Some(out)
    }
}

impl fmt::Display for Categorical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in self.iter() {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Categorical {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        Categorical(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

/// Fixed-length binary feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitVector(Vec<bool>);

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector(vec![false; len])
    }

    pub fn from_ones(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.0[i] = true;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.0[i] = on;
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn hamming(&self, other: &BitVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl From<Vec<bool>> for BitVector {
    fn from(v: Vec<bool>) -> Self {
        BitVector(v)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A categorical record together with its binarization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PfVector {
    pub categorical: Categorical,
    pub bits: BitVector,
}

impl PfVector {
    pub fn new(categorical: Categorical, schema: &FeatureSchema) -> Result<Self> {
        let bits = schema.binarize(&categorical)?;
        Ok(PfVector { categorical, bits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Categorical {
        Categorical::new()
            .with(SYMBOL_TYPE, "phoneme")
            .with(CV, "consonant")
            .with(VOICING, "unvoiced")
            .with(PLACE, "bilabial")
            .with(MANNER, "plosive")
    }

    #[test]
    fn default_layout() {
        let schema = FeatureSchema::default();
        assert_eq!(schema.total_bits(), 60);
        let names: Vec<_> = schema.features().iter().map(|f| f.name.as_str()).collect();
        assert_eq!(
            names,
            [SYMBOL_TYPE, CV, VOICING, FRONTNESS, OPENNESS, ROUNDEDNESS, STRESS, PLACE, MANNER, DIACRITIC]
        );
        let widths: Vec<_> = schema.features().iter().map(FeatureDef::width).collect();
        assert_eq!(widths, [4, 2, 2, 5, 7, 2, 2, 11, 9, 16]);
        assert_eq!(widths.iter().sum::<usize>(), 60);
        let mut next = 0;
        for f in schema.features() {
            assert_eq!(f.bit_offset, next);
            next += f.width();
        }
        assert!(!schema.feature(SYMBOL_TYPE).unwrap().nullable);
    }

    #[test]
    fn minimal_schema() {
        let schema = FeatureSchema::from_json(r#"{"features":[{"name":"x","values":["a","b"]}]}"#).unwrap();
        assert_eq!(schema.total_bits(), 2);
        assert!(schema.feature("x").unwrap().nullable);
    }

    #[test]
    fn invalid_schemas() {
        let dup = r#"{"features":[{"name":"x","values":["a"]},{"name":"x","values":["b"]}]}"#;
        assert!(matches!(FeatureSchema::from_json(dup), Err(Error::DuplicateFeature(_))));
        let dup_val = r#"{"features":[{"name":"x","values":["a","a"]}]}"#;
        assert!(matches!(FeatureSchema::from_json(dup_val), Err(Error::DuplicateValue { .. })));
        let empty = r#"{"features":[{"name":"x","values":[]}]}"#;
        assert!(matches!(FeatureSchema::from_json(empty), Err(Error::EmptyValues(_))));
        let gap = r#"{"features":[{"name":"x","values":["a"],"bit_offset":0},{"name":"y","values":["b"],"bit_offset":3}]}"#;
        assert!(matches!(
            FeatureSchema::from_json(gap),
            Err(Error::NonContiguousLayout { declared: 3, expected: 1, .. })
        ));
        assert!(matches!(FeatureSchema::from_json(r#"{"features":[]}"#), Err(Error::EmptySchema)));
    }

    #[test]
    fn exported_json_reloads() {
        let schema = FeatureSchema::default();
        assert_eq!(FeatureSchema::from_json(&schema.to_json()).unwrap(), schema);
    }

    #[test]
    fn binarize_counts() {
        let schema = FeatureSchema::default();
        assert_eq!(schema.binarize(&p()).unwrap().count_ones(), 5);

        let wb = Categorical::new().with(SYMBOL_TYPE, "word_boundary");
        assert_eq!(schema.binarize(&wb).unwrap().count_ones(), 1);

        let a = Categorical::new()
            .with(SYMBOL_TYPE, "phoneme")
            .with(CV, "vowel")
            .with(VOICING, "voiced")
            .with(FRONTNESS, "front")
            .with(OPENNESS, "open")
            .with(ROUNDEDNESS, "unrounded")
            .with(STRESS, "unstressed");
        assert_eq!(schema.binarize(&a).unwrap().count_ones(), 7);
    }

    #[test]
    fn binarize_errors() {
        let schema = FeatureSchema::default();
        assert!(matches!(
            schema.binarize(&p().with("height", "tall")),
            Err(Error::UnknownFeature(_))
        ));
        assert!(matches!(
            schema.binarize(&p().with(PLACE, "lunar")),
            Err(Error::UnknownValue { .. })
        ));
        assert!(matches!(
            schema.binarize(&Categorical::new().with(CV, "vowel")),
            Err(Error::NullNotAllowed(_))
        ));
    }

    #[test]
    fn debinarize_cases() {
        let schema = FeatureSchema::default();
        let bits = schema.binarize(&p()).unwrap();
        assert_eq!(schema.debinarize(&bits).unwrap(), p());

        // symbol_type is not nullable, so all-zeros is malformed here...
        assert!(matches!(
            schema.debinarize(&BitVector::zeros(60)),
            Err(Error::MalformedVector(_))
        ));
        // ...but legal in an all-nullable schema.
        let loose = FeatureSchema::new([("x", vec!["a", "b"], true), ("y", vec!["c"], true)]).unwrap();
        assert!(loose.debinarize(&BitVector::zeros(3)).unwrap().is_empty());

        let place = schema.feature(PLACE).unwrap().bit_offset;
        let mut two = bits.clone();
        two.set(place + 5, true);
        assert!(matches!(schema.debinarize(&two), Err(Error::MalformedVector(_))));

        assert!(matches!(
            schema.debinarize(&BitVector::zeros(59)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn categorical_parse_display() {
        let c = Categorical::parse("cv=vowel; stress=stressed").unwrap();
        assert_eq!(c.get(CV), Some("vowel"));
        assert_eq!(c.to_string(), "cv=vowel;stress=stressed");
        assert!(Categorical::parse("nonsense").is_none());
    }
}
