//! Linear input layer over binary feature vectors.
//!
//! The layer stands where a phoneme embedding table would be: each input
//! row of `total_bits` binary features maps to an `embedding_dim` vector,
//! `weights · bits + bias`. Weights are either freshly initialized from a
//! seed or imported from a trained checkpoint exported as CSV.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ipa::{Analyzer, Segment};
use crate::schema::BitVector;
use crate::zeroshot::PhonemeInventory;

/// Default embedding size.
pub const DEFAULT_EMBEDDING_DIM: usize = 512;

/// How many sub-seeds `init_injective` tries before giving up.
const MAX_REDRAWS: u64 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionLayer {
    embedding_dim: usize,
    total_bits: usize,
    seed: u64,
    sub_seed: u64,
    /// Row-major, `embedding_dim` rows of `total_bits` columns.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

/// Parameters of the feature path: a full weight matrix plus bias.
pub fn pf_parameter_count(embedding_dim: usize, total_bits: usize) -> usize {
    embedding_dim * total_bits + embedding_dim
}

/// Parameters of a phoneme embedding table of `inventory_size` rows.
pub fn table_parameter_count(inventory_size: usize, embedding_dim: usize) -> usize {
    inventory_size * embedding_dim
}

/// Glorot-uniform initialization: weights uniform in
/// `[-sqrt(6/(bits+dim)), sqrt(6/(bits+dim))]`, zero bias.
pub fn init_projection(embedding_dim: usize, total_bits: usize, seed: u64) -> Result<ProjectionLayer> {
    ProjectionLayer::draw(embedding_dim, total_bits, seed, 0)
}

impl ProjectionLayer {
    pub fn init_bound(embedding_dim: usize, total_bits: usize) -> f64 {
        (6.0 / (total_bits + embedding_dim) as f64).sqrt()
    }

    fn draw(embedding_dim: usize, total_bits: usize, seed: u64, sub_seed: u64) -> Result<Self> {
        if embedding_dim == 0 || total_bits == 0 {
            return Err(Error::BadDimensions {
                dim: embedding_dim,
                total_bits,
            });
        }
        let bound = Self::init_bound(embedding_dim, total_bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sub_seed);
        let weights = (0..embedding_dim * total_bits)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Ok(ProjectionLayer {
            embedding_dim,
            total_bits,
            seed,
            sub_seed,
            weights,
            bias: vec![0.0; embedding_dim],
        })
    }

    /// Like [`init_projection`], but rejects draws under which two distinct
    /// vectors of `realized` project to the same point. Rejected draws are
    /// retried on the next ChaCha stream (sub-seed 1, 2, ...).
    pub fn init_injective(
        embedding_dim: usize,
        total_bits: usize,
        seed: u64,
        realized: &[BitVector],
    ) -> Result<Self> {
        let mut distinct = realized.to_vec();
        distinct.sort();
        distinct.dedup();
        for sub_seed in 0..MAX_REDRAWS {
            let layer = Self::draw(embedding_dim, total_bits, seed, sub_seed)?;
            let projected = distinct
                .iter()
                .map(|b| layer.project(b))
                .collect::<Result<Vec<_>>>()?;
            let collision = projected.iter().enumerate().any(|(i, a)| {
                projected[i + 1..].iter().any(|b| euclidean(a, b) == 0.0)
            });
            if !collision {
                return Ok(layer);
            }
            log::warn!("projection seed {seed}/{sub_seed} collapses distinct inputs; redrawing");
        }
        Err(Error::DegenerateProjection {
            seed,
            attempts: MAX_REDRAWS,
        })
    }

    /// Builds a layer from explicit row-major weights and bias.
    pub fn from_parts(embedding_dim: usize, total_bits: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if embedding_dim == 0 || total_bits == 0 {
            return Err(Error::BadDimensions {
                dim: embedding_dim,
                total_bits,
            });
        }
        if weights.len() != embedding_dim * total_bits {
            return Err(Error::LengthMismatch {
                expected: embedding_dim * total_bits,
                actual: weights.len(),
            });
        }
        if bias.len() != embedding_dim {
            return Err(Error::LengthMismatch {
                expected: embedding_dim,
                actual: bias.len(),
            });
        }
        Ok(ProjectionLayer {
            embedding_dim,
            total_bits,
            seed: 0,
            sub_seed: 0,
            weights,
            bias,
        })
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    pub fn total_bits(&self) -> usize {
        self.total_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sub_seed(&self) -> u64 {
        self.sub_seed
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.total_bits + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.embedding_dim).map(|r| self.weight(r, col)).collect()
    }

    pub fn parameter_count(&self) -> usize {
        pf_parameter_count(self.embedding_dim, self.total_bits)
    }

    pub fn project(&self, bits: &BitVector) -> Result<Vec<f64>> {
        if bits.len() != self.total_bits {
            return Err(Error::LengthMismatch {
                expected: self.total_bits,
                actual: bits.len(),
            });
        }
        Ok(self
            .weights
            .chunks_exact(self.total_bits)
            .zip(&self.bias)
            .map(|(row, b)| {
                row.iter()
                    .zip(bits.as_slice())
                    .filter(|(_, &on)| on)
                    .map(|(w, _)| w)
                    .sum::<f64>()
                    + b
            })
            .collect())
    }

    /// Writes `dim,total_bits`, the two sizes, `dim` weight rows and a bias
    /// row.
    pub fn write_weights<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["dim", "total_bits"])?;
        w.write_record([self.embedding_dim.to_string(), self.total_bits.to_string()])?;
        for row in self.weights.chunks_exact(self.total_bits) {
            w.write_record(row.iter().map(f64::to_string))?;
        }
        w.write_record(self.bias.iter().map(f64::to_string))?;
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Reads the format of [`write_weights`](Self::write_weights). A
    /// missing bias row means zero bias.
    pub fn read_weights<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let mut next = |what: &str| -> Result<Option<String>> {
            lines
                .next()
                .transpose()
                .map_err(|e| Error::io(format!("<weights: {what}>"), e))
        };
        let bad = |line: usize, message: String| Error::Parse {
            path: "<weights>".into(),
            line,
            message,
        };
        let header = next("header")?.unwrap_or_default();
        if header.trim() != "dim,total_bits" {
            return Err(bad(1, "expected header `dim,total_bits`".into()));
        }
        let sizes = next("sizes")?.unwrap_or_default();
        let (dim, bits) = sizes
            .trim()
            .split_once(',')
            .and_then(|(d, b)| Some((d.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| bad(2, format!("bad sizes `{sizes}`")))?;
        let parse_row = |line: &str, n: usize, line_no: usize| -> Result<Vec<f64>> {
            let row = line
                .trim()
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(line_no, e.to_string()))?;
            if row.len() != n {
                return Err(bad(line_no, format!("expected {n} values, got {}", row.len())));
            }
            Ok(row)
        };
        let mut weights = Vec::with_capacity(dim * bits);
        for r in 0..dim {
            let line = next("row")?.ok_or_else(|| bad(3 + r, "missing weight row".into()))?;
            weights.extend(parse_row(&line, bits, 3 + r)?);
        }
        let bias = match next("bias")? {
            Some(line) if !line.trim().is_empty() => parse_row(&line, dim, 3 + dim)?,
            _ => vec![0.0; dim],
        };
        Self::from_parts(dim, bits, weights, bias)
    }

    pub fn load_weights(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_weights(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    1.0 - dot / (na * nb)
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => euclidean(a, b),
            Metric::Cosine => cosine_distance(a, b),
        }
    }
}

/// Inventory members ranked by distance between projected embeddings;
/// ties go to the lower base codepoint.
pub fn nearest_in_embedding(
    layer: &ProjectionLayer,
    query: &Segment,
    inventory: &PhonemeInventory,
    k: usize,
    analyzer: &Analyzer,
    metric: Metric,
) -> Result<Vec<(Segment, f64)>> {
    if inventory.is_empty() {
        return Err(Error::EmptyInventory);
    }
    let q = layer.project(&analyzer.analyze(query)?.bits)?;
    let mut ranked = inventory
        .members()
        .map(|m| {
            let e = layer.project(&analyzer.analyze(m)?.bits)?;
            Ok((metric.distance(&q, &e), m.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|(da, a), (db, b)| {
        da.total_cmp(db)
            .then_with(|| a.base_char().cmp(&b.base_char()))
            .then_with(|| a.cmp(b))
    });
    Ok(ranked.into_iter().take(k).map(|(d, s)| (s, d)).collect())
}

/// CSV with columns `ipa,kind,e0..e{dim-1}`, one row per segment in input
/// order.
pub fn write_embeddings<W: Write>(
    layer: &ProjectionLayer,
    segments: &[Segment],
    analyzer: &Analyzer,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["ipa".to_string(), "kind".to_string()];
    header.extend((0..layer.embedding_dim).map(|i| format!("e{i}")));
    w.write_record(&header)?;
    for seg in segments {
        let e = layer.project(&analyzer.analyze(seg)?.bits)?;
        let mut rec = vec![seg.to_string(), seg.kind.to_string()];
        rec.extend(e.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn export_embeddings(
    layer: &ProjectionLayer,
    segments: &[Segment],
    analyzer: &Analyzer,
    path: &Path,
) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_embeddings(layer, segments, analyzer, std::io::BufWriter::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = init_projection(4, 60, 7).unwrap();
        assert_eq!(a, init_projection(4, 60, 7).unwrap());
        assert_ne!(a, init_projection(4, 60, 8).unwrap());
        assert!(a.bias().iter().all(|&b| b == 0.0));
        let bound = (6.0f64 / 64.0).sqrt();
        assert!((0..4).all(|r| (0..60).all(|c| a.weight(r, c).abs() <= bound)));
        assert!(matches!(init_projection(0, 60, 1), Err(Error::BadDimensions { .. })));
        assert!(matches!(init_projection(4, 0, 1), Err(Error::BadDimensions { .. })));
    }

    #[test]
    fn projection_basics() {
        let layer = ProjectionLayer::from_parts(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], vec![0.5, -0.5]).unwrap();
        assert_eq!(layer.project(&BitVector::zeros(3)).unwrap(), [0.5, -0.5]);
        assert_eq!(layer.project(&BitVector::from_ones(3, &[1])).unwrap(), [2.5, 4.5]);
        assert_eq!(layer.project(&BitVector::from_ones(3, &[0, 2])).unwrap(), [4.5, 9.5]);
        assert!(matches!(layer.project(&BitVector::zeros(4)), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn weights_round_trip() {
        let layer = init_projection(3, 5, 11).unwrap();
        let mut buf = Vec::new();
        layer.write_weights(&mut buf).unwrap();
        let back = ProjectionLayer::read_weights(buf.as_slice()).unwrap();
        assert_eq!(back.weights, layer.weights);
        assert_eq!(back.bias, layer.bias);

        let no_bias = "dim,total_bits\n1,2\n0.5,0.25\n";
        let l = ProjectionLayer::read_weights(no_bias.as_bytes()).unwrap();
        assert_eq!(l.bias(), [0.0]);
        assert!(ProjectionLayer::read_weights("dim,total_bits\n1,2\n0.5\n".as_bytes()).is_err());
        assert!(ProjectionLayer::read_weights("x\n".as_bytes()).is_err());
    }

    #[test]
    fn metrics() {
        assert_eq!(euclidean(&[0.0, 3.0], &[4.0, 0.0]), 5.0);
        assert!(cosine_distance(&[1.0, 0.0], &[2.0, 0.0]).abs() < 1e-12);
        assert!((cosine_distance(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(pf_parameter_count(512, 60), 31_232);
        assert_eq!(table_parameter_count(73, 512), 37_376);
        assert_eq!(init_projection(4, 60, 0).unwrap().parameter_count(), 244);
    }
}
