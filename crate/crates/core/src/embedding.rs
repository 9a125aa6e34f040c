//! Word-embedding table with a whitespace text format:
//! `token v1 v2 ... vd`, one token per line. The first data line fixes the
//! dimension; later lines with a different width are an error.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// What to return for a token that has no vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OovPolicy {
    #[default]
    ZeroVector,
    /// Mean of all vectors in the table (fixed at load time).
    MeanVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
    mean: Vec<f64>,
    pub oov: OovPolicy,
}

impl EmbeddingTable {
    pub fn from_pairs<I>(pairs: I, dim: usize, oov: OovPolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut vectors = BTreeMap::new();
        let mut sum = vec![0.0; dim];
        let mut n = 0usize;
        for (token, vec) in pairs {
            if vec.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: vec.len(),
                });
            }
            // first writer wins, and only counted vectors enter the mean
            if !vectors.contains_key(&token) {
                for (s, v) in sum.iter_mut().zip(&vec) {
                    *s += v;
                }
                n += 1;
                vectors.insert(token, vec);
            }
        }
        let mean = if n == 0 {
            vec![0.0; dim]
        } else {
            sum.into_iter().map(|s| s / n as f64).collect()
        };
        Ok(Self {
            dim,
            vectors,
            mean,
            oov,
        })
    }

    pub fn parse(text: &str, oov: OovPolicy) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("non-empty line").to_string();
            let values: Vec<f64> = parts
                .map(|p| {
                    p.parse::<f64>().map_err(|_| Error::RaggedDimensions {
                        line: lineno + 1,
                        expected: dim.unwrap_or(0),
                        found: 0,
                    })
                })
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::RaggedDimensions {
                        line: lineno + 1,
                        expected: d,
                        found: values.len(),
                    });
                }
                Some(_) => {}
            }
            pairs.push((token, values));
        }
        let dim = dim.ok_or_else(|| Error::EmptyFile("embedding table".into()))?;
        if dim == 0 {
            return Err(Error::EmptyFile("embedding table has zero-width vectors".into()));
        }
        Self::from_pairs(pairs, dim, oov)
    }

    pub fn load(path: &Path, oov: OovPolicy) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, oov)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    /// The token's vector, or the out-of-vocabulary fallback.
    pub fn lookup(&self, token: &str) -> Vec<f64> {
        match self.vectors.get(token) {
            Some(v) => v.clone(),
            None => match self.oov {
                OovPolicy::ZeroVector => vec![0.0; self.dim],
                OovPolicy::MeanVector => self.mean.clone(),
            },
        }
    }

    /// Component-wise mean of the tokens' vectors (zero vector for an empty
    /// token list).
    pub fn mean_of(&self, tokens: &[&str]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        if tokens.is_empty() {
            return out;
        }
        for t in tokens {
            for (o, v) in out.iter_mut().zip(self.lookup(t)) {
                *o += v;
            }
        }
        for o in &mut out {
            *o /= tokens.len() as f64;
        }
        out
    }
}

/// Euclidean distance between equal-length vectors.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_looks_up() {
        let table = EmbeddingTable::parse("cat 1 2 3\ndog 4 5 6\n", OovPolicy::ZeroVector).unwrap();
        assert_eq!(table.dim(), 3);
        assert_eq!(table.lookup("cat"), vec![1.0, 2.0, 3.0]);
        assert_eq!(table.lookup("bird"), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn mean_vector_oov() {
        let table = EmbeddingTable::parse("cat 1 2\ndog 3 4\n", OovPolicy::MeanVector).unwrap();
        assert_eq!(table.lookup("bird"), vec![2.0, 3.0]);
    }

    #[test]
    fn ragged_line_is_an_error() {
        let err = EmbeddingTable::parse("cat 1 2\ndog 3 4 5\n", OovPolicy::ZeroVector).unwrap_err();
        match err {
            Error::RaggedDimensions { line, expected, found } => {
                assert_eq!((line, expected, found), (2, 2, 3));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn empty_table_is_an_error() {
        assert!(matches!(
            EmbeddingTable::parse("", OovPolicy::ZeroVector).unwrap_err(),
            Error::EmptyFile(_)
        ));
        assert!(matches!(
            EmbeddingTable::parse("# only a comment\n", OovPolicy::ZeroVector).unwrap_err(),
            Error::EmptyFile(_)
        ));
    }

    #[test]
    fn duplicate_tokens_keep_the_first_vector() {
        let table = EmbeddingTable::parse("cat 1 1\ncat 9 9\n", OovPolicy::ZeroVector).unwrap();
        assert_eq!(table.lookup("cat"), vec![1.0, 1.0]);
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn distance_checks_dimensions() {
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert!(matches!(
            euclidean(&[0.0], &[1.0, 2.0]).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn span_mean() {
        let table = EmbeddingTable::parse("a 2 0\nb 0 2\n", OovPolicy::ZeroVector).unwrap();
        assert_eq!(table.mean_of(&["a", "b"]), vec![1.0, 1.0]);
        assert_eq!(table.mean_of(&[]), vec![0.0, 0.0]);
    }
}
