//! Dense word vectors in the common text format (`V D` header, then one
//! `token v1 .. vD` row per word) and cosine nearest-neighbor search.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct EmbeddingTable<T> {
    dim: usize,
    tokens: Vec<String>,
    data: Vec<T>,
    norms: Vec<T>,
    index: HashMap<String, usize>,
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

fn norm<T: Scalar>(u: &[T]) -> T {
    dot(u, u).sqrt()
}

fn usable<T: Scalar>(n: T) -> bool {
    n > T::zero() && n.is_finite()
}

/// Cosine similarity `u·v / (|u||v|)`.
pub fn cosine<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (nu, nv) = (norm(u), norm(v));
    if !usable(nu) || !usable(nv) {
        return Err(Error::ZeroNorm);
    }
    Ok(dot(u, v) / (nu * nv))
}

impl<T: Scalar> EmbeddingTable<T> {
    /// Builds a table from in-memory rows. Later duplicates replace earlier
    /// ones.
    pub fn from_rows<I>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<T>)>,
    {
        if dim == 0 {
            return Err(Error::EmbeddingFormat {
                line: 0,
                reason: "dimension must be positive".into(),
            });
        }
        let mut table = EmbeddingTable {
            dim,
            tokens: Vec::new(),
            data: Vec::new(),
            norms: Vec::new(),
            index: HashMap::new(),
        };
        for (i, (token, vec)) in rows.into_iter().enumerate() {
            if vec.len() != dim {
                return Err(Error::EmbeddingFormat {
                    line: i + 1,
                    reason: format!("expected {dim} components, found {}", vec.len()),
                });
            }
            table.insert(token, &vec);
        }
        if table.tokens.is_empty() {
            return Err(Error::EmbeddingFormat {
                line: 0,
                reason: "empty vocabulary".into(),
            });
        }
        Ok(table)
    }

    fn insert(&mut self, token: String, vec: &[T]) {
        let n = norm(vec);
        if let Some(&i) = self.index.get(&token) {
            log::warn!("duplicate embedding for `{token}`; keeping the last one");
            self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vec);
            self.norms[i] = n;
            return;
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vec);
        self.norms.push(n);
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(l) => l?,
            None => {
                return Err(Error::EmbeddingFormat {
                    line: 1,
                    reason: "missing header".into(),
                })
            }
        };
        let bad_header = || Error::EmbeddingFormat {
            line: 1,
            reason: format!("header must be `V D`, found `{}`", header.trim()),
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [v, d] = fields.as_slice() else {
            return Err(bad_header());
        };
        let vocab: usize = v.parse().map_err(|_| bad_header())?;
        let dim: usize = d.parse().map_err(|_| bad_header())?;
        if dim == 0 || vocab == 0 {
            return Err(bad_header());
        }

        let mut table = EmbeddingTable {
            dim,
            tokens: Vec::with_capacity(vocab),
            data: Vec::with_capacity(vocab.saturating_mul(dim).min(1 << 28)),
            norms: Vec::with_capacity(vocab),
            index: HashMap::with_capacity(vocab),
        };
        let mut rows = 0usize;
        let mut buf: Vec<T> = Vec::with_capacity(dim);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(' ').filter(|s| !s.is_empty());
            let token = parts.next().expect("non-empty line");
            buf.clear();
            for p in parts {
                let x = p.parse::<T>().map_err(|_| Error::EmbeddingFormat {
                    line: line_no,
                    reason: format!("bad component `{p}`"),
                })?;
                buf.push(x);
            }
            if buf.len() != dim {
                return Err(Error::EmbeddingFormat {
                    line: line_no,
                    reason: format!("expected {dim} components, found {}", buf.len()),
                });
            }
            rows += 1;
            if rows > vocab {
                return Err(Error::EmbeddingFormat {
                    line: line_no,
                    reason: format!("more rows than the {vocab} declared"),
                });
            }
            table.insert(token.to_string(), &buf);
        }
        if rows != vocab {
            return Err(Error::EmbeddingFormat {
                line: rows + 1,
                reason: format!("header declares {vocab} rows, found {rows}"),
            });
        }
        let unusable = table.norms.iter().filter(|&&n| !usable(n)).count();
        if unusable > 0 {
            log::warn!("{unusable} zero-norm vectors excluded from similarity queries");
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vector(&self, token: &str) -> Option<&[T]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    /// False for out-of-vocabulary tokens and zero-norm rows.
    pub fn is_usable(&self, token: &str) -> bool {
        self.index.get(token).is_some_and(|&i| usable(self.norms[i]))
    }

    fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// The `k` most cosine-similar tokens to `query`, excluding the query and
    /// zero-norm rows. Ties go to the lexicographically smaller token.
    pub fn knn(&self, query: &str, k: usize) -> Result<Vec<(String, T)>> {
        let &qi = self
            .index
            .get(query)
            .ok_or_else(|| Error::OutOfVocabulary(query.to_string()))?;
        let qn = self.norms[qi];
        if !usable(qn) {
            return Err(Error::ZeroNorm);
        }
        let q = self.row(qi);
        let mut scored: Vec<(usize, T)> = (0..self.tokens.len())
            .filter(|&i| i != qi && usable(self.norms[i]))
            .map(|i| (i, dot(q, self.row(i)) / (qn * self.norms[i])))
            .collect();
        let cmp = |a: &(usize, T), b: &(usize, T)| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.tokens[a.0].cmp(&self.tokens[b.0]))
        };
        if k == 0 {
            return Ok(Vec::new());
        }
        if scored.len() > k {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_by(cmp);
        Ok(scored.into_iter().map(|(i, s)| (self.tokens[i].clone(), s)).collect())
    }
}

pub fn load_embeddings<T: Scalar>(path: impl AsRef<Path>) -> Result<EmbeddingTable<T>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::open(path, e))?;
    EmbeddingTable::parse(BufReader::new(f))
}
