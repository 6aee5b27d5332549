//! Seed lexicon expansion by embedding neighbors, and association of the
//! expanded lexicon with the categories it shares the most words with.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::lexicon::{CategoryCount, CategorySet, Lexicon, MarkerMapping, Term};
use crate::scalar::Scalar;

pub const DEFAULT_NEIGHBORS: usize = 10;
pub const DEFAULT_MARKERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Neighbors added per seed word.
    pub k: usize,
    /// Maximum categories kept per construct.
    pub m: usize,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            k: DEFAULT_NEIGHBORS,
            m: DEFAULT_MARKERS,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m == 0 {
            return Err(Error::InvalidConfig(format!(
                "k and m must be at least 1 (k={}, m={})",
                self.k, self.m
            )));
        }
        Ok(())
    }
}

/// Seed terms plus the `k` nearest neighbors of every single-word seed found
/// in the table. Phrases pass through unexpanded; out-of-vocabulary and
/// zero-norm seeds are kept as is.
pub fn expand_lexicon<T: Scalar>(seed: &Lexicon, table: &EmbeddingTable<T>, cfg: &ExpansionConfig) -> Lexicon {
    let words: Vec<&str> = seed.words().collect();
    let neighbors: Vec<Vec<Term>> = words
        .par_iter()
        .map(|w| match table.knn(w, cfg.k) {
            Ok(nn) => nn.into_iter().filter_map(|(tok, _)| Term::parse(&tok)).collect(),
            Err(e) => {
                log::debug!("not expanding `{w}`: {e}");
                Vec::new()
            }
        })
        .collect();
    let mut terms: BTreeSet<Term> = seed.terms.clone();
    terms.extend(neighbors.into_iter().flatten());
    Lexicon {
        name: seed.name.clone(),
        terms,
    }
}

/// Ranks categories by the number of single words they share with the
/// expanded lexicon. Zero-count categories are dropped; at most `m` remain.
pub fn associate_categories(expanded: &Lexicon, cats: &CategorySet, cfg: &ExpansionConfig) -> MarkerMapping {
    let words: HashSet<&str> = expanded.words().collect();
    let mut ranked: Vec<CategoryCount> = cats
        .categories
        .iter()
        .map(|(name, lex)| CategoryCount {
            category: name.clone(),
            count: lex.words().filter(|w| words.contains(w)).count(),
        })
        .filter(|c| c.count > 0)
        .collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.category.cmp(&b.category)));
    ranked.truncate(cfg.m);
    MarkerMapping {
        construct: expanded.name.clone(),
        ranked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex(name: &str, terms: &[&str]) -> Lexicon {
        Lexicon::from_raw(name, terms).unwrap()
    }

    fn cats(entries: &[(&str, &[&str])]) -> CategorySet {
        let mut set = CategorySet::new("c");
        for (n, t) in entries {
            set.insert(lex(n, t)).unwrap();
        }
        set
    }

    fn table() -> EmbeddingTable<f64> {
        EmbeddingTable::from_rows(
            2,
            vec![
                ("a".to_string(), vec![1.0, 0.0]),
                ("b".to_string(), vec![0.9, 0.1]),
                ("c".to_string(), vec![0.8, 0.3]),
                ("z".to_string(), vec![-1.0, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn expands_single_words() {
        let cfg = ExpansionConfig { k: 2, m: 10 };
        let out = expand_lexicon(&lex("s", &["a"]), &table(), &cfg);
        assert_eq!(out, lex("s", &["a", "b", "c"]));
    }

    #[test]
    fn phrases_and_oov_pass_through() {
        let cfg = ExpansionConfig { k: 2, m: 10 };
        let seed = lex("s", &["panic attack", "zzz"]);
        assert_eq!(expand_lexicon(&seed, &table(), &cfg), seed);
    }

    #[test]
    fn association_counts() {
        let cfg = ExpansionConfig { k: 10, m: 2 };
        let set = cats(&[("C1", &["a", "b"]), ("C2", &["b"]), ("C3", &["x"])]);
        let m = associate_categories(&lex("e", &["a", "b", "c"]), &set, &cfg);
        let got: Vec<(&str, usize)> = m.ranked.iter().map(|c| (c.category.as_str(), c.count)).collect();
        assert_eq!(got, [("C1", 2), ("C2", 1)]);
        assert_eq!(m.construct, "e");
    }

    #[test]
    fn empty_expanded_lexicon() {
        let set = cats(&[("C1", &["a"])]);
        let m = associate_categories(&Lexicon::new("e", []), &set, &ExpansionConfig::default());
        assert!(m.ranked.is_empty());
    }

    #[test]
    fn ties_are_lexicographic() {
        let set = cats(&[("C2", &["b"]), ("C1", &["a"])]);
        let m = associate_categories(&lex("e", &["a", "b"]), &set, &ExpansionConfig::default());
        let got: Vec<&str> = m.markers().collect();
        assert_eq!(got, ["C1", "C2"]);
    }

    #[test]
    fn phrases_do_not_count_as_shared_words() {
        let set = cats(&[("C1", &["panic attack", "miedo"])]);
        let m = associate_categories(&lex("e", &["panic attack"]), &set, &ExpansionConfig::default());
        assert!(m.ranked.is_empty());
    }

    #[test]
    fn config_validation() {
        assert!(ExpansionConfig::default().validate().is_ok());
        assert!(ExpansionConfig { k: 0, m: 1 }.validate().is_err());
    }

    proptest! {
        #[test]
        fn expansion_is_bounded_superset(seed_idx in proptest::collection::btree_set(0usize..30, 1..10), k in 1usize..5) {
            let rows: Vec<(String, Vec<f64>)> = (0..30)
                .map(|i| (format!("w{i}"), vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos(), 0.1 * i as f64]))
                .collect();
            let t = EmbeddingTable::from_rows(3, rows).unwrap();
            let mut raw: Vec<String> = seed_idx.iter().map(|i| format!("w{i}")).collect();
            raw.push("not here".into());
            let seed = Lexicon::from_raw("s", &raw).unwrap();
            let out = expand_lexicon(&seed, &t, &ExpansionConfig { k, m: 10 });
            prop_assert!(seed.terms.is_subset(&out.terms));
            prop_assert!(out.len() <= seed.len() + k * seed_idx.len());
        }

        #[test]
        fn association_ignores_term_order(mut a in proptest::collection::vec("[a-e]", 1..6), mut b in proptest::collection::vec("[a-e]", 1..6)) {
            let cfg = ExpansionConfig::default();
            let m1 = associate_categories(&Lexicon::from_raw("e", &a).unwrap(), &cats(&[("X", &b.iter().map(String::as_str).collect::<Vec<_>>())]), &cfg);
            a.reverse();
            b.reverse();
            let m2 = associate_categories(&Lexicon::from_raw("e", &a).unwrap(), &cats(&[("X", &b.iter().map(String::as_str).collect::<Vec<_>>())]), &cfg);
            prop_assert_eq!(m1, m2);
        }
    }
}
