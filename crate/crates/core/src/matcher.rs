//! Multi-pattern matcher over token streams.
//!
//! All terms of a category set are compiled into one token trie keyed by
//! interned token ids. A document matches a category when any of its terms
//! occurs, phrases as consecutive token runs. Matching is binary per
//! category: repeated hits count once.

use std::collections::{BTreeSet, HashMap};

use crate::corpus::TokenizedDoc;
use crate::lexicon::CategorySet;

#[derive(Debug, Default, Clone)]
struct Node {
    children: HashMap<u32, u32>,
    /// Categories whose term ends at this node.
    hits: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct Matcher {
    categories: Vec<String>,
    vocab: HashMap<String, u32>,
    nodes: Vec<Node>,
}

impl Matcher {
    pub fn new(cats: &CategorySet) -> Self {
        let mut m = Matcher {
            categories: Vec::with_capacity(cats.len()),
            vocab: HashMap::new(),
            nodes: vec![Node::default()],
        };
        for (ci, (name, lex)) in cats.categories.iter().enumerate() {
            m.categories.push(name.clone());
            for term in &lex.terms {
                let mut node = 0usize;
                for tok in term.tokens() {
                    let next_id = m.vocab.len() as u32;
                    let id = *m.vocab.entry(tok.clone()).or_insert(next_id);
                    node = match m.nodes[node].children.get(&id) {
                        Some(&child) => child as usize,
                        None => {
                            let child = m.nodes.len();
                            m.nodes.push(Node::default());
                            m.nodes[node].children.insert(id, child as u32);
                            child
                        }
                    };
                }
                let hits = &mut m.nodes[node].hits;
                if !hits.contains(&(ci as u32)) {
                    hits.push(ci as u32);
                }
            }
        }
        m
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    /// Sets `mask[c] = true` for every category matched by `tokens`.
    /// `mask` must hold `category_count()` entries; it is not cleared.
    pub fn mark(&self, tokens: &[String], mask: &mut [bool]) {
        if self.categories.is_empty() {
            return;
        }
        let ids: Vec<Option<u32>> = tokens.iter().map(|t| self.vocab.get(t).copied()).collect();
        for start in 0..ids.len() {
            let mut node = 0usize;
            for id in &ids[start..] {
                let Some(id) = id else { break };
                match self.nodes[node].children.get(id) {
                    Some(&child) => node = child as usize,
                    None => break,
                }
                for &c in &self.nodes[node].hits {
                    mask[c as usize] = true;
                }
            }
        }
    }

    /// Indices (into [`Matcher::categories`]) of matched categories, ascending.
    pub fn match_indices(&self, tokens: &[String]) -> Vec<usize> {
        let mut mask = vec![false; self.categories.len()];
        self.mark(tokens, &mut mask);
        mask.iter()
            .enumerate()
            .filter_map(|(i, &hit)| hit.then_some(i))
            .collect()
    }

    pub fn match_tokens(&self, tokens: &[String]) -> BTreeSet<&str> {
        self.match_indices(tokens)
            .into_iter()
            .map(|i| self.categories[i].as_str())
            .collect()
    }

    pub fn match_doc(&self, doc: &TokenizedDoc) -> BTreeSet<&str> {
        self.match_tokens(&doc.tokens)
    }
}

pub fn build_matcher(cats: &CategorySet) -> Matcher {
    Matcher::new(cats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicon;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn set(entries: &[(&str, &[&str])]) -> CategorySet {
        let mut s = CategorySet::new("t");
        for (n, terms) in entries {
            s.insert(Lexicon::from_raw(n, *terms).unwrap()).unwrap();
        }
        s
    }

    #[test]
    fn empty_set_matches_nothing() {
        let m = build_matcher(&CategorySet::new("e"));
        assert!(m.match_tokens(&toks("me siento triste")).is_empty());
    }

    #[test]
    fn single_word() {
        let m = build_matcher(&set(&[("sadness", &["triste"])]));
        assert_eq!(m.match_tokens(&toks("me siento triste")), BTreeSet::from(["sadness"]));
        assert_eq!(
            m.match_tokens(&toks("triste triste triste")),
            BTreeSet::from(["sadness"])
        );
        assert!(m.match_tokens(&toks("tristeza")).is_empty());
    }

    #[test]
    fn phrases_need_consecutive_tokens() {
        let m = build_matcher(&set(&[("anx", &["panic attack"])]));
        assert!(m.match_tokens(&toks("panic y attack")).is_empty());
        assert!(m.match_tokens(&toks("panic")).is_empty());
        assert_eq!(m.match_tokens(&toks("a panic attack now")), BTreeSet::from(["anx"]));
    }

    #[test]
    fn overlapping_terms_across_categories() {
        let m = build_matcher(&set(&[
            ("a", &["salud mental"]),
            ("b", &["salud"]),
            ("c", &["mental health", "mental"]),
        ]));
        assert_eq!(
            m.match_tokens(&toks("la salud mental")),
            BTreeSet::from(["a", "b", "c"])
        );
        assert_eq!(m.match_indices(&toks("salud")), vec![1]);
    }
}
