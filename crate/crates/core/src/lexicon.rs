//! Seed lexicons, category sets (Empath/SentiSense style word lists) and the
//! construct → category mappings derived from them.
//!
//! Terms are stored pre-tokenized with the same normalizer used for tweets,
//! so a lexicon entry and a tweet token compare equal iff they match.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::text::tokenize;

/// One lexicon entry: a single token or a multiword phrase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Vec<String>);

impl Term {
    /// Tokenizes a raw entry. `None` when nothing survives normalization.
    pub fn parse(raw: &str) -> Option<Term> {
        let tokens = tokenize(raw);
        (!tokens.is_empty()).then_some(Term(tokens))
    }

    pub fn from_tokens(tokens: Vec<String>) -> Option<Term> {
        (!tokens.is_empty()).then_some(Term(tokens))
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn is_phrase(&self) -> bool {
        self.0.len() > 1
    }

    /// The token when this is a single-word term.
    pub fn as_word(&self) -> Option<&str> {
        match self.0.as_slice() {
            [w] => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    pub terms: BTreeSet<Term>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LexiconFile {
    name: String,
    terms: Vec<String>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>, terms: impl IntoIterator<Item = Term>) -> Self {
        Lexicon {
            name: name.into(),
            terms: terms.into_iter().collect(),
        }
    }

    /// Builds a lexicon from raw entries, dropping entries that normalize to
    /// nothing and collapsing duplicates. Fails if no term survives.
    pub fn from_raw<S: AsRef<str>>(name: &str, raw: impl IntoIterator<Item = S>) -> Result<Self> {
        let lex = Lexicon::new(name, raw.into_iter().filter_map(|s| Term::parse(s.as_ref())));
        if lex.terms.is_empty() {
            return Err(Error::EmptyLexicon(name.to_string()));
        }
        Ok(lex)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(Term::as_word)
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.terms.contains(&Term(vec![word.to_string()]))
    }

    pub fn to_json(&self) -> String {
        let file = LexiconFile {
            name: self.name.clone(),
            terms: self.terms.iter().map(Term::to_string).collect(),
        };
        serde_json::to_string_pretty(&file).expect("lexicon serializes")
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let file: LexiconFile = serde_json::from_str(text).map_err(|source| Error::Json {
            context: context.to_string(),
            source,
        })?;
        Lexicon::from_raw(&file.name, &file.terms)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::open(path, e))
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    Lexicon::from_json(&read(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySet {
    pub name: String,
    pub categories: BTreeMap<String, Lexicon>,
}

/// Category entries in file order, duplicates preserved so they can be
/// reported instead of silently overwritten.
struct OrderedEntries(Vec<(String, Vec<String>)>);

impl<'de> Deserialize<'de> for OrderedEntries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OrderedEntries;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of category name to term list")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Vec<String>>()? {
                    out.push((k, v));
                }
                Ok(OrderedEntries(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
struct CategorySetFile {
    name: String,
    categories: OrderedEntries,
}

#[derive(Serialize)]
struct CategorySetOut<'a> {
    name: &'a str,
    categories: BTreeMap<&'a str, Vec<String>>,
}

impl CategorySet {
    pub fn new(name: impl Into<String>) -> Self {
        CategorySet {
            name: name.into(),
            categories: BTreeMap::new(),
        }
    }

    /// Adds a category; the lexicon's name becomes the category name.
    pub fn insert(&mut self, lexicon: Lexicon) -> Result<()> {
        if self.categories.contains_key(&lexicon.name) {
            return Err(Error::DuplicateCategory(lexicon.name));
        }
        self.categories.insert(lexicon.name.clone(), lexicon);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Lexicon> {
        self.categories.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.categories.keys().map(String::as_str)
    }

    /// A new set holding only the named categories, in the given order's
    /// deduplicated form. Unknown names are an error.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<CategorySet> {
        let mut out = CategorySet::new(self.name.clone());
        for n in names {
            let n = n.as_ref();
            let lex = self.get(n).ok_or_else(|| Error::UnknownCategory(n.to_string()))?;
            if !out.categories.contains_key(n) {
                out.categories.insert(n.to_string(), lex.clone());
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let out = CategorySetOut {
            name: &self.name,
            categories: self
                .categories
                .iter()
                .map(|(k, lex)| (k.as_str(), lex.terms.iter().map(Term::to_string).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("category set serializes")
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let file: CategorySetFile = serde_json::from_str(text).map_err(|source| Error::Json {
            context: context.to_string(),
            source,
        })?;
        let mut set = CategorySet::new(file.name);
        for (cat, terms) in file.categories.0 {
            set.insert(Lexicon::from_raw(&cat, &terms)?)?;
        }
        Ok(set)
    }
}

pub fn load_category_set(path: impl AsRef<Path>) -> Result<CategorySet> {
    let path = path.as_ref();
    CategorySet::from_json(&read(path)?, &path.display().to_string())
}

/// Construct → lexicon file listing for batch runs. Relative paths resolve
/// against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<(String, PathBuf)>> {
    #[derive(Deserialize)]
    struct Manifest {
        lexicons: BTreeMap<String, PathBuf>,
    }
    let path = path.as_ref();
    let m: Manifest = serde_json::from_str(&read(path)?).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(m.lexicons
        .into_iter()
        .map(|(k, p)| {
            let p = if p.is_absolute() { p } else { base.join(p) };
            (k, p)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: String,
    pub count: usize,
}

/// Categories ranked by the number of words they share with a construct's
/// expanded lexicon. Sorted by count descending, then category name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerMapping {
    pub construct: String,
    pub ranked: Vec<CategoryCount>,
}

impl MarkerMapping {
    pub fn markers(&self) -> impl Iterator<Item = &str> {
        self.ranked.iter().map(|c| c.category.as_str())
    }
}
