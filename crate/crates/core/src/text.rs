//! Tweet text normalization.
//!
//! URLs and @mentions are dropped, hashtags are replaced by their split
//! constituent words, and the remaining text is compatibility-normalized
//! (NFKC), lowercased and cut into maximal runs of letters or of digits.
//! Everything else is a separator. No stemming, no accent stripping.

use std::sync::LazyLock;

use regex::Regex;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

static ENTITY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)(?P<url>(?:\b[a-z][a-z0-9+.\-]*://|\bwww\.)\S*)|(?P<mention>@[\p{Alphabetic}\p{N}\p{M}_]*)|#(?P<tag>[\p{Alphabetic}\p{N}\p{M}_]+)",
    )
    .expect("entity pattern")
});

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Letter,
    Digit,
    Mark,
    Sep,
}

fn classify(c: char) -> Class {
    if c.is_alphabetic() {
        Class::Letter
    } else if c.is_numeric() {
        Class::Digit
    } else if is_combining_mark(c) {
        Class::Mark
    } else {
        Class::Sep
    }
}

/// NFKC + lowercase, iterated to a fixed point so that re-normalizing a
/// normalized string is the identity.
fn fold(text: &str) -> String {
    if text.is_ascii() {
        return text.to_ascii_lowercase();
    }
    let mut cur: String = text.nfkc().collect();
    for _ in 0..4 {
        let next: String = cur.to_lowercase().nfkc().collect();
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Appends the letter/digit runs of `text` to `out`. Combining marks stay
/// attached to the run they follow.
fn push_runs(text: &str, out: &mut Vec<String>) {
    let folded = fold(text);
    let mut current = String::new();
    let mut class = Class::Sep;
    for c in folded.chars() {
        let cls = match classify(c) {
            Class::Mark if class == Class::Sep => Class::Letter,
            Class::Mark => class,
            other => other,
        };
        if cls != class && !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
        class = cls;
        if cls != Class::Sep {
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Tokenizes plain text without entity handling (used for lexicon terms).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    push_runs(text, &mut out);
    out
}

/// Splits a hashtag body (without `#`) into lowercase words at
/// lower→upper case changes, letter↔digit changes and underscores.
pub fn split_hashtag(tag: &str) -> Vec<String> {
    let mut out = Vec::new();
    split_hashtag_into(tag, &mut out);
    out
}

fn split_hashtag_into(tag: &str, out: &mut Vec<String>) {
    let mut piece = String::new();
    let mut prev: Option<char> = None;
    for c in tag.chars() {
        if c == '_' {
            push_runs(&piece, out);
            piece.clear();
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            let case_break = p.is_lowercase() && c.is_uppercase();
            let kind_break = (p.is_alphabetic() && c.is_numeric() && !c.is_alphabetic())
                || (p.is_numeric() && !p.is_alphabetic() && c.is_alphabetic());
            if case_break || kind_break {
                push_runs(&piece, out);
                piece.clear();
            }
        }
        if !is_combining_mark(c) {
            prev = Some(c);
        }
        piece.push(c);
    }
    push_runs(&piece, out);
}

/// Normalizes a tweet's text into its token sequence.
pub fn preprocess(text: &str) -> Vec<String> {
    let text: String = text.nfkc().collect();
    let mut out = Vec::new();
    let mut last = 0;
    for caps in ENTITY.captures_iter(&text) {
        let whole = caps.get(0).expect("match");
        push_runs(&text[last..whole.start()], &mut out);
        if let Some(tag) = caps.name("tag") {
            split_hashtag_into(tag.as_str(), &mut out);
        }
        last = whole.end();
    }
    push_runs(&text[last..], &mut out);
    out
}

/// True if the text carries at least one hashtag outside of URLs.
pub fn has_hashtag(text: &str) -> bool {
    let text: String = text.nfkc().collect();
    ENTITY.captures_iter(&text).any(|caps| caps.name("tag").is_some())
}
