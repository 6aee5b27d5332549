//! Brute-force reference implementations used as test oracles. Written
//! straight from the definitions, without sharing code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn d0() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 3, 1).unwrap()
}

pub fn day(i: usize) -> NaiveDate {
    d0() + Duration::days(i as i64)
}

/// Distinct lowercase ASCII words, so tokenization is the identity.
pub fn vocabulary<R: Rng>(rng: &mut R, n: usize) -> Vec<String> {
    let mut seen = BTreeSet::new();
    while seen.len() < n {
        let len = rng.gen_range(3..=7);
        let w: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        seen.insert(w);
    }
    let mut v: Vec<String> = seen.into_iter().collect();
    v.shuffle(rng);
    v
}

// ---------------------------------------------------------------- matching

pub fn contains_run(doc: &[String], term: &[String]) -> bool {
    !term.is_empty() && term.len() <= doc.len() && (0..=doc.len() - term.len()).any(|s| doc[s..s + term.len()] == *term)
}

pub type RawCategory = (String, Vec<Vec<String>>);

/// Names of categories with at least one term present as a consecutive run.
pub fn naive_match(doc: &[String], cats: &[RawCategory]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (name, terms) in cats {
        for t in terms {
            if contains_run(doc, t) {
                out.insert(name.clone());
                break;
            }
        }
    }
    out
}

/// `random_categories(rng, vocab, n, max_terms, phrase_rate)`
pub fn random_categories<R: Rng>(
    rng: &mut R,
    vocab: &[String],
    n: usize,
    max_terms: usize,
    phrase_rate: f64,
) -> Vec<RawCategory> {
    (0..n)
        .map(|c| {
            let count = rng.gen_range(1..=max_terms);
            let terms = (0..count)
                .map(|_| {
                    let len = if rng.gen_bool(phrase_rate) {
                        rng.gen_range(2..=3)
                    } else {
                        1
                    };
                    (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())].clone()).collect()
                })
                .collect();
            (format!("cat{c:03}"), terms)
        })
        .collect()
}

pub fn random_doc<R: Rng>(rng: &mut R, vocab: &[String], min: usize, max: usize) -> Vec<String> {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())].clone()).collect()
}

/// `(matched, total)` per `(category, day)`, counting each doc once per
/// category, over days `0..days` from `start`.
pub fn naive_daily(
    docs: &[(NaiveDate, Vec<String>)],
    cats: &[RawCategory],
    start: NaiveDate,
    days: usize,
) -> (BTreeMap<(String, usize), u64>, Vec<u64>) {
    let mut matched = BTreeMap::new();
    let mut totals = vec![0u64; days];
    for (name, _) in cats {
        for d in 0..days {
            matched.insert((name.clone(), d), 0);
        }
    }
    for (date, tokens) in docs {
        let off = (*date - start).num_days();
        if off < 0 || off as usize >= days {
            continue;
        }
        let d = off as usize;
        totals[d] += 1;
        for name in naive_match(tokens, cats) {
            *matched.get_mut(&(name, d)).unwrap() += 1;
        }
    }
    (matched, totals)
}

// ------------------------------------------------------------- embeddings

pub fn naive_cosine(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for i in 0..u.len() {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    dot / (uu.sqrt() * vv.sqrt())
}

/// Full sort of every other usable row: similarity descending, token
/// ascending on ties.
pub fn exhaustive_knn(rows: &[(String, Vec<f64>)], query: &str, k: usize) -> Vec<(String, f64)> {
    let q = &rows.iter().find(|(t, _)| t == query).unwrap().1;
    let mut all: Vec<(String, f64)> = rows
        .iter()
        .filter(|(t, v)| t != query && v.iter().any(|x| *x != 0.0))
        .map(|(t, v)| (t.clone(), naive_cosine(q, v)))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

// ----------------------------------------------------------------- series

/// `(index, prominence)` of every local maximum, by definition.
///
/// Missing values split the series; a run's first and last positions are
/// never peaks. A flat top counts once, at its leftmost index. The
/// prominence walks out from the peak on each side until a strictly higher
/// value or the run edge, takes the lowest value seen per side, and
/// subtracts the higher of the two from the peak.
pub fn ref_peaks(v: &[Option<f64>]) -> Vec<(usize, f64)> {
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        let Some(h) = v[i] else { continue };
        let mut lo = i;
        while lo > 0 && v[lo - 1].is_some() {
            lo -= 1;
        }
        let mut hi = i;
        while hi + 1 < n && v[hi + 1].is_some() {
            hi += 1;
        }
        if i == lo || v[i - 1].unwrap() >= h {
            continue;
        }
        let next_diff = (i + 1..=hi).find(|&j| v[j].unwrap() != h);
        match next_diff {
            Some(j) if v[j].unwrap() < h => {}
            _ => continue,
        }
        let left_wall = (lo..i).rev().find(|&j| v[j].unwrap() > h).map_or(lo, |j| j + 1);
        let right_wall = (i + 1..=hi).find(|&j| v[j].unwrap() > h).map_or(hi, |j| j - 1);
        let left_min = (left_wall..i).map(|j| v[j].unwrap()).fold(f64::INFINITY, f64::min);
        let right_min = (i + 1..=right_wall)
            .map(|j| v[j].unwrap())
            .fold(f64::INFINITY, f64::min);
        out.push((i, h - left_min.max(right_min)));
    }
    out
}

pub fn naive_mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Indices kept by the `prominence > mean + k·std` rule.
pub fn ref_filter(peaks: &[(usize, f64)], k: f64) -> Vec<usize> {
    if peaks.is_empty() {
        return Vec::new();
    }
    let proms: Vec<f64> = peaks.iter().map(|p| p.1).collect();
    let (mean, std) = naive_mean_std(&proms);
    peaks.iter().filter(|p| p.1 > mean + k * std).map(|p| p.0).collect()
}

pub fn ref_smooth(v: &[Option<f64>], window: usize) -> Vec<Option<f64>> {
    (0..v.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let xs: Vec<f64> = v[lo..=i].iter().flatten().copied().collect();
            if xs.is_empty() {
                None
            } else {
                Some(xs.iter().sum::<f64>() / xs.len() as f64)
            }
        })
        .collect()
}

pub fn ref_gradient(v: &[Option<f64>]) -> Vec<Option<f64>> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b, div) = if i == 0 {
                (0, 1, 1.0)
            } else if i == n - 1 {
                (n - 2, n - 1, 1.0)
            } else {
                (i - 1, i + 1, 2.0)
            };
            if i > 0 && i < n - 1 && v[i].is_none() {
                return None;
            }
            Some((v[b]? - v[a]?) / div)
        })
        .collect()
}

/// Rise indices and fall indices of the smooth → gradient → smooth signal.
pub fn ref_marker_peaks(raw: &[Option<f64>], window: usize, k: f64) -> (Vec<usize>, Vec<usize>) {
    let sg = ref_smooth(&ref_gradient(&ref_smooth(raw, window)), window);
    let neg: Vec<Option<f64>> = sg.iter().map(|x| x.map(|v| -v)).collect();
    (ref_filter(&ref_peaks(&sg), k), ref_filter(&ref_peaks(&neg), k))
}

pub fn random_series<R: Rng>(rng: &mut R, n: usize, with_gaps: bool, integer: bool) -> Vec<Option<f64>> {
    let mut v: Vec<Option<f64>> = (0..n)
        .map(|_| {
            Some(if integer {
                rng.gen_range(0..6) as f64
            } else {
                rng.gen_range(0.0..100.0)
            })
        })
        .collect();
    if with_gaps {
        for _ in 0..rng.gen_range(1..6) {
            let s = rng.gen_range(0..n);
            let len = rng.gen_range(1..8);
            for x in v.iter_mut().skip(s).take(len) {
                *x = None;
            }
        }
    }
    v
}

// ------------------------------------------------------------------ stats

pub struct NaiveStats {
    pub total: u64,
    pub original: u64,
    pub retweet: u64,
    pub reply: u64,
    pub hashtag: u64,
    pub users: u64,
    pub min: u64,
    pub max: u64,
    pub avg: f64,
    pub median: u64,
}

/// `(user, kind, has_hashtag)` rows; kind is "original", "retweet" or
/// "reply". Lower median for an even number of users.
pub fn naive_stats(rows: &[(String, &str, bool)]) -> NaiveStats {
    let mut per_user: HashMap<&str, u64> = HashMap::new();
    let mut s = NaiveStats {
        total: 0,
        original: 0,
        retweet: 0,
        reply: 0,
        hashtag: 0,
        users: 0,
        min: 0,
        max: 0,
        avg: 0.0,
        median: 0,
    };
    for (user, kind, tag) in rows {
        s.total += 1;
        match *kind {
            "original" => s.original += 1,
            "retweet" => s.retweet += 1,
            "reply" => s.reply += 1,
            other => panic!("unknown kind {other}"),
        }
        if *tag {
            s.hashtag += 1;
        }
        *per_user.entry(user.as_str()).or_insert(0) += 1;
    }
    let mut counts: Vec<u64> = per_user.values().copied().collect();
    counts.sort();
    if !counts.is_empty() {
        s.users = counts.len() as u64;
        s.min = counts[0];
        s.max = *counts.last().unwrap();
        s.avg = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
        s.median = counts[counts.len().div_ceil(2) - 1];
    }
    s
}

// ----------------------------------------------------------------- stages

/// `100·(v − med)/med` maximized per stage, `None` for a zero median or an
/// empty stage.
pub fn naive_stage_table(values: &[Option<f64>], stages: &[(usize, usize)]) -> Vec<Option<f64>> {
    let mut present: Vec<f64> = values.iter().flatten().copied().collect();
    present.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = present.len();
    let med = if n % 2 == 1 {
        present[n / 2]
    } else {
        (present[n / 2 - 1] + present[n / 2]) / 2.0
    };
    stages
        .iter()
        .map(|&(a, b)| {
            if med == 0.0 {
                return None;
            }
            let mut best: Option<f64> = None;
            for v in values[a..=b].iter().flatten() {
                let x = 100.0 * (v - med) / med;
                if best.is_none_or(|b| x > b) {
                    best = Some(x);
                }
            }
            best
        })
        .collect()
}
