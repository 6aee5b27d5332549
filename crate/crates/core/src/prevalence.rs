//! Daily prevalence: per category and day, the share of that day's
//! documents matching the category.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{Days, NaiveDate};
use rayon::prelude::*;

use crate::corpus::{filter_analyzable, TokenizedDoc, Tweet};
use crate::error::{Error, Result};
use crate::matcher::Matcher;
use crate::scalar::Scalar;
use crate::series::{Series, SeriesKind};
use crate::text::preprocess;

/// Inclusive range of calendar days.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    start: NaiveDate,
    end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidRange { start, end });
        }
        Ok(DateRange { start, end })
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        (self.start <= date && date <= self.end).then(|| (date - self.start).num_days() as usize)
    }

    pub fn date_at(&self, i: usize) -> NaiveDate {
        self.start + Days::new(i as u64)
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.index_of(date).is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceRow<T> {
    pub date: NaiveDate,
    pub matched: u64,
    pub total: u64,
    /// `100 * matched / total`, missing when the day has no documents.
    pub percent: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyPrevalence<T> {
    pub category: String,
    pub rows: Vec<PrevalenceRow<T>>,
}

/// Integer match counts per (category, day) with a shared per-day
/// denominator. Counters over disjoint document partitions merge by
/// summation, so any partitioning gives the same result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailyCounts {
    range: DateRange,
    categories: Vec<String>,
    total: Vec<u64>,
    /// Category-major: `matched[c * days + d]`.
    matched: Vec<u64>,
    dropped: u64,
}

impl DailyCounts {
    pub fn new(categories: Vec<String>, range: DateRange) -> Self {
        let days = range.len();
        DailyCounts {
            matched: vec![0; categories.len() * days],
            total: vec![0; days],
            categories,
            range,
            dropped: 0,
        }
    }

    pub fn for_matcher(matcher: &Matcher, range: DateRange) -> Self {
        DailyCounts::new(matcher.categories().to_vec(), range)
    }

    pub fn range(&self) -> DateRange {
        self.range
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Documents dated outside the range.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn totals(&self) -> &[u64] {
        &self.total
    }

    pub fn matched(&self, category: usize, day: usize) -> u64 {
        self.matched[category * self.range.len() + day]
    }

    fn category_index(&self, name: &str) -> Result<usize> {
        self.categories
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()))
    }

    /// Counts one document; `scratch` must hold one flag per category.
    fn add_tokens(&mut self, matcher: &Matcher, date: NaiveDate, tokens: &[String], scratch: &mut [bool]) {
        let Some(day) = self.range.index_of(date) else {
            self.dropped += 1;
            return;
        };
        self.total[day] += 1;
        scratch.fill(false);
        matcher.mark(tokens, scratch);
        let days = self.range.len();
        for (c, &hit) in scratch.iter().enumerate() {
            if hit {
                self.matched[c * days + day] += 1;
            }
        }
    }

    pub fn add(&mut self, matcher: &Matcher, doc: &TokenizedDoc) {
        let mut scratch = vec![false; matcher.category_count()];
        self.add_tokens(matcher, doc.date, &doc.tokens, &mut scratch);
    }

    pub fn merge(mut self, other: DailyCounts) -> DailyCounts {
        assert_eq!(self.range, other.range, "merging counters over different ranges");
        assert_eq!(
            self.categories, other.categories,
            "merging counters over different categories"
        );
        for (a, b) in self.total.iter_mut().zip(other.total) {
            *a += b;
        }
        for (a, b) in self.matched.iter_mut().zip(other.matched) {
            *a += b;
        }
        self.dropped += other.dropped;
        self
    }

    pub fn percent<T: Scalar>(&self, category: usize, day: usize) -> Option<T> {
        let total = self.total[day];
        (total > 0).then(|| {
            T::hundred() * T::from_f64_lossy(self.matched(category, day) as f64) / T::from_f64_lossy(total as f64)
        })
    }

    pub fn daily<T: Scalar>(&self, category: &str) -> Result<DailyPrevalence<T>> {
        let c = self.category_index(category)?;
        Ok(DailyPrevalence {
            category: category.to_string(),
            rows: (0..self.range.len())
                .map(|d| PrevalenceRow {
                    date: self.range.date_at(d),
                    matched: self.matched(c, d),
                    total: self.total[d],
                    percent: self.percent(c, d),
                })
                .collect(),
        })
    }

    /// The percent column of one category as a raw series.
    pub fn series<T: Scalar>(&self, category: &str) -> Result<Series<T>> {
        let c = self.category_index(category)?;
        Ok(Series::new(
            self.range.start(),
            (0..self.range.len()).map(|d| self.percent(c, d)).collect(),
            SeriesKind::Raw,
        ))
    }

    /// Raw series for every category, in matcher order.
    pub fn all_series<T: Scalar>(&self) -> Vec<(String, Series<T>)> {
        self.categories
            .iter()
            .map(|c| (c.clone(), self.series(c).expect("own category")))
            .collect()
    }

    /// Long-format CSV: `date,category,matched,total,percent`, empty percent
    /// for days without documents. Rows are grouped by category.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["date", "category", "matched", "total", "percent"])?;
        for (c, name) in self.categories.iter().enumerate() {
            for d in 0..self.range.len() {
                let pct = self.percent::<f64>(c, d).map(|p| p.to_string()).unwrap_or_default();
                out.write_record([
                    self.range.date_at(d).to_string(),
                    name.clone(),
                    self.matched(c, d).to_string(),
                    self.total[d].to_string(),
                    pct,
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Counts matches per category and day over `[start, end]`. Documents dated
/// outside the range are dropped and counted in [`DailyCounts::dropped`].
pub fn aggregate_daily<'a, I>(docs: I, matcher: &Matcher, start: NaiveDate, end: NaiveDate) -> Result<DailyCounts>
where
    I: IntoIterator<Item = &'a TokenizedDoc>,
{
    let mut counts = DailyCounts::for_matcher(matcher, DateRange::new(start, end)?);
    let mut scratch = vec![false; matcher.category_count()];
    for doc in docs {
        counts.add_tokens(matcher, doc.date, &doc.tokens, &mut scratch);
    }
    Ok(counts)
}

const CHUNK: usize = 2048;

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))
}

/// Parallel [`aggregate_daily`] over `workers` threads (0 = all cores).
/// The result does not depend on the worker count.
pub fn aggregate_daily_par(
    docs: &[TokenizedDoc],
    matcher: &Matcher,
    range: DateRange,
    workers: usize,
) -> Result<DailyCounts> {
    let empty = || DailyCounts::for_matcher(matcher, range);
    Ok(pool(workers)?.install(|| {
        docs.par_chunks(CHUNK)
            .map(|chunk| {
                let mut counts = empty();
                let mut scratch = vec![false; matcher.category_count()];
                for doc in chunk {
                    counts.add_tokens(matcher, doc.date, &doc.tokens, &mut scratch);
                }
                counts
            })
            .reduce(empty, DailyCounts::merge)
    }))
}

/// Filters analyzable tweets, tokenizes and counts them in parallel.
pub fn aggregate_tweets_par(
    tweets: &[Tweet],
    matcher: &Matcher,
    range: DateRange,
    workers: usize,
) -> Result<DailyCounts> {
    let empty = || DailyCounts::for_matcher(matcher, range);
    Ok(pool(workers)?.install(|| {
        tweets
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut counts = empty();
                let mut scratch = vec![false; matcher.category_count()];
                for t in chunk.iter().filter(|t| filter_analyzable(t)) {
                    if !range.contains(t.date) {
                        counts.dropped += 1;
                        continue;
                    }
                    counts.add_tokens(matcher, t.date, &preprocess(&t.text), &mut scratch);
                }
                counts
            })
            .reduce(empty, DailyCounts::merge)
    }))
}

/// Reads a long-format prevalence CSV back into one percent series per
/// category, in first-appearance order. All series share the covered range;
/// days absent from the file are missing.
pub fn read_prevalence_csv<T: Scalar, R: Read>(r: R) -> Result<Vec<(String, Series<T>)>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MalformedLine {
                line: 1,
                reason: format!("missing `{name}` column"),
            })
    };
    let (date_c, cat_c, pct_c) = (col("date")?, col("category")?, col("percent")?);
    let kind_c = headers.iter().position(|h| h == "kind");

    let mut order: Vec<String> = Vec::new();
    let mut cells: BTreeMap<String, BTreeMap<NaiveDate, Option<T>>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if let Some(k) = kind_c {
            if rec.get(k).is_some_and(|k| !k.is_empty() && k != "raw") {
                continue;
            }
        }
        let bad = |reason: String| Error::MalformedLine { line, reason };
        let date: NaiveDate = rec
            .get(date_c)
            .unwrap_or("")
            .parse()
            .map_err(|e| bad(format!("bad date: {e}")))?;
        let cat = rec.get(cat_c).unwrap_or("").to_string();
        let pct = match rec.get(pct_c).unwrap_or("") {
            "" => None,
            s => Some(s.parse::<T>().map_err(|_| bad(format!("bad percent `{s}`")))?),
        };
        if !cells.contains_key(&cat) {
            order.push(cat.clone());
        }
        cells.entry(cat).or_default().insert(date, pct);
    }
    let (Some(lo), Some(hi)) = (
        cells.values().filter_map(|m| m.keys().next()).min().copied(),
        cells.values().filter_map(|m| m.keys().next_back()).max().copied(),
    ) else {
        return Ok(Vec::new());
    };
    let range = DateRange::new(lo, hi)?;
    Ok(order
        .into_iter()
        .map(|cat| {
            let m = &cells[&cat];
            let vals = (0..range.len())
                .map(|d| m.get(&range.date_at(d)).copied().flatten())
                .collect();
            (cat, Series::new(lo, vals, SeriesKind::Raw))
        })
        .collect())
}

/// Writes derived series in the prevalence layout with a trailing `kind`
/// column; `matched` and `total` are left empty.
pub fn write_series_csv<T: Scalar, W: Write>(series: &[(String, Series<T>)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["date", "category", "matched", "total", "percent", "kind"])?;
    for (name, s) in series {
        for (i, v) in s.values().iter().enumerate() {
            out.write_record([
                s.date_at(i).to_string(),
                name.clone(),
                String::new(),
                String::new(),
                v.map(|x| x.to_string()).unwrap_or_default(),
                s.kind().as_str().to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
