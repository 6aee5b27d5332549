//! Line-delimited JSON tweet corpora: parsing, the analyzable-tweet filter,
//! tokenization into documents and corpus statistics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use chrono::{DateTime, FixedOffset, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

/// Day bucketing offset used when none is configured (UTC-3, Argentina).
pub const DEFAULT_UTC_OFFSET_HOURS: i32 = -3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TweetKind {
    Original,
    Reply,
    Retweet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tweet {
    pub id: String,
    pub created_at: DateTime<Utc>,
    /// Calendar day of `created_at` under the bucketing offset.
    pub date: NaiveDate,
    pub text: String,
    pub kind: TweetKind,
    pub user_id: String,
    pub has_hashtag: bool,
    pub lang: String,
}

#[derive(Deserialize)]
struct RawTweet {
    id: String,
    created_at: String,
    text: String,
    kind: TweetKind,
    user_id: String,
    #[serde(default)]
    lang: String,
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s)
        .or_else(|_| DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y"))
        .ok()
        .map(|dt| dt.with_timezone(&Utc))
}

pub fn utc_offset(hours: i32) -> Result<FixedOffset> {
    FixedOffset::east_opt(hours * 3600)
        .ok_or_else(|| Error::InvalidConfig(format!("timezone offset {hours}h out of range")))
}

impl Tweet {
    /// Parses one JSON object line. Errors carry only the reason; the caller
    /// attaches the line number.
    pub fn from_json_line(line: &str, offset: FixedOffset) -> std::result::Result<Tweet, String> {
        let raw: RawTweet = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if raw.id.is_empty() {
            return Err("empty id".into());
        }
        let created_at =
            parse_timestamp(&raw.created_at).ok_or_else(|| format!("unparseable created_at `{}`", raw.created_at))?;
        Ok(Tweet {
            date: created_at.with_timezone(&offset).date_naive(),
            has_hashtag: text::has_hashtag(&raw.text),
            id: raw.id,
            created_at,
            text: raw.text,
            kind: raw.kind,
            user_id: raw.user_id,
            lang: raw.lang,
        })
    }
}

/// Original tweets and replies are analyzed; retweets are not.
pub fn filter_analyzable(t: &Tweet) -> bool {
    matches!(t.kind, TweetKind::Original | TweetKind::Reply)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Skip malformed lines and record them.
    #[default]
    Lenient,
    /// Stop at the first malformed line.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for SkippedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Streaming parser over a line-delimited corpus.
///
/// In lenient mode malformed lines are recorded in [`TweetStream::skipped`]
/// and iteration continues. Read failures end the stream in both modes.
pub struct TweetStream<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    mode: ParseMode,
    offset: FixedOffset,
    seen: HashSet<String>,
    skipped: Vec<SkippedLine>,
    done: bool,
}

pub fn parse_corpus<R: BufRead>(reader: R, mode: ParseMode, offset: FixedOffset) -> TweetStream<R> {
    TweetStream {
        lines: reader.lines(),
        line_no: 0,
        mode,
        offset,
        seen: HashSet::new(),
        skipped: Vec::new(),
        done: false,
    }
}

impl<R> TweetStream<R> {
    pub fn skipped(&self) -> &[SkippedLine] {
        &self.skipped
    }

    pub fn into_skipped(self) -> Vec<SkippedLine> {
        self.skipped
    }
}

impl<R: BufRead> Iterator for TweetStream<R> {
    type Item = Result<Tweet>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Io(e)));
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = Tweet::from_json_line(&line, self.offset).and_then(|t| {
                if self.seen.insert(t.id.clone()) {
                    Ok(t)
                } else {
                    Err(format!("duplicate id `{}`", t.id))
                }
            });
            match parsed {
                Ok(t) => return Some(Ok(t)),
                Err(reason) => match self.mode {
                    ParseMode::Strict => {
                        self.done = true;
                        return Some(Err(Error::MalformedLine {
                            line: self.line_no,
                            reason,
                        }));
                    }
                    ParseMode::Lenient => {
                        log::warn!("skipping line {}: {}", self.line_no, reason);
                        self.skipped.push(SkippedLine {
                            line: self.line_no,
                            reason,
                        });
                    }
                },
            }
        }
        None
    }
}

/// A tweet reduced to its normalized tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub tweet_id: String,
    pub date: NaiveDate,
    pub tokens: Vec<String>,
}

impl TokenizedDoc {
    pub fn from_tweet(t: &Tweet) -> Self {
        TokenizedDoc {
            tweet_id: t.id.clone(),
            date: t.date,
            tokens: text::preprocess(&t.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserStats {
    pub users: u64,
    pub min: u64,
    pub max: u64,
    pub avg: f64,
    /// Lower median for an even number of users.
    pub median: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: u64,
    pub n_original: u64,
    pub n_retweet: u64,
    pub n_reply: u64,
    pub n_with_hashtag: u64,
    /// Absent for an empty corpus.
    pub per_user: Option<UserStats>,
    pub per_day: BTreeMap<NaiveDate, u64>,
}

/// Mergeable counter behind [`compute_corpus_stats`]. Partial accumulators
/// built over disjoint partitions merge by summation.
#[derive(Debug, Clone, Default)]
pub struct StatsAccumulator {
    total: u64,
    n_original: u64,
    n_retweet: u64,
    n_reply: u64,
    n_with_hashtag: u64,
    per_user: HashMap<String, u64>,
    per_day: BTreeMap<NaiveDate, u64>,
}

impl StatsAccumulator {
    pub fn add(&mut self, t: &Tweet) {
        self.total += 1;
        match t.kind {
            TweetKind::Original => self.n_original += 1,
            TweetKind::Retweet => self.n_retweet += 1,
            TweetKind::Reply => self.n_reply += 1,
        }
        if t.has_hashtag {
            self.n_with_hashtag += 1;
        }
        *self.per_user.entry(t.user_id.clone()).or_default() += 1;
        *self.per_day.entry(t.date).or_default() += 1;
    }

    pub fn merge(mut self, other: StatsAccumulator) -> StatsAccumulator {
        self.total += other.total;
        self.n_original += other.n_original;
        self.n_retweet += other.n_retweet;
        self.n_reply += other.n_reply;
        self.n_with_hashtag += other.n_with_hashtag;
        for (user, n) in other.per_user {
            *self.per_user.entry(user).or_default() += n;
        }
        for (day, n) in other.per_day {
            *self.per_day.entry(day).or_default() += n;
        }
        self
    }

    pub fn finish(self) -> CorpusStats {
        let per_user = if self.per_user.is_empty() {
            None
        } else {
            let mut counts: Vec<u64> = self.per_user.into_values().collect();
            counts.sort_unstable();
            let users = counts.len() as u64;
            let sum: u64 = counts.iter().sum();
            Some(UserStats {
                users,
                min: counts[0],
                max: counts[counts.len() - 1],
                avg: sum as f64 / users as f64,
                median: counts[(counts.len() - 1) / 2],
            })
        };
        CorpusStats {
            total: self.total,
            n_original: self.n_original,
            n_retweet: self.n_retweet,
            n_reply: self.n_reply,
            n_with_hashtag: self.n_with_hashtag,
            per_user,
            per_day: self.per_day,
        }
    }
}

pub fn compute_corpus_stats<'a, I>(tweets: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a Tweet>,
{
    let mut acc = StatsAccumulator::default();
    for t in tweets {
        acc.add(t);
    }
    acc.finish()
}
