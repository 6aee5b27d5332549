//! Lexicon-driven monitoring of social media corpora.
//!
//! The pipeline: parse and normalize tweets ([`corpus`], [`text`]), expand
//! seed lexicons with embedding neighbors and map them to categories
//! ([`lexicon`], [`embedding`], [`expansion`]), count daily category
//! prevalence ([`matcher`], [`prevalence`]), detect change peaks on the
//! smoothed gradient ([`series`]) and report ([`report`]).
//!
//! Numeric code is generic over [`Scalar`] (f32 or f64); the aliases below
//! fix the common choices.

pub mod config;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod expansion;
pub mod lexicon;
pub mod matcher;
pub mod prevalence;
pub mod report;
pub mod scalar;
pub mod series;
pub mod text;

pub use config::RunConfig;
pub use corpus::{
    compute_corpus_stats, filter_analyzable, parse_corpus, CorpusStats, ParseMode, TokenizedDoc, Tweet, TweetKind,
};
pub use embedding::{cosine, load_embeddings, EmbeddingTable};
pub use error::{Error, Result};
pub use expansion::{associate_categories, expand_lexicon, ExpansionConfig};
pub use lexicon::{load_category_set, load_lexicon, CategorySet, Lexicon, MarkerMapping, Term};
pub use matcher::{build_matcher, Matcher};
pub use prevalence::{aggregate_daily, aggregate_daily_par, DailyCounts, DailyPrevalence, DateRange};
pub use scalar::Scalar;
pub use series::{
    filter_peaks, find_peaks, gradient, joint_peaks, marker_peaks, smooth, AnalysisConfig, Direction, Peak, Series,
    SeriesKind,
};
pub use text::{preprocess, split_hashtag};

pub type Series64 = Series<f64>;
pub type Series32 = Series<f32>;
pub type Peak64 = Peak<f64>;
pub type Peak32 = Peak<f32>;
/// Word vectors are usually distributed in single precision.
pub type Embeddings = EmbeddingTable<f32>;
pub type Embeddings64 = EmbeddingTable<f64>;
