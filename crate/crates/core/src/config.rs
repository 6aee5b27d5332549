//! Declarative run configuration shared by the command-line subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::{utc_offset, ParseMode, DEFAULT_UTC_OFFSET_HOURS};
use crate::error::{Error, Result};
use crate::expansion::{ExpansionConfig, DEFAULT_MARKERS, DEFAULT_NEIGHBORS};
use crate::prevalence::DateRange;
use crate::report::DEFAULT_LEAD_DAYS;
use crate::series::{AnalysisConfig, DEFAULT_SIGMA_MULT, DEFAULT_WINDOW};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Vec<PathBuf>,
    pub lexicon_manifest: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub k: usize,
    pub m: usize,
    pub window: usize,
    pub sigma_mult: f64,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub tz_offset_hours: i32,
    pub out: PathBuf,
    /// 0 uses every available core.
    pub workers: usize,
    pub strict: bool,
    /// Categories to analyze; empty falls back to `mapping`, then to all.
    pub markers: Vec<String>,
    /// Marker mapping written by `expand`.
    pub mapping: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub stages: Option<PathBuf>,
    pub lead_days: i64,
    /// Prevalence CSV consumed by `render`.
    pub prevalence: Option<PathBuf>,
    pub title: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: Vec::new(),
            lexicon_manifest: None,
            categories: None,
            embeddings: None,
            k: DEFAULT_NEIGHBORS,
            m: DEFAULT_MARKERS,
            window: DEFAULT_WINDOW,
            sigma_mult: DEFAULT_SIGMA_MULT,
            from: None,
            to: None,
            tz_offset_hours: DEFAULT_UTC_OFFSET_HOURS,
            out: PathBuf::from("out"),
            workers: 0,
            strict: false,
            markers: Vec::new(),
            mapping: None,
            events: None,
            stages: None,
            lead_days: DEFAULT_LEAD_DAYS,
            prevalence: None,
            title: None,
        }
    }
}

impl RunConfig {
    /// Loads a JSON config. Relative paths inside it resolve against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::open(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            context: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.corpus.iter_mut().for_each(fix);
        for p in [
            &mut cfg.lexicon_manifest,
            &mut cfg.categories,
            &mut cfg.embeddings,
            &mut cfg.mapping,
            &mut cfg.events,
            &mut cfg.stages,
            &mut cfg.prevalence,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut cfg.out);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.expansion().validate()?;
        self.analysis().validate()?;
        self.offset()?;
        if self.lead_days < 0 {
            return Err(Error::NegativeLead(self.lead_days));
        }
        if let (Some(from), Some(to)) = (self.from, self.to) {
            DateRange::new(from, to)?;
        }
        Ok(())
    }

    pub fn expansion(&self) -> ExpansionConfig {
        ExpansionConfig { k: self.k, m: self.m }
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            window: self.window,
            sigma_mult: self.sigma_mult,
        }
    }

    pub fn offset(&self) -> Result<FixedOffset> {
        utc_offset(self.tz_offset_hours)
    }

    pub fn parse_mode(&self) -> ParseMode {
        if self.strict {
            ParseMode::Strict
        } else {
            ParseMode::Lenient
        }
    }
}
