//! Linking detected peaks to dated real-world events.

use std::io::Read;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Peak;

/// Days before a peak searched for causes, one smoothing window minus the
/// peak day.
pub const DEFAULT_LEAD_DAYS: i64 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub date: NaiveDate,
    pub description: String,
}

impl EventRecord {
    pub fn new(date: NaiveDate, description: impl Into<String>) -> Result<Self> {
        let description = description.into();
        if description.trim().is_empty() {
            return Err(Error::InvalidConfig(format!("event on {date} has no description")));
        }
        Ok(EventRecord { date, description })
    }
}

/// Reads `date,description` rows (with header).
pub fn read_events_csv<R: Read>(r: R) -> Result<Vec<EventRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<EventRecord>().enumerate() {
        let rec = rec?;
        if rec.description.trim().is_empty() {
            return Err(Error::MalformedLine {
                line: i + 2,
                reason: "empty event description".into(),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedPeak<T> {
    pub peak: Peak<T>,
    /// Events in `[peak.date - lead, peak.date]`, by date.
    pub events: Vec<EventRecord>,
}

pub fn annotate_peaks<T: Copy>(peaks: &[Peak<T>], events: &[EventRecord], lead: i64) -> Result<Vec<AnnotatedPeak<T>>> {
    if lead < 0 {
        return Err(Error::NegativeLead(lead));
    }
    let mut sorted = events.to_vec();
    sorted.sort_by_key(|e| e.date);
    Ok(peaks
        .iter()
        .map(|p| {
            let from = p
                .date
                .checked_sub_days(Days::new(lead as u64))
                .unwrap_or(NaiveDate::MIN);
            AnnotatedPeak {
                peak: *p,
                events: sorted
                    .iter()
                    .filter(|e| from <= e.date && e.date <= p.date)
                    .cloned()
                    .collect(),
            }
        })
        .collect())
}
