//! Heatmaps, peak annotation, stage tables and category views.

mod events;
mod heatmap;
mod stages;

pub use events::{annotate_peaks, read_events_csv, AnnotatedPeak, EventRecord, DEFAULT_LEAD_DAYS};
pub use heatmap::{render_heatmap, GrayRamp, HeatmapSpec};
pub use stages::{read_stages_csv, stage_prevalence_table, StageRow, StageTable, StageWindow};

use std::io::Write;

use crate::corpus::TokenizedDoc;
use crate::error::{Error, Result};
use crate::lexicon::CategorySet;
use crate::matcher::Matcher;
use crate::prevalence::{aggregate_daily, DailyCounts, DateRange};
use crate::scalar::Scalar;
use crate::series::{smooth, Peak};

/// Daily counts and heatmap for a chosen subset of categories.
#[derive(Debug, Clone)]
pub struct CategoryView {
    pub counts: DailyCounts,
    pub svg: Vec<u8>,
}

/// Prevalence and heatmap restricted to `subset` (e.g. the crime-related
/// categories). Rows follow `subset` order; series are smoothed with
/// `window` days before rendering.
pub fn crime_view<S: AsRef<str>>(
    cats: &CategorySet,
    docs: &[TokenizedDoc],
    range: DateRange,
    subset: &[S],
    window: usize,
    spec: &HeatmapSpec,
) -> Result<CategoryView> {
    if subset.is_empty() {
        return Err(Error::EmptyMarkers);
    }
    let sub = cats.subset(subset)?;
    let matcher = Matcher::new(&sub);
    let counts = aggregate_daily(docs, &matcher, range.start(), range.end())?;
    let series: Vec<_> = counts
        .all_series::<f64>()
        .into_iter()
        .map(|(n, s)| (n, smooth(&s, window)))
        .collect();
    let spec = HeatmapSpec {
        markers: subset.iter().map(|s| s.as_ref().to_string()).collect(),
        ..spec.clone()
    };
    let svg = render_heatmap(&series, &spec)?;
    Ok(CategoryView { counts, svg })
}

/// `date,marker,direction,height,prominence`, one row per peak.
pub fn write_peaks_csv<T: Scalar, W: Write>(peaks: &[(String, Peak<T>)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["date", "marker", "direction", "height", "prominence"])?;
    for (marker, p) in peaks {
        out.write_record([
            p.date.to_string(),
            marker.clone(),
            p.direction.as_str().to_string(),
            p.height.to_string(),
            p.prominence.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `peak_date,marker,direction,event_date,description`; peaks without
/// events get one row with empty event fields.
pub fn write_annotations_csv<T: Scalar, W: Write>(rows: &[(String, AnnotatedPeak<T>)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["peak_date", "marker", "direction", "event_date", "description"])?;
    for (marker, a) in rows {
        let head = [
            a.peak.date.to_string(),
            marker.clone(),
            a.peak.direction.as_str().to_string(),
        ];
        if a.events.is_empty() {
            out.write_record(head.iter().map(String::as_str).chain(["", ""]))?;
        }
        for e in &a.events {
            out.write_record(
                head.iter()
                    .map(String::as_str)
                    .chain([e.date.to_string().as_str(), e.description.as_str()]),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}
