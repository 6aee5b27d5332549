//! Crisis-stage windows and the per-stage prevalence difference table.

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{median, Scalar};
use crate::series::Series;

/// A labeled inclusive date window. Windows of different stages may overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageWindow {
    pub stage: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl StageWindow {
    pub fn new(stage: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidRange { start, end });
        }
        Ok(StageWindow {
            stage: stage.into(),
            start,
            end,
        })
    }
}

/// Reads `stage,start,end` rows (with header).
pub fn read_stages_csv<R: Read>(r: R) -> Result<Vec<StageWindow>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize::<StageWindow>()
        .map(|rec| {
            let w = rec?;
            StageWindow::new(w.stage, w.start, w.end)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRow<T> {
    pub marker: String,
    /// Median of the marker's present values over the whole series.
    pub median: Option<T>,
    /// One cell per stage, in the table's stage order. `None` when the
    /// median is zero or the stage window holds no present values.
    pub cells: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTable<T> {
    pub stages: Vec<String>,
    pub rows: Vec<StageRow<T>>,
}

impl<T: Scalar> StageTable<T> {
    /// Stage holding the marker's largest cell.
    pub fn best_stage(&self, marker: &str) -> Option<&str> {
        let row = self.rows.iter().find(|r| r.marker == marker)?;
        row.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|v| (i, v)))
            .fold(None, |best: Option<(usize, T)>, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
            .map(|(i, _)| self.stages[i].as_str())
    }

    pub fn cell(&self, marker: &str, stage: &str) -> Option<T> {
        let s = self.stages.iter().position(|x| x == stage)?;
        self.rows.iter().find(|r| r.marker == marker)?.cells[s]
    }

    /// `marker,stage,max_pct_diff`, empty cell when undefined.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["marker", "stage", "max_pct_diff"])?;
        for row in &self.rows {
            for (stage, cell) in self.stages.iter().zip(&row.cells) {
                out.write_record([
                    row.marker.as_str(),
                    stage.as_str(),
                    &cell.map(|v| v.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// For each marker and stage: the largest daily deviation from the marker's
/// overall median within the stage window, as a percentage of the median.
pub fn stage_prevalence_table<T: Scalar>(series: &[(String, Series<T>)], stages: &[StageWindow]) -> StageTable<T> {
    let rows = series
        .iter()
        .map(|(marker, s)| {
            let present: Vec<T> = s.present().collect();
            let med = median(&present);
            let cells = stages
                .iter()
                .map(|w| {
                    let med = med.filter(|m| *m != T::zero())?;
                    s.values()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| {
                            let d = s.date_at(*i);
                            w.start <= d && d <= w.end
                        })
                        .filter_map(|(_, v)| *v)
                        .map(|v| T::hundred() * (v - med) / med)
                        .fold(None, |acc: Option<T>, x| Some(acc.map_or(x, |a| a.max(x))))
                })
                .collect();
            StageRow {
                marker: marker.clone(),
                median: med,
                cells,
            }
        })
        .collect();
    StageTable {
        stages: stages.iter().map(|w| w.stage.clone()).collect(),
        rows,
    }
}
