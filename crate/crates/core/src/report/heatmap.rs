//! SVG heatmap of marker × day prevalence. Darker cells mean higher values.

use std::fmt::Write as _;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::Series;

/// Linear gray ramp in percent luminance; the lowest value of a heatmap maps
/// to `lightest`, the highest to `darkest`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayRamp {
    pub lightest: f64,
    pub darkest: f64,
}

impl Default for GrayRamp {
    fn default() -> Self {
        GrayRamp {
            lightest: 97.0,
            darkest: 8.0,
        }
    }
}

impl GrayRamp {
    /// Luminance (percent) for a value normalized to `[0, 1]`.
    pub fn luminance(&self, norm: f64) -> f64 {
        self.lightest - norm.clamp(0.0, 1.0) * (self.lightest - self.darkest)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapSpec {
    /// Row order, top to bottom.
    pub markers: Vec<String>,
    /// Optional crop; normalization uses only the cropped cells.
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub ramp: GrayRamp,
    pub cell_width: u32,
    pub cell_height: u32,
    pub label_width: u32,
    pub title: Option<String>,
    /// Dates flagged with a tick above the grid (e.g. joint peaks).
    pub peaks: Vec<NaiveDate>,
}

impl Default for HeatmapSpec {
    fn default() -> Self {
        HeatmapSpec {
            markers: Vec::new(),
            from: None,
            to: None,
            ramp: GrayRamp::default(),
            cell_width: 6,
            cell_height: 18,
            label_width: 140,
            title: None,
            peaks: Vec::new(),
        }
    }
}

impl HeatmapSpec {
    pub fn for_markers<S: Into<String>>(markers: impl IntoIterator<Item = S>) -> Self {
        HeatmapSpec {
            markers: markers.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// Renders one row per marker (in `spec.markers` order) and one column per
/// day. Missing cells get a hatch pattern. Output is deterministic.
pub fn render_heatmap<T: Scalar>(series: &[(String, Series<T>)], spec: &HeatmapSpec) -> Result<Vec<u8>> {
    if spec.markers.is_empty() {
        return Err(Error::EmptyMarkers);
    }
    let rows: Vec<(&str, Series<T>)> = spec
        .markers
        .iter()
        .map(|m| {
            let s = series
                .iter()
                .find(|(name, _)| name == m)
                .map(|(_, s)| s)
                .ok_or_else(|| Error::UnknownCategory(m.clone()))?;
            let from = spec.from.unwrap_or(s.start());
            let to = spec.to.unwrap_or(s.date_at(s.len().saturating_sub(1)));
            Ok((m.as_str(), s.slice(from, to)))
        })
        .collect::<Result<_>>()?;
    let axis = &rows[0].1;
    if rows.iter().any(|(_, s)| !s.same_axis(axis)) {
        return Err(Error::DateAxisMismatch);
    }

    let present = rows.iter().flat_map(|(_, s)| s.present().map(Scalar::to_f64_lossy));
    let (lo, hi) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let normalize = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };

    let (cw, ch, lw) = (spec.cell_width.max(1), spec.cell_height.max(1), spec.label_width);
    let days = axis.len() as u32;
    let title_h = if spec.title.is_some() { 22 } else { 0 };
    let top = title_h + 30;
    let width = lw + days * cw + 20;
    let height = top + rows.len() as u32 * ch + 40;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r##"<defs><pattern id="missing" patternUnits="userSpaceOnUse" width="4" height="4"><rect width="4" height="4" fill="#ffffff"/><path d="M0,4 L4,0" stroke="#c03030" stroke-width="0.8"/></pattern></defs>"##
    );
    let _ = writeln!(svg, r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##);
    if let Some(t) = &spec.title {
        let _ = writeln!(svg, r#"<text x="{}" y="16" font-size="14">{}</text>"#, lw, escape(t));
    }

    let _ = writeln!(svg, r#"<g class="months">"#);
    for i in 0..axis.len() {
        let d = axis.date_at(i);
        if i == 0 || d.day() == 1 {
            let x = lw + i as u32 * cw;
            let _ = writeln!(
                svg,
                r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#808080" stroke-width="0.5"/><text x="{}" y="{}">{} {}</text>"##,
                top - 12,
                top,
                x + 2,
                top - 4,
                MONTHS[d.month0() as usize],
                d.year()
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    if !spec.peaks.is_empty() {
        let _ = writeln!(svg, r#"<g class="peaks">"#);
        for p in &spec.peaks {
            if let Some(i) = axis.index_of(*p) {
                let cx = lw + i as u32 * cw + cw / 2;
                let _ = writeln!(
                    svg,
                    r##"<path d="M{},{} L{},{} L{},{} Z" fill="#c03030"><title>peak {}</title></path>"##,
                    cx,
                    top - 1,
                    cx as i64 - 3,
                    top as i64 - 8,
                    cx + 3,
                    top - 8,
                    p
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    for (r, (name, s)) in rows.iter().enumerate() {
        let y = top + r as u32 * ch;
        let _ = writeln!(svg, r#"<g class="row">"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            lw - 6,
            y + ch / 2 + 4,
            escape(name)
        );
        for (i, v) in s.values().iter().enumerate() {
            let x = lw + i as u32 * cw;
            let date = s.date_at(i);
            match v {
                Some(v) => {
                    let v = v.to_f64_lossy();
                    let l = spec.ramp.luminance(normalize(v));
                    let _ = writeln!(
                        svg,
                        r#"<rect class="cell" x="{x}" y="{y}" width="{cw}" height="{ch}" fill="rgb({l}%,{l}%,{l}%)"><title>{} {date} {v}</title></rect>"#,
                        escape(name)
                    );
                }
                None => {
                    let _ = writeln!(
                        svg,
                        r#"<rect class="missing" x="{x}" y="{y}" width="{cw}" height="{ch}" fill="url(#missing)"><title>{} {date} missing</title></rect>"#,
                        escape(name)
                    );
                }
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    let legend_y = top + rows.len() as u32 * ch + 20;
    if lo.is_finite() {
        let _ = writeln!(
            svg,
            r#"<text x="{lw}" y="{legend_y}">lightest = {lo}, darkest = {hi}</text>"#
        );
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg.into_bytes())
}
