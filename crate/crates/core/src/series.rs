//! Daily series with missing values, trailing smoothing, gradients, and
//! peak detection by topographic prominence.

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{mean_and_pop_std, Scalar};

pub const DEFAULT_WINDOW: usize = 7;
pub const DEFAULT_SIGMA_MULT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Raw,
    Smoothed,
    Gradient,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Raw => "raw",
            SeriesKind::Smoothed => "smoothed",
            SeriesKind::Gradient => "gradient",
        }
    }
}

/// Values over contiguous calendar days starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    start: NaiveDate,
    values: Vec<Option<T>>,
    kind: SeriesKind,
}

impl<T: Scalar> Series<T> {
    /// Non-finite values are stored as missing.
    pub fn new(start: NaiveDate, values: Vec<Option<T>>, kind: SeriesKind) -> Self {
        let values = values.into_iter().map(|v| v.filter(|x| x.is_finite())).collect();
        Series { start, values, kind }
    }

    pub fn raw(start: NaiveDate, values: &[T]) -> Self {
        Series::new(start, values.iter().map(|&v| Some(v)).collect(), SeriesKind::Raw)
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<T>] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<T> {
        self.values.get(i).copied().flatten()
    }

    pub fn date_at(&self, i: usize) -> NaiveDate {
        self.start + Days::new(i as u64)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.len()).map(|i| self.date_at(i))
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let d = (date - self.start).num_days();
        (d >= 0 && (d as usize) < self.len()).then_some(d as usize)
    }

    pub fn present(&self) -> impl Iterator<Item = T> + '_ {
        self.values.iter().filter_map(|v| *v)
    }

    pub fn same_axis(&self, other: &Series<T>) -> bool {
        self.start == other.start && self.len() == other.len()
    }

    /// Applies `f` to present values.
    pub fn map(&self, f: impl Fn(T) -> T) -> Series<T> {
        Series::new(self.start, self.values.iter().map(|v| v.map(&f)).collect(), self.kind)
    }

    pub fn with_kind(mut self, kind: SeriesKind) -> Self {
        self.kind = kind;
        self
    }

    /// The sub-series covering `[from, to]` clipped to this series.
    pub fn slice(&self, from: NaiveDate, to: NaiveDate) -> Series<T> {
        let lo = (from - self.start).num_days().max(0) as usize;
        let hi = ((to - self.start).num_days() + 1).clamp(0, self.len() as i64) as usize;
        let lo = lo.min(hi);
        Series {
            start: self.date_at(lo),
            values: self.values[lo..hi].to_vec(),
            kind: self.kind,
        }
    }
}

/// Trailing moving average over present values: `out[i]` is the mean of the
/// present values in `in[i-window+1 ..= i]` (a shorter prefix at the leading
/// edge), or missing if the window holds none. A window of 0 acts as 1.
pub fn smooth<T: Scalar>(s: &Series<T>, window: usize) -> Series<T> {
    let window = window.max(1);
    let vals = s.values();
    let out = (0..vals.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let mut present = vals[lo..=i].iter().flatten().copied();
            let first = present.next()?;
            // shifted by the first value so that constant windows are exact
            let (sum, n) = present.fold((T::zero(), 1usize), |(s, n), v| (s + (v - first), n + 1));
            Some(first + sum / T::from_count(n))
        })
        .collect();
    Series::new(s.start, out, SeriesKind::Smoothed)
}

/// Central differences inside, one-sided differences at the ends. Any
/// difference touching a missing value is missing.
pub fn gradient<T: Scalar>(s: &Series<T>) -> Result<Series<T>> {
    let n = s.len();
    if n < 2 {
        return Err(Error::SeriesTooShort(n));
    }
    let v = s.values();
    let mut out = Vec::with_capacity(n);
    out.push(match (v[0], v[1]) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    });
    for i in 1..n - 1 {
        out.push(match (v[i - 1], v[i], v[i + 1]) {
            (Some(a), Some(_), Some(c)) => Some((c - a) * T::half()),
            _ => None,
        });
    }
    out.push(match (v[n - 2], v[n - 1]) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    });
    Ok(Series::new(s.start, out, SeriesKind::Gradient))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Rise,
    Fall,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Rise => "rise",
            Direction::Fall => "fall",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub date: NaiveDate,
    pub index: usize,
    /// Value of the analyzed signal at the peak. For fall peaks of a
    /// gradient this is the (negative) gradient value.
    pub height: T,
    pub prominence: T,
    pub direction: Direction,
}

/// Local maxima of the present-value runs of `s` with their prominence.
///
/// A peak is strictly above both neighbors; a flat top counts once, at its
/// leftmost index, when strictly above the values on either side. Missing
/// values split the series and run boundaries are never peaks. Prominence
/// is the height minus the higher of the two minima found walking outwards
/// until a strictly higher value or the run boundary.
pub fn find_peaks<T: Scalar>(s: &Series<T>) -> Vec<Peak<T>> {
    let v = s.values();
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < v.len() {
        if v[i].is_none() {
            i += 1;
            continue;
        }
        let start = i;
        while i < v.len() && v[i].is_some() {
            i += 1;
        }
        let run: Vec<T> = v[start..i].iter().map(|x| x.expect("present run")).collect();
        for (j, prom) in run_peaks(&run) {
            let index = start + j;
            peaks.push(Peak {
                date: s.date_at(index),
                index,
                height: run[j],
                prominence: prom,
                direction: Direction::Rise,
            });
        }
    }
    peaks
}

fn run_peaks<T: Scalar>(x: &[T]) -> Vec<(usize, T)> {
    let n = x.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            let mut end = i;
            while end + 1 < n && x[end + 1] == x[i] {
                end += 1;
            }
            if end + 1 < n && x[end + 1] < x[i] {
                out.push((i, prominence(x, i)));
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence<T: Scalar>(x: &[T], i: usize) -> T {
    let h = x[i];
    let mut left_min = h;
    for &y in x[..i].iter().rev() {
        if y > h {
            break;
        }
        left_min = left_min.min(y);
    }
    let mut right_min = h;
    for &y in &x[i + 1..] {
        if y > h {
            break;
        }
        right_min = right_min.min(y);
    }
    h - left_min.max(right_min)
}

/// Keeps peaks whose prominence is strictly above `mean + sigma_mult * std`
/// of the candidates' prominences (population std).
pub fn filter_peaks<T: Scalar>(peaks: &[Peak<T>], sigma_mult: f64) -> Vec<Peak<T>> {
    let proms: Vec<T> = peaks.iter().map(|p| p.prominence).collect();
    let Some((mean, std)) = mean_and_pop_std(&proms) else {
        return Vec::new();
    };
    let threshold = mean + T::from_f64_lossy(sigma_mult) * std;
    peaks.iter().filter(|p| p.prominence > threshold).copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Smoothing window in days.
    pub window: usize,
    /// Prominence threshold in standard deviations above the mean.
    pub sigma_mult: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            window: DEFAULT_WINDOW,
            sigma_mult: DEFAULT_SIGMA_MULT,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::InvalidConfig("window must be at least 1 day".into()));
        }
        if !self.sigma_mult.is_finite() {
            return Err(Error::InvalidConfig("sigma multiplier must be finite".into()));
        }
        Ok(())
    }
}

/// smooth → gradient → smooth, the signal peaks are detected on.
pub fn smoothed_gradient<T: Scalar>(raw: &Series<T>, window: usize) -> Result<Series<T>> {
    let g = gradient(&smooth(raw, window))?;
    Ok(smooth(&g, window))
}

/// Rise and fall peaks of one marker's smoothed gradient, each direction
/// filtered on its own candidate set. Sorted by index.
pub fn marker_peaks<T: Scalar>(raw: &Series<T>, cfg: &AnalysisConfig) -> Result<Vec<Peak<T>>> {
    let sg = smoothed_gradient(raw, cfg.window)?;
    let mut peaks = filter_peaks(&find_peaks(&sg), cfg.sigma_mult);
    let falls = filter_peaks(&find_peaks(&sg.map(|v| -v)), cfg.sigma_mult);
    peaks.extend(falls.into_iter().map(|p| Peak {
        height: -p.height,
        direction: Direction::Fall,
        ..p
    }));
    peaks.sort_by_key(|p| (p.index, p.direction == Direction::Fall));
    Ok(peaks)
}

/// Subtracts the mean and divides by the population std of present values;
/// a constant series maps to zeros.
pub fn z_normalize<T: Scalar>(s: &Series<T>) -> Series<T> {
    let present: Vec<T> = s.present().collect();
    match mean_and_pop_std(&present) {
        Some((mean, std)) if std > T::zero() => s.map(|v| (v - mean) / std),
        Some(_) => s.map(|_| T::zero()),
        None => s.clone(),
    }
}

/// Cross-marker change signal: the pointwise mean of the z-normalized
/// smoothed gradients (signed), and of their absolute values. Points where
/// every marker is missing stay missing.
pub fn joint_signal<T: Scalar>(markers: &[Series<T>], window: usize) -> Result<(Series<T>, Series<T>)> {
    let first = markers.first().ok_or(Error::EmptyMarkers)?;
    if markers.iter().any(|m| !m.same_axis(first)) {
        return Err(Error::DateAxisMismatch);
    }
    let zs: Vec<Series<T>> = markers
        .iter()
        .map(|m| smoothed_gradient(m, window).map(|sg| z_normalize(&sg)))
        .collect::<Result<_>>()?;
    let mut signed = Vec::with_capacity(first.len());
    let mut magnitude = Vec::with_capacity(first.len());
    for i in 0..first.len() {
        let present: Vec<T> = zs.iter().filter_map(|z| z.get(i)).collect();
        if present.is_empty() {
            signed.push(None);
            magnitude.push(None);
            continue;
        }
        let n = T::from_count(present.len());
        signed.push(Some(present.iter().copied().sum::<T>() / n));
        magnitude.push(Some(present.iter().map(|v| v.abs()).sum::<T>() / n));
    }
    Ok((
        Series::new(first.start, signed, SeriesKind::Smoothed),
        Series::new(first.start, magnitude, SeriesKind::Smoothed),
    ))
}

/// Peaks of the cross-marker change magnitude. Each peak is labeled rise or
/// fall by the sign of the mean signed change at that day.
pub fn joint_peaks<T: Scalar>(markers: &[Series<T>], cfg: &AnalysisConfig) -> Result<Vec<Peak<T>>> {
    let (signed, magnitude) = joint_signal(markers, cfg.window)?;
    Ok(filter_peaks(&find_peaks(&magnitude), cfg.sigma_mult)
        .into_iter()
        .map(|p| Peak {
            direction: if signed.get(p.index).unwrap_or_else(T::zero) < T::zero() {
                Direction::Fall
            } else {
                Direction::Rise
            },
            ..p
        })
        .collect())
}
