use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used by the series, embedding and reporting code: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from a count or index.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::nan)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn hundred() -> Self {
        Self::from_f64_lossy(100.0)
    }

    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic mean and population standard deviation. `None` for an empty slice.
pub fn mean_and_pop_std<T: Scalar>(values: &[T]) -> Option<(T, T)> {
    if values.is_empty() {
        return None;
    }
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values
        .iter()
        .map(|&v| {
            let d = v - mean;
            d * d
        })
        .sum::<T>()
        / n;
    Some((mean, var.sqrt()))
}

/// Median of the values, averaging the two middle elements for even sizes.
/// NaNs must be filtered by the caller.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("median over NaN"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        Some(sorted[mid])
    } else {
        Some((sorted[mid - 1] + sorted[mid]) * T::half())
    }
}
