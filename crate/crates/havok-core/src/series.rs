//! Uniformly sampled scalar measurement.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A uniformly sampled scalar time series `z(t)`.
///
/// Invariants enforced by [`TimeSeries::new`]: at least two samples,
/// strictly positive sample interval, all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Sample values.
    pub values: Vec<f64>,
    /// Seconds per sample (> 0).
    pub dt: f64,
    /// Time of the first sample in seconds.
    pub t0: f64,
    /// Free-text label carried through reports.
    pub label: String,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dt: f64, t0: f64, label: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort { needed: 2, got: values.len() });
        }
        if dt.is_nan() || dt <= 0.0 || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::NonFinite { context: "time series sampling parameters" });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "time series values" });
        }
        Ok(Self { values, dt, t0, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sampling frequency in Hz.
    pub fn fs(&self) -> f64 {
        1.0 / self.dt
    }

    /// Time of sample `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Total covered duration in seconds (`n * dt`).
    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    /// Extracts the samples whose timestamps fall in `[t_a, t_b)`.
    pub fn segment(&self, t_a: f64, t_b: f64) -> Result<TimeSeries> {
        if t_b.is_nan() || t_a.is_nan() || t_b <= t_a {
            return Err(Error::WindowOutOfRange { start: t_a, end: t_b });
        }
        let first = libm::ceil((t_a - self.t0) / self.dt - 1e-9) as i64;
        let last = libm::ceil((t_b - self.t0) / self.dt - 1e-9) as i64; // exclusive
        if first < 0 || last > self.values.len() as i64 || last - first < 2 {
            return Err(Error::WindowOutOfRange { start: t_a, end: t_b });
        }
        let (first, last) = (first as usize, last as usize);
        TimeSeries::new(
            self.values[first..last].to_vec(),
            self.dt,
            self.time_at(first),
            self.label.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_short_and_nonfinite() {
        assert!(matches!(
            TimeSeries::new(vec![1.0], 1.0, 0.0, ""),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(
            TimeSeries::new(vec![1.0, f64::NAN], 1.0, 0.0, ""),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            TimeSeries::new(vec![1.0, 2.0], 0.0, 0.0, ""),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn segment_is_half_open() {
        let ts = TimeSeries::new((0..10).map(|k| k as f64).collect(), 0.5, 0.0, "x").unwrap();
        let seg = ts.segment(1.0, 3.0).unwrap();
        assert_eq!(seg.values, vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(seg.t0, 1.0);
        assert!(ts.segment(4.0, 10.0).is_err());
    }
}
