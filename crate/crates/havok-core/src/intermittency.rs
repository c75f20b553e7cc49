//! Burst statistics of the intermittent forcing: hard-threshold burst
//! detection, duration statistics, histogram density estimation, and
//! the correlation test used for pooled reports.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::havok::ForcingSeries;
use crate::stats;

/// One active-forcing episode, half-open in time: `[t_start, t_end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Burst {
    pub t_start: f64,
    pub t_end: f64,
}

impl Burst {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Result of threshold-based burst detection.
///
/// A sample is active when `vr^2 >= psi * max(vr^2)`. Bursts are maximal
/// runs of active samples; the end time lies one sample past the last
/// active sample, so a single-sample burst has duration `dt`, never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstAnalysis {
    /// Threshold fraction in (0, 1).
    pub psi: f64,
    /// Absolute threshold `psi * max(vr^2)`.
    pub threshold: f64,
    /// Ordered, non-overlapping episodes.
    pub bursts: Vec<Burst>,
    /// Burst durations, seconds.
    pub tb: Vec<f64>,
    /// Gaps between consecutive bursts, seconds.
    pub tib: Vec<f64>,
    /// Bursts shorter than this were dropped.
    pub min_duration: f64,
    /// Bursts closer than this were merged.
    pub merge_gap: f64,
}

/// Summary statistics of the burst and inter-burst durations.
///
/// Means need at least one sample, standard deviations at least two;
/// missing values are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstStatistics {
    pub tb_mean: Option<f64>,
    pub tb_sd: Option<f64>,
    pub tib_mean: Option<f64>,
    pub tib_sd: Option<f64>,
    pub n_bursts: usize,
}

/// Detects active-forcing bursts with the relative hard threshold.
///
/// Processing order: mark active samples, group maximal runs, merge
/// bursts separated by less than `merge_gap`, then drop bursts shorter
/// than `min_duration`. Both knobs default to zero in the calling code,
/// which leaves the bare threshold rule.
pub fn detect_bursts(
    forcing: &ForcingSeries,
    psi: f64,
    min_duration: f64,
    merge_gap: f64,
) -> Result<BurstAnalysis> {
    if psi.is_nan() || psi <= 0.0 || psi >= 1.0 {
        return Err(Error::NonFinite { context: "psi outside (0, 1)" });
    }
    let dt = forcing.dt;
    let max_sq = forcing.vr.iter().map(|v| v * v).fold(0.0f64, f64::max);
    if max_sq <= 0.0 {
        return Err(Error::AllZeroForcing);
    }
    let threshold = psi * max_sq;

    // maximal runs of active samples
    let mut raw: Vec<Burst> = Vec::new();
    let mut run_start: Option<usize> = None;
    for (k, &v) in forcing.vr.iter().enumerate() {
        let active = v * v >= threshold;
        match (active, run_start) {
            (true, None) => run_start = Some(k),
            (false, Some(s)) => {
                raw.push(Burst { t_start: s as f64 * dt, t_end: k as f64 * dt });
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        raw.push(Burst { t_start: s as f64 * dt, t_end: forcing.vr.len() as f64 * dt });
    }

    // merge, then drop short survivors
    let mut merged: Vec<Burst> = Vec::with_capacity(raw.len());
    for b in raw {
        match merged.last_mut() {
            Some(prev) if b.t_start - prev.t_end < merge_gap => prev.t_end = b.t_end,
            _ => merged.push(b),
        }
    }
    let bursts: Vec<Burst> = merged.into_iter().filter(|b| b.duration() >= min_duration.max(f64::MIN_POSITIVE)).collect();

    let tb: Vec<f64> = bursts.iter().map(Burst::duration).collect();
    let tib: Vec<f64> = bursts.windows(2).map(|w| w[1].t_start - w[0].t_end).collect();
    Ok(BurstAnalysis { psi, threshold, bursts, tb, tib, min_duration, merge_gap })
}

pub fn burst_statistics(analysis: &BurstAnalysis) -> BurstStatistics {
    let (tb_mean, tb_sd) = stats::mean_sd(&analysis.tb);
    let (tib_mean, tib_sd) = stats::mean_sd(&analysis.tib);
    BurstStatistics { tb_mean, tb_sd, tib_mean, tib_sd, n_bursts: analysis.bursts.len() }
}

/// Histogram binning rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning {
    /// Bin width `2 IQR / n^(1/3)`.
    FreedmanDiaconis,
    /// Caller-specified bin count.
    Fixed(usize),
}

/// Histogram-based density estimate with moment summaries and a
/// Gaussian reference of matching mean and standard deviation for
/// overlay plots.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionEstimate {
    /// Bin edges, length `bins + 1`.
    pub bin_edges: Vec<f64>,
    /// Density per bin; integrates to one.
    pub density: Vec<f64>,
    /// Gaussian density with the sample mean and SD, at bin centers.
    pub gaussian_ref: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    /// Fisher excess kurtosis (zero for a Gaussian).
    pub excess_kurtosis: f64,
    /// Empirical probability of landing more than three SDs from the mean.
    pub tail_mass_3sigma: f64,
}

impl DistributionEstimate {
    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn estimate_pdf(samples: &[f64], binning: Binning) -> Result<DistributionEstimate> {
    if samples.len() < 8 {
        return Err(Error::TooShort { needed: 8, got: samples.len() });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "pdf samples" });
    }
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = sorted[0];
    let hi = sorted[n - 1];
    if hi <= lo {
        return Err(Error::DegenerateVariance);
    }

    let bins = match binning {
        Binning::Fixed(k) => k.max(1),
        Binning::FreedmanDiaconis => {
            let q = |f: f64| -> f64 {
                // linear-interpolated quantile
                let pos = f * (n - 1) as f64;
                let i = pos as usize;
                let frac = pos - i as f64;
                if i + 1 < n {
                    sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
                } else {
                    sorted[i]
                }
            };
            let iqr = q(0.75) - q(0.25);
            if iqr > 0.0 {
                let width = 2.0 * iqr / libm::cbrt(n as f64);
                (libm::ceil((hi - lo) / width) as usize).clamp(1, 4096)
            } else {
                // heavy ties; fall back to a square-root rule
                (libm::ceil(libm::sqrt(n as f64)) as usize).clamp(1, 4096)
            }
        }
    };

    let width = (hi - lo) / bins as f64;
    let mut counts = alloc::vec![0usize; bins];
    for &x in samples {
        let mut idx = ((x - lo) / width) as usize;
        if idx >= bins {
            idx = bins - 1;
        }
        counts[idx] += 1;
    }
    let density: Vec<f64> =
        counts.iter().map(|&c| c as f64 / (n as f64 * width)).collect();
    let bin_edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * width).collect();

    let mean = stats::mean(samples).unwrap_or(0.0);
    let sd = stats::sample_sd(samples).unwrap_or(0.0);
    let excess_kurtosis = stats::excess_kurtosis(samples);
    let tail = samples.iter().filter(|&&x| (x - mean).abs() > 3.0 * sd).count();
    let tail_mass_3sigma = tail as f64 / n as f64;

    let gaussian_ref: Vec<f64> = bin_edges
        .windows(2)
        .map(|w| {
            let c = 0.5 * (w[0] + w[1]);
            let z = (c - mean) / sd;
            libm::exp(-0.5 * z * z) / (sd * libm::sqrt(2.0 * core::f64::consts::PI))
        })
        .collect();

    Ok(DistributionEstimate {
        bin_edges,
        density,
        gaussian_ref,
        mean,
        sd,
        excess_kurtosis,
        tail_mass_3sigma,
    })
}

/// Pearson correlation with a two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonResult {
    pub r: f64,
    pub p_value: f64,
}

/// Bivariate Pearson test: `r` plus the two-tailed p-value from
/// `t = r sqrt((n-2) / (1-r^2))` under Student's t with `n - 2`
/// degrees of freedom.
pub fn pearson_test(x: &[f64], y: &[f64]) -> Result<PearsonResult> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::ShortSeries { needed: 3, got: x.len().min(y.len()) });
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::ConstantInput);
    }
    let r = stats::pearson_r(x, y);
    let df = (x.len() - 2) as f64;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * libm::sqrt(df / (1.0 - r * r));
        stats::student_t_two_sided_p(t, df)
    };
    Ok(PearsonResult { r, p_value })
}
