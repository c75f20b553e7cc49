//! ECG front end: bandpass filtering, R-peak detection, RR intervals,
//! per-minute HRV features, and the burst/annotation association used
//! by the case-study reports.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filter;
use crate::intermittency::{pearson_test, BurstAnalysis};
use crate::series::TimeSeries;
use crate::stats;

/// Raw or filtered ECG samples.
#[derive(Debug, Clone)]
pub struct EcgRecord {
    /// Amplitude in millivolts.
    pub samples: Vec<f64>,
    /// Sampling frequency in Hz.
    pub fs: f64,
    pub record_id: String,
}

/// R-peak times and the RR intervals between consecutive accepted peaks.
#[derive(Debug, Clone, PartialEq)]
pub struct RrSeries {
    /// Seconds from the start of the record, strictly increasing.
    pub peak_times: Vec<f64>,
    /// `rr[k] = peak_times[k+1] - peak_times[k]`.
    pub rr: Vec<f64>,
    /// Peak detections discarded by the refractory, range, or
    /// local-median rules.
    pub rejected_count: usize,
}

/// Expert minute-by-minute breathing labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinuteLabel {
    Normal,
    Apnea,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationTrack {
    /// One label per minute.
    pub minute_labels: Vec<MinuteLabel>,
    /// Time of the first labeled minute, seconds.
    pub t0: f64,
}

/// Per-minute HRV summary; feature fields are `None` when the window
/// holds fewer than [`MIN_BEATS_PER_WINDOW`] beats.
#[derive(Debug, Clone, PartialEq)]
pub struct HrvFrame {
    pub minute_index: usize,
    pub n_beats: usize,
    /// Triangular index: interval count over the tallest histogram bin.
    pub tri: Option<f64>,
    pub mean_rr: Option<f64>,
    pub sdnn: Option<f64>,
    pub rmssd: Option<f64>,
    pub pnn50: Option<f64>,
}

/// Windows with fewer beats than this are null-flagged.
pub const MIN_BEATS_PER_WINDOW: usize = 8;

/// Which HRV feature to pull into a scalar series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrvFeature {
    Tri,
    MeanRr,
    Sdnn,
    Rmssd,
    Pnn50,
}

/// Zero-phase (or single-pass) Butterworth bandpass of an ECG record.
pub fn bandpass_butterworth(
    ecg: &EcgRecord,
    low: f64,
    high: f64,
    order: usize,
    zero_phase: bool,
) -> Result<EcgRecord> {
    if ecg.samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "ecg samples" });
    }
    let filt = filter::butterworth_bandpass(order, low, high, ecg.fs)?;
    let samples = if zero_phase { filt.filtfilt(&ecg.samples) } else { filt.filter(&ecg.samples) };
    Ok(EcgRecord { samples, fs: ecg.fs, record_id: ecg.record_id.clone() })
}

/// R-peak detection on a filtered ECG.
///
/// Derivative, squaring, and a 150 ms moving-window integration feed an
/// adaptive dual-threshold peak picker with a 200 ms refractory period.
/// Detected peaks are refined to the largest absolute deflection of the
/// input signal near the integration peak. Peaks implying an RR below
/// 0.3 s or deviating more than 20% from the median of the last five
/// accepted intervals are discarded and counted.
pub fn detect_rpeaks(ecg: &EcgRecord) -> Result<RrSeries> {
    let fs = ecg.fs;
    let x = &ecg.samples;
    let n = x.len();
    if n < (fs as usize) * 2 {
        return Err(Error::NoBeats);
    }

    // five-point derivative, squared
    let mut energy = alloc::vec![0.0f64; n];
    for k in 4..n {
        let d = (2.0 * x[k] + x[k - 1] - x[k - 3] - 2.0 * x[k - 4]) / 8.0;
        energy[k] = d * d;
    }
    // 150 ms moving-window integration
    let w = ((0.150 * fs) as usize).max(1);
    let mut mwi = alloc::vec![0.0f64; n];
    let mut acc = 0.0;
    for k in 0..n {
        acc += energy[k];
        if k >= w {
            acc -= energy[k - w];
        }
        mwi[k] = acc / w as f64;
    }

    // local maxima of the integrated energy
    let mut candidates: Vec<usize> = Vec::new();
    for k in 1..n - 1 {
        if mwi[k] > mwi[k - 1] && mwi[k] >= mwi[k + 1] && mwi[k] > 0.0 {
            candidates.push(k);
        }
    }
    if candidates.is_empty() {
        return Err(Error::NoBeats);
    }

    // adaptive dual thresholds seeded from the first two seconds
    let lead = (2.0 * fs) as usize;
    let lead_max = mwi[..lead.min(n)].iter().cloned().fold(0.0f64, f64::max);
    let mut spki = 0.5 * lead_max;
    let mut npki = 0.1 * lead_max;
    let refractory = 0.200 * fs; // samples
    let search = (0.150 * fs) as usize;

    let mut peaks: Vec<usize> = Vec::new(); // refined sample indices
    let mut rejected = 0usize;
    let mut last_mwi_peak: f64 = f64::NEG_INFINITY;
    for &k in &candidates {
        let threshold = npki + 0.25 * (spki - npki);
        if mwi[k] < threshold {
            npki = 0.125 * mwi[k] + 0.875 * npki;
            continue;
        }
        // refine against the signal itself; MWI lags the R wave by about
        // half the integration window
        let center = k.saturating_sub(w / 2);
        let lo = center.saturating_sub(search);
        let hi = (center + search + 1).min(n);
        let mut best = lo;
        for j in lo..hi {
            if x[j].abs() > x[best].abs() {
                best = j;
            }
        }
        if let Some(&prev) = peaks.last() {
            if (best as f64 - prev as f64) < refractory {
                // same beat seen twice in the integrated energy; keep
                // the stronger detection, without counting a rejection
                if mwi[k] > last_mwi_peak {
                    peaks.pop();
                    peaks.push(best);
                    last_mwi_peak = mwi[k];
                }
                continue;
            }
        }
        peaks.push(best);
        last_mwi_peak = mwi[k];
        spki = 0.125 * mwi[k] + 0.875 * spki;
    }
    if peaks.len() < 2 {
        return Err(Error::NoBeats);
    }

    // interval gating: drop peaks that imply implausible RRs
    let mut accepted: Vec<f64> = Vec::with_capacity(peaks.len());
    let mut recent: Vec<f64> = Vec::new();
    for &p in &peaks {
        let t = p as f64 / fs;
        match accepted.last() {
            None => accepted.push(t),
            Some(&last) => {
                let rr = t - last;
                if rr < 0.3 {
                    rejected += 1;
                    continue;
                }
                if recent.len() >= 3 {
                    let mut sorted = recent.clone();
                    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let median = sorted[sorted.len() / 2];
                    if rr <= 2.0 && (rr - median).abs() > 0.2 * median {
                        rejected += 1;
                        continue;
                    }
                }
                accepted.push(t);
                if rr <= 2.0 {
                    recent.push(rr);
                    if recent.len() > 5 {
                        recent.remove(0);
                    }
                }
            }
        }
    }
    if accepted.len() < 2 {
        return Err(Error::NoBeats);
    }
    let rr: Vec<f64> = accepted.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(RrSeries { peak_times: accepted, rr, rejected_count: rejected })
}

/// Splits the RR series into consecutive windows (default one minute)
/// and computes the HRV features per window.
///
/// An interval belongs to the window containing its completing beat.
/// The triangular index bins intervals at `tri_binwidth` (1/128 s by
/// convention) and divides the interval count by the tallest bin.
pub fn hrv_features(rr: &RrSeries, window: f64, tri_binwidth: f64) -> Vec<HrvFrame> {
    let last = rr.peak_times.last().copied().unwrap_or(0.0);
    let n_windows = (last / window) as usize;
    let mut frames = Vec::with_capacity(n_windows);
    for m in 0..n_windows {
        let w_start = m as f64 * window;
        let w_end = w_start + window;
        let n_beats =
            rr.peak_times.iter().filter(|&&t| t >= w_start && t < w_end).count();
        // intervals completing inside the window
        let intervals: Vec<f64> = rr
            .rr
            .iter()
            .zip(rr.peak_times.iter().skip(1))
            .filter(|(_, &t_end)| t_end >= w_start && t_end < w_end)
            .map(|(&v, _)| v)
            .collect();
        if n_beats < MIN_BEATS_PER_WINDOW || intervals.is_empty() {
            frames.push(HrvFrame {
                minute_index: m,
                n_beats,
                tri: None,
                mean_rr: None,
                sdnn: None,
                rmssd: None,
                pnn50: None,
            });
            continue;
        }
        let mut bins: alloc::collections::BTreeMap<i64, usize> = alloc::collections::BTreeMap::new();
        for &v in &intervals {
            *bins.entry((v / tri_binwidth) as i64).or_insert(0) += 1;
        }
        let tallest = bins.values().copied().max().unwrap_or(1);
        let tri = intervals.len() as f64 / tallest as f64;

        let diffs: Vec<f64> = intervals.windows(2).map(|w| w[1] - w[0]).collect();
        let rmssd = if diffs.is_empty() {
            None
        } else {
            Some(libm::sqrt(diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64))
        };
        let pnn50 = if diffs.is_empty() {
            None
        } else {
            Some(diffs.iter().filter(|d| d.abs() > 0.050).count() as f64 / diffs.len() as f64)
        };
        frames.push(HrvFrame {
            minute_index: m,
            n_beats,
            tri: Some(tri),
            mean_rr: stats::mean(&intervals),
            sdnn: stats::sample_sd(&intervals),
            rmssd,
            pnn50,
        });
    }
    frames
}

/// Maximum run of missing windows that linear interpolation will fill.
pub const MAX_GAP_MINUTES: usize = 3;

/// Pulls one feature out of the HRV frames as a uniformly sampled
/// series with `dt` equal to the window length (60 s windows give the
/// one-minute series the embedding expects).
///
/// Leading and trailing missing windows are trimmed; interior runs of
/// up to [`MAX_GAP_MINUTES`] missing windows are filled by linear
/// interpolation, longer runs abort.
pub fn feature_series(frames: &[HrvFrame], feature: HrvFeature, window: f64) -> Result<TimeSeries> {
    let pick = |f: &HrvFrame| -> Option<f64> {
        match feature {
            HrvFeature::Tri => f.tri,
            HrvFeature::MeanRr => f.mean_rr,
            HrvFeature::Sdnn => f.sdnn,
            HrvFeature::Rmssd => f.rmssd,
            HrvFeature::Pnn50 => f.pnn50,
        }
    };
    let raw: Vec<Option<f64>> = frames.iter().map(pick).collect();
    let valid = raw.iter().filter(|v| v.is_some()).count();
    let first = raw.iter().position(Option::is_some);
    let last = raw.iter().rposition(Option::is_some);
    let (first, last) = match (first, last) {
        (Some(a), Some(b)) if b > a => (a, b),
        _ => return Err(Error::SeriesTooShort { needed: 2, got: valid }),
    };

    let mut values = Vec::with_capacity(last - first + 1);
    let mut k = first;
    while k <= last {
        match raw[k] {
            Some(v) => {
                values.push(v);
                k += 1;
            }
            None => {
                let gap_start = k;
                while raw[k].is_none() {
                    k += 1;
                }
                let gap = k - gap_start;
                if gap > MAX_GAP_MINUTES {
                    return Err(Error::GapTooLong { gap_minutes: gap, max_minutes: MAX_GAP_MINUTES });
                }
                let left = values[values.len() - 1];
                let right = raw[k].unwrap();
                for j in 0..gap {
                    let frac = (j + 1) as f64 / (gap + 1) as f64;
                    values.push(left + frac * (right - left));
                }
            }
        }
    }
    TimeSeries::new(values, window, first as f64 * window, "hrv feature")
}

/// Association between detected bursts and the expert labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationResult {
    /// Fraction of bursts that touch at least one apnea-labeled minute.
    pub overlap_fraction: f64,
    /// Point-biserial correlation between the per-minute active-forcing
    /// indicator and the label; `None` when undefined.
    pub point_biserial_r: Option<f64>,
    pub p_value: Option<f64>,
    /// Why the correlation is missing, when it is.
    pub note: Option<String>,
}

/// Correlates burst timing with the minute labels.
///
/// Both inputs must share the same time origin. Each minute gets an
/// active-forcing indicator (any burst overlap); the indicator is then
/// correlated against the binary label.
pub fn burst_annotation_association(
    bursts: &BurstAnalysis,
    ann: &AnnotationTrack,
) -> AssociationResult {
    let minutes = ann.minute_labels.len();
    let minute_span = |m: usize| {
        let start = ann.t0 + m as f64 * 60.0;
        (start, start + 60.0)
    };

    let mut indicator = alloc::vec![0.0f64; minutes];
    for (m, slot) in indicator.iter_mut().enumerate() {
        let (a, b) = minute_span(m);
        if bursts.bursts.iter().any(|x| x.t_start < b && x.t_end > a) {
            *slot = 1.0;
        }
    }
    let labels: Vec<f64> = ann
        .minute_labels
        .iter()
        .map(|l| if *l == MinuteLabel::Apnea { 1.0 } else { 0.0 })
        .collect();

    let overlap_fraction = if bursts.bursts.is_empty() {
        0.0
    } else {
        let touching = bursts
            .bursts
            .iter()
            .filter(|x| {
                (0..minutes).any(|m| {
                    let (a, b) = minute_span(m);
                    ann.minute_labels[m] == MinuteLabel::Apnea && x.t_start < b && x.t_end > a
                })
            })
            .count();
        touching as f64 / bursts.bursts.len() as f64
    };

    if bursts.bursts.is_empty() {
        return AssociationResult {
            overlap_fraction,
            point_biserial_r: None,
            p_value: None,
            note: Some(String::from("no bursts detected")),
        };
    }
    match pearson_test(&indicator, &labels) {
        Ok(res) => AssociationResult {
            overlap_fraction,
            point_biserial_r: Some(res.r),
            p_value: Some(res.p_value),
            note: None,
        },
        Err(e) => AssociationResult {
            overlap_fraction,
            point_biserial_r: None,
            p_value: None,
            note: Some(alloc::format!("correlation undefined: {e}")),
        },
    }
}
