//! Single-sided amplitude spectrum and the 95%-energy dominant band.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fft;
use crate::series::TimeSeries;

/// Single-sided spectrum of a real signal.
///
/// `amplitude[k]` is the amplitude of the sinusoid at `freqs[k]`; interior
/// bins carry the factor two from folding negative frequencies, the DC and
/// Nyquist bins do not. `power` is the squared amplitude, used only in
/// normalized form by the band search.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Bin frequencies in Hz, ascending from 0 to fs/2.
    pub freqs: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub power: Vec<f64>,
    /// Dominant band `[f_L, f_H]`, set by [`dominant_bandwidth`].
    pub band: Option<(f64, f64)>,
    /// Energy fraction the band was computed for.
    pub band_energy_fraction: Option<f64>,
}

/// Computes the single-sided amplitude spectrum.
pub fn amplitude_spectrum(x: &TimeSeries) -> Result<SpectrumResult> {
    if x.len() < 4 {
        return Err(Error::TooShort { needed: 4, got: x.len() });
    }
    let n = x.len();
    let v = fft::fft_forward(&x.values);
    let fs = x.fs();
    let half = n / 2; // highest single-sided bin index
    let mut freqs = Vec::with_capacity(half + 1);
    let mut amplitude = Vec::with_capacity(half + 1);
    let mut power = Vec::with_capacity(half + 1);
    for (k, bin) in v.iter().take(half + 1).enumerate() {
        let is_edge = k == 0 || (n.is_multiple_of(2) && k == half);
        let scale = if is_edge { 1.0 } else { 2.0 };
        let a = scale * bin.norm() / n as f64;
        freqs.push(k as f64 * fs / n as f64);
        amplitude.push(a);
        power.push(a * a);
    }
    Ok(SpectrumResult { freqs, amplitude, power, band: None, band_energy_fraction: None })
}

/// Finds the band `[f_L, f_H]` containing `energy_fraction` of the
/// non-DC power by trimming `(1 - energy_fraction) / 2` of cumulative
/// power from each side.
pub fn dominant_bandwidth(spec: &SpectrumResult, energy_fraction: f64) -> Result<(f64, f64)> {
    if energy_fraction.is_nan() || energy_fraction <= 0.0 || energy_fraction >= 1.0 {
        return Err(Error::NonFinite { context: "energy fraction outside (0, 1)" });
    }
    let total: f64 = spec.power.iter().skip(1).sum();
    if total <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let tail = 0.5 * (1.0 - energy_fraction);
    let lo_target = tail * total;
    let hi_target = (1.0 - tail) * total;
    let mut cum = 0.0;
    let mut f_l = None;
    let mut f_h = None;
    for (k, &p) in spec.power.iter().enumerate().skip(1) {
        cum += p;
        if f_l.is_none() && cum >= lo_target {
            f_l = Some(spec.freqs[k]);
        }
        if f_h.is_none() && cum >= hi_target {
            f_h = Some(spec.freqs[k]);
            break;
        }
    }
    let f_l = f_l.expect("cumulative power reaches the lower target");
    let f_h = f_h.unwrap_or_else(|| *spec.freqs.last().unwrap());
    Ok((f_l, f_h))
}

/// Attaches the dominant band to a spectrum in place.
pub fn with_dominant_band(mut spec: SpectrumResult, energy_fraction: f64) -> Result<SpectrumResult> {
    let band = dominant_bandwidth(&spec, energy_fraction)?;
    spec.band = Some(band);
    spec.band_energy_fraction = Some(energy_fraction);
    Ok(spec)
}

/// Per-window spectra over half-open time windows `[t_a, t_b)`.
///
/// No taper by default; `hann` applies a Hann window to each segment
/// before the transform.
pub fn windowed_spectra(
    x: &TimeSeries,
    windows: &[(f64, f64)],
    hann: bool,
) -> Result<Vec<SpectrumResult>> {
    let mut out = Vec::with_capacity(windows.len());
    for &(t_a, t_b) in windows {
        let mut seg = x.segment(t_a, t_b)?;
        if seg.len() < 8 {
            return Err(Error::WindowOutOfRange { start: t_a, end: t_b });
        }
        if hann {
            let n = seg.len();
            for (k, v) in seg.values.iter_mut().enumerate() {
                let w = 0.5
                    - 0.5 * libm::cos(2.0 * core::f64::consts::PI * k as f64 / (n - 1) as f64);
                *v *= w;
            }
        }
        out.push(amplitude_spectrum(&seg)?);
    }
    Ok(out)
}
