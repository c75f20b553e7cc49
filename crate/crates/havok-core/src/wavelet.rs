//! Continuous wavelet transform with generalized Morse wavelets,
//! evaluated in the frequency domain.
//!
//! For each scale `a` the transform row is the inverse DFT of
//! `DFT(x) * conj(morse_hat(a w))`, where the wavelet is supported on
//! positive frequencies only (analytic), so the modulus of a row is the
//! envelope of the band around that scale's equivalent frequency.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::series::TimeSeries;

/// Generalized Morse wavelet shape parameters.
///
/// `gamma` controls the high-frequency decay, `time_bandwidth` is the
/// product `P^2 = beta * gamma`. The frequency-domain window is
/// `H(w) c w^beta exp(-w^gamma)` normalized to peak value 2 at
/// `w_peak = (beta / gamma)^(1/gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseWavelet {
    pub gamma: f64,
    pub time_bandwidth: f64,
}

impl Default for MorseWavelet {
    fn default() -> Self {
        Self { gamma: 3.0, time_bandwidth: 60.0 }
    }
}

impl MorseWavelet {
    pub fn beta(&self) -> f64 {
        self.time_bandwidth / self.gamma
    }

    /// Angular frequency of the window peak.
    pub fn peak_omega(&self) -> f64 {
        libm::pow(self.beta() / self.gamma, 1.0 / self.gamma)
    }

    /// Frequency-domain window at angular frequency `w` (rad/sample),
    /// normalized so the peak value is 2.
    pub fn hat(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let beta = self.beta();
        let wp = self.peak_omega();
        let ln_val =
            beta * (libm::log(w) - libm::log(wp)) - libm::pow(w, self.gamma) + libm::pow(wp, self.gamma);
        2.0 * libm::exp(ln_val)
    }

    /// e-folding duration in samples at dimensionless scale `a`, from the
    /// Gaussian approximation of the envelope with standard deviation
    /// `sqrt(beta gamma) / w_peak` scaled samples.
    pub fn efold_samples(&self, scale: f64) -> f64 {
        scale * libm::sqrt(2.0 * self.beta() * self.gamma) / self.peak_omega()
    }
}

/// Modulus of the continuous wavelet transform on a log-spaced scale grid.
#[derive(Debug, Clone)]
pub struct Scalogram {
    /// Dimensionless scales, ascending.
    pub scales: Vec<f64>,
    /// Scale-equivalent frequencies in Hz, descending.
    pub freqs: Vec<f64>,
    /// Sample times in seconds.
    pub times: Vec<f64>,
    /// `|X_w|` per scale (outer) and time (inner).
    pub modulus: Vec<Vec<f64>>,
    pub wavelet: MorseWavelet,
    /// Cone-of-influence frequency per time: below this frequency the
    /// wavelet overhangs the record edge.
    pub coi: Vec<f64>,
}

/// Runs the Morse CWT over scales spanning `[~2/(n dt), fs/2]` with the
/// requested number of voices per octave.
pub fn cwt_morse(
    x: &TimeSeries,
    gamma: f64,
    time_bandwidth: f64,
    voices_per_octave: usize,
) -> Result<Scalogram> {
    if x.len() < 16 {
        return Err(Error::TooShort { needed: 16, got: x.len() });
    }
    if !gamma.is_finite()
        || gamma <= 0.0
        || !time_bandwidth.is_finite()
        || time_bandwidth <= gamma
        || voices_per_octave == 0
    {
        return Err(Error::NonFinite { context: "morse wavelet parameters" });
    }
    let wavelet = MorseWavelet { gamma, time_bandwidth };
    let n = x.len();
    let dt = x.dt;
    let fs = x.fs();
    let w_peak = wavelet.peak_omega();

    // frequency grid: fs/2 descending by one voice per step
    let f_min = 2.0 / (n as f64 * dt);
    let step = libm::pow(2.0, 1.0 / voices_per_octave as f64);
    let mut freqs = Vec::new();
    let mut f = fs / 2.0;
    while f >= f_min {
        freqs.push(f);
        f /= step;
    }
    if freqs.len() < 2 {
        return Err(Error::TooShort { needed: 16, got: n });
    }
    let scales: Vec<f64> = freqs
        .iter()
        .map(|&f| w_peak / (2.0 * core::f64::consts::PI * f * dt))
        .collect();

    let spectrum = fft::fft_forward(&x.values);

    let row = |&scale: &f64| -> Vec<f64> {
        let mut prod = vec![Complex64::new(0.0, 0.0); n];
        for (k, (slot, bin)) in prod.iter_mut().zip(&spectrum).take(n / 2 + 1).enumerate() {
            let w = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
            let h = wavelet.hat(scale * w);
            if h > 0.0 {
                *slot = bin * h;
            }
        }
        fft::ifft(&prod).iter().map(|c| c.norm()).collect()
    };

    #[cfg(feature = "parallel")]
    let modulus: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        scales.par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let modulus: Vec<Vec<f64>> = scales.iter().map(row).collect();

    let times: Vec<f64> = (0..n).map(|k| x.time_at(k)).collect();
    // distance to the nearest edge determines the smallest trustworthy scale
    let efold_unit = wavelet.efold_samples(1.0);
    let coi: Vec<f64> = (0..n)
        .map(|k| {
            let d = k.min(n - 1 - k).max(1) as f64;
            let max_scale = d / efold_unit;
            w_peak / (2.0 * core::f64::consts::PI * max_scale * dt)
        })
        .collect();

    Ok(Scalogram { scales, freqs, times, modulus, wavelet, coi })
}
