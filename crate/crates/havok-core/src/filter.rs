//! IIR Butterworth bandpass design (bilinear transform with frequency
//! pre-warping) and zero-phase application via forward-backward
//! filtering of cascaded second-order sections.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One second-order section, denominator normalized to `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Complex response at `z = exp(i w)`.
    fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::new(libm::cos(-w), libm::sin(-w));
        let z2 = z1 * z1;
        let num = Complex64::new(self.b0, 0.0) + z1 * self.b1 + z2 * self.b2;
        let den = Complex64::new(1.0, 0.0) + z1 * self.a1 + z2 * self.a2;
        num / den
    }
}

/// Cascade of second-order sections with a single overall gain.
#[derive(Debug, Clone, PartialEq)]
pub struct SosFilter {
    pub sections: Vec<Biquad>,
    pub gain: f64,
    pub fs: f64,
    /// Reflection padding used by [`SosFilter::filtfilt`], sized from the
    /// slowest pole at design time.
    pad: usize,
}

/// Designs a Butterworth bandpass of the given prototype order (the
/// digital filter has `2 * order` poles) with passband `[low, high]` Hz.
///
/// Edges are pre-warped so the discretized filter hits the analog
/// magnitude exactly at the band edges; the overall gain normalizes the
/// response to one at the geometric band center.
pub fn butterworth_bandpass(order: usize, low: f64, high: f64, fs: f64) -> Result<SosFilter> {
    if order == 0 {
        return Err(Error::InvalidBand { low, high, nyquist: fs / 2.0 });
    }
    if [low, high, fs].iter().any(|v| v.is_nan()) || low <= 0.0 || low >= high || high >= fs / 2.0 {
        return Err(Error::InvalidBand { low, high, nyquist: fs / 2.0 });
    }

    // pre-warped analog edges
    let k = 2.0 * fs;
    let warp = |f: f64| k * libm::tan(core::f64::consts::PI * f / fs);
    let w_l = warp(low);
    let w_h = warp(high);
    let w0_sq = w_l * w_h;
    let bw = w_h - w_l;

    // analog prototype poles on the unit circle, left half-plane
    let n = order;
    let mut digital_poles: Vec<Complex64> = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let theta = core::f64::consts::PI * (2 * i + n - 1) as f64 / (2 * n) as f64;
        let proto = Complex64::new(libm::cos(theta), libm::sin(theta));
        // lowpass-to-bandpass: s^2 - p Bw s + w0^2 = 0
        let pb = proto * bw;
        let disc = (pb * pb - Complex64::new(4.0 * w0_sq, 0.0)).sqrt();
        for s in [(pb + disc) * 0.5, (pb - disc) * 0.5] {
            // bilinear transform z = (k + s) / (k - s)
            digital_poles.push((Complex64::new(k, 0.0) + s) / (Complex64::new(k, 0.0) - s));
        }
    }

    // pair conjugates (and leftover real poles pairwise) into biquads;
    // every section takes one zero at z = +1 and one at z = -1
    let imag_tol = 1e-10;
    let mut complex_poles: Vec<Complex64> =
        digital_poles.iter().copied().filter(|p| p.im > imag_tol).collect();
    let mut real_poles: Vec<f64> = digital_poles
        .iter()
        .filter(|p| p.im.abs() <= imag_tol)
        .map(|p| p.re)
        .collect();
    complex_poles.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    real_poles.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut sections = Vec::with_capacity(n);
    for p in complex_poles {
        sections.push(Biquad {
            b0: 1.0,
            b1: 0.0,
            b2: -1.0,
            a1: -2.0 * p.re,
            a2: p.norm_sqr(),
        });
    }
    for pair in real_poles.chunks(2) {
        if pair.len() == 2 {
            sections.push(Biquad {
                b0: 1.0,
                b1: 0.0,
                b2: -1.0,
                a1: -(pair[0] + pair[1]),
                a2: pair[0] * pair[1],
            });
        }
    }
    debug_assert_eq!(sections.len(), n);

    // normalize at the digital image of the analog center frequency
    let f_center = fs / core::f64::consts::PI * libm::atan(libm::sqrt(w0_sq) / k);
    let w_center = 2.0 * core::f64::consts::PI * f_center / fs;
    let raw: Complex64 = sections
        .iter()
        .map(|s| s.response(w_center))
        .fold(Complex64::new(1.0, 0.0), |acc, r| acc * r);
    let gain = 1.0 / raw.norm();

    // slowest time constant sets how much reflection padding filtfilt needs
    let slowest = digital_poles.iter().map(|p| p.norm()).fold(0.0f64, f64::max);
    let pad = if slowest < 1.0 {
        (-9.0 / libm::log(slowest)).min(1e6) as usize + 12
    } else {
        1000
    };

    Ok(SosFilter { sections, gain, fs, pad })
}

impl SosFilter {
    /// Magnitude response at `f` Hz.
    pub fn magnitude_at(&self, f: f64) -> f64 {
        let w = 2.0 * core::f64::consts::PI * f / self.fs;
        let h: Complex64 = self
            .sections
            .iter()
            .map(|s| s.response(w))
            .fold(Complex64::new(1.0, 0.0), |acc, r| acc * r);
        self.gain * h.norm()
    }

    /// Single-pass causal filtering (direct form II transposed), with
    /// near-steady-state initial conditions for the first sample.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for section in &self.sections {
            let Biquad { b0, b1, b2, a1, a2 } = *section;
            // steady-state DF2T registers for a constant input x0
            let x0 = out.first().copied().unwrap_or(0.0);
            let dc = (b0 + b1 + b2) / (1.0 + a1 + a2);
            let y0 = dc * x0;
            let mut s2 = b2 * x0 - a2 * y0;
            let mut s1 = (b1 + b2) * x0 - (a1 + a2) * y0;
            for v in out.iter_mut() {
                let x_n = *v;
                let y = b0 * x_n + s1;
                s1 = b1 * x_n - a1 * y + s2;
                s2 = b2 * x_n - a2 * y;
                *v = y;
            }
        }
        for v in out.iter_mut() {
            *v *= self.gain;
        }
        out
    }

    /// Zero-phase filtering: forward pass, reverse, forward pass,
    /// reverse, over an odd-reflection extension of the signal.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n < 2 {
            return x.to_vec();
        }
        let pad = self.pad.min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        for k in (1..=pad).rev() {
            ext.push(2.0 * x[0] - x[k]);
        }
        ext.extend_from_slice(x);
        for k in 1..=pad {
            ext.push(2.0 * x[n - 1] - x[n - 1 - k]);
        }

        let mut y = self.filter(&ext);
        y.reverse();
        let mut y = self.filter(&y);
        y.reverse();
        y[pad..pad + n].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Analytic Butterworth bandpass magnitude with bilinear pre-warp,
    /// independent of the pole-placement code path.
    fn analytic_magnitude(order: usize, low: f64, high: f64, fs: f64, f: f64) -> f64 {
        let k = 2.0 * fs;
        let warp = |f: f64| k * libm::tan(core::f64::consts::PI * f / fs);
        let w = warp(f);
        let w0_sq = warp(low) * warp(high);
        let bw = warp(high) - warp(low);
        if w <= 0.0 {
            return 0.0;
        }
        let q = (w * w - w0_sq) / (bw * w);
        1.0 / libm::sqrt(1.0 + libm::pow(q * q, order as f64))
    }

    fn measured_amplitude(filter: &SosFilter, f: f64, fs: f64, seconds: f64) -> f64 {
        let n = (seconds * fs) as usize;
        let x: Vec<f64> = (0..n)
            .map(|k| libm::sin(2.0 * core::f64::consts::PI * f * k as f64 / fs))
            .collect();
        let y = filter.filter(&x);
        // steady-state peak over the middle half
        y[n / 4..3 * n / 4].iter().map(|v| v.abs()).fold(0.0f64, f64::max)
    }

    #[test]
    fn design_matches_analytic_magnitude() {
        let filt = butterworth_bandpass(5, 0.5, 30.0, 100.0).unwrap();
        for f in [0.2, 0.5, 2.0, 10.0, 25.0, 30.0, 40.0, 45.0] {
            let got = filt.magnitude_at(f);
            let want = analytic_magnitude(5, 0.5, 30.0, 100.0, f);
            assert!(
                (got - want).abs() <= 1e-9 + 1e-6 * want,
                "f={f}: designed {got:.6e} vs analytic {want:.6e}"
            );
        }
    }

    #[test]
    fn passband_tone_within_one_db_after_two_passes() {
        let filt = butterworth_bandpass(5, 0.5, 30.0, 100.0).unwrap();
        let n = 4000;
        let x: Vec<f64> = (0..n)
            .map(|k| libm::sin(2.0 * core::f64::consts::PI * 10.0 * k as f64 / 100.0))
            .collect();
        let y = filt.filtfilt(&x);
        let amp = y[n / 4..3 * n / 4].iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        let db = 20.0 * libm::log10(amp);
        assert!(db.abs() <= 1.0, "10 Hz two-pass gain {db:.3} dB");
    }

    #[test]
    fn dc_is_heavily_attenuated() {
        let filt = butterworth_bandpass(5, 0.5, 30.0, 100.0).unwrap();
        let x = alloc::vec![1.0; 6000];
        let y = filt.filtfilt(&x);
        let residual = y[1500..4500].iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        assert!(
            20.0 * libm::log10(residual.max(1e-300)) <= -40.0,
            "DC residual {residual:e}"
        );
    }

    #[test]
    fn stopband_tone_attenuated_at_least_40_db() {
        let filt = butterworth_bandpass(5, 0.5, 30.0, 100.0).unwrap();
        let amp = measured_amplitude(&filt, 45.0, 100.0, 40.0);
        assert!(20.0 * libm::log10(amp) <= -40.0, "45 Hz single-pass {amp:e}");
        // and the measurement agrees with the analytic rolloff
        let want = analytic_magnitude(5, 0.5, 30.0, 100.0, 45.0);
        assert!(amp <= want * 10.0 + 1e-9);
    }

    #[test]
    fn filtfilt_has_zero_lag() {
        // symmetric pulse stays centered under zero-phase filtering
        let fs = 250.0;
        let n = 2000;
        let center = 1000usize;
        let x: Vec<f64> = (0..n)
            .map(|k| {
                let t = (k as f64 - center as f64) / fs;
                libm::exp(-0.5 * (t / 0.01) * (t / 0.01))
            })
            .collect();
        let filt = butterworth_bandpass(5, 0.5, 30.0, fs).unwrap();
        let y = filt.filtfilt(&x);
        // cross-correlation peak between x and y
        let mut best_lag = 0isize;
        let mut best = f64::NEG_INFINITY;
        for lag in -20isize..=20 {
            let mut acc = 0.0;
            for (k, &xk) in x.iter().enumerate() {
                let j = k as isize + lag;
                if j >= 0 && (j as usize) < n {
                    acc += xk * y[j as usize];
                }
            }
            if acc > best {
                best = acc;
                best_lag = lag;
            }
        }
        assert_eq!(best_lag, 0, "zero-phase filter shifted the pulse");
    }

    #[test]
    fn invalid_bands_are_rejected() {
        assert!(matches!(
            butterworth_bandpass(5, 0.0, 30.0, 100.0),
            Err(Error::InvalidBand { .. })
        ));
        assert!(matches!(
            butterworth_bandpass(5, 30.0, 0.5, 100.0),
            Err(Error::InvalidBand { .. })
        ));
        assert!(matches!(
            butterworth_bandpass(5, 0.5, 60.0, 100.0),
            Err(Error::InvalidBand { .. })
        ));
    }
}
