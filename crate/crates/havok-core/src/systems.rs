//! Synthetic ground-truth generators: a Lorenz integrator for
//! validating the whole decomposition chain, and a seeded bursty-signal
//! generator with known burst intervals.

use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::intermittency::Burst;
use crate::series::TimeSeries;
use crate::stats;

/// Lorenz system parameters and integration setup.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzConfig {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub x0: [f64; 3],
    pub dt: f64,
    pub n_steps: usize,
}

impl Default for LorenzConfig {
    fn default() -> Self {
        // canonical chaotic regime
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            x0: [-8.0, 8.0, 27.0],
            dt: 0.001,
            n_steps: 1000,
        }
    }
}

/// Integrated trajectory; `n_steps + 1` points including the start.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzTrajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl LorenzTrajectory {
    /// The x component as the scalar measurement for embedding, with an
    /// initial transient of `burn_in` seconds discarded.
    pub fn measurement(&self, dt: f64, burn_in: f64) -> Result<TimeSeries> {
        let skip = (burn_in / dt) as usize;
        if skip + 2 > self.x.len() {
            return Err(Error::SeriesTooShort { needed: skip + 2, got: self.x.len() });
        }
        TimeSeries::new(self.x[skip..].to_vec(), dt, skip as f64 * dt, "lorenz x")
    }
}

/// Classical fixed-step fourth-order integration of the Lorenz flow.
pub fn integrate_lorenz(cfg: &LorenzConfig) -> Result<LorenzTrajectory> {
    if cfg.dt.is_nan() || cfg.dt <= 0.0 || cfg.n_steps == 0 {
        return Err(Error::NonFinite { context: "lorenz integration setup" });
    }
    let f = |s: [f64; 3]| -> [f64; 3] {
        [
            cfg.sigma * (s[1] - s[0]),
            s[0] * (cfg.rho - s[2]) - s[1],
            s[0] * s[1] - cfg.beta * s[2],
        ]
    };
    let n = cfg.n_steps;
    let mut t = Vec::with_capacity(n + 1);
    let mut xs = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    let mut zs = Vec::with_capacity(n + 1);
    let mut s = cfg.x0;
    let h = cfg.dt;
    for k in 0..=n {
        t.push(k as f64 * h);
        xs.push(s[0]);
        ys.push(s[1]);
        zs.push(s[2]);
        if k == n {
            break;
        }
        let k1 = f(s);
        let k2 = f(add(s, scale(k1, h / 2.0)));
        let k3 = f(add(s, scale(k2, h / 2.0)));
        let k4 = f(add(s, scale(k3, h)));
        for i in 0..3 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "lorenz state (dt too large?)" });
        }
    }
    Ok(LorenzTrajectory { t, x: xs, y: ys, z: zs })
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: [f64; 3], c: f64) -> [f64; 3] {
    [a[0] * c, a[1] * c, a[2] * c]
}

/// Times at which the smoothed x component changes sign: the lobe
/// switches of the butterfly attractor. Smoothing over `smooth_window`
/// seconds debounces grazing crossings.
pub fn lobe_switches(x: &[f64], dt: f64, smooth_window: f64) -> Vec<f64> {
    let w = ((smooth_window / dt) as usize).max(1);
    let smoothed = stats::moving_average(x, w);
    let mut out = Vec::new();
    for k in 1..smoothed.len() {
        if smoothed[k - 1] * smoothed[k] < 0.0 {
            out.push(k as f64 * dt);
        }
    }
    out
}

/// One scripted burst for the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub amplitude: f64,
    pub carrier_freq_hz: f64,
}

/// Configuration of the synthetic intermittent signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBurstConfig {
    pub duration: f64,
    pub dt: f64,
    pub noise_sd: f64,
    pub bursts: Vec<BurstSpec>,
    pub seed: u64,
}

/// Generated signal plus its exact burst intervals (snapped to the
/// sample grid, matching what a detector can recover).
#[derive(Debug, Clone)]
pub struct SyntheticBursty {
    pub series: TimeSeries,
    pub truth: Vec<Burst>,
}

/// Seeded Gaussian baseline plus raised-sinusoid bursts.
///
/// Inside a burst the waveform is
/// `amplitude * (2 + sin(2 pi f (t - t_start))) / 3`, which keeps the
/// squared signal at or above one ninth of the burst peak. With zero
/// noise, any threshold fraction `psi` below `(amp_min / (3 amp_max))^2`
/// therefore recovers every interval sample-exactly.
pub fn generate_bursty(cfg: &SyntheticBurstConfig) -> Result<SyntheticBursty> {
    if cfg.duration.is_nan() || cfg.dt.is_nan() || cfg.duration <= 0.0 || cfg.dt <= 0.0 {
        return Err(Error::NonFinite { context: "bursty generator setup" });
    }
    let n = (cfg.duration / cfg.dt) as usize;
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }

    // snap intervals to the sample grid and validate ordering
    let mut snapped: Vec<(usize, usize, &BurstSpec)> = Vec::with_capacity(cfg.bursts.len());
    for spec in &cfg.bursts {
        let a = libm::ceil(spec.t_start / cfg.dt - 1e-9) as i64;
        let b = libm::ceil(spec.t_end / cfg.dt - 1e-9) as i64;
        if a < 0 || b as usize > n || b <= a {
            return Err(Error::OverlapError);
        }
        snapped.push((a as usize, b as usize, spec));
    }
    snapped.sort_by_key(|&(a, _, _)| a);
    for pair in snapped.windows(2) {
        if pair[1].0 < pair[0].1 {
            return Err(Error::OverlapError);
        }
    }

    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut normal = move || -> f64 {
        // Box-Muller on the raw 53-bit stream keeps the generator
        // byte-reproducible across platforms
        let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
        let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    };

    let mut values: Vec<f64> = (0..n).map(|_| cfg.noise_sd * normal()).collect();
    let mut truth = Vec::with_capacity(snapped.len());
    for (a, b, spec) in snapped {
        for (k, v) in values.iter_mut().enumerate().take(b).skip(a) {
            let t = k as f64 * cfg.dt - a as f64 * cfg.dt;
            let carrier = libm::sin(2.0 * core::f64::consts::PI * spec.carrier_freq_hz * t);
            *v += spec.amplitude * (2.0 + carrier) / 3.0;
        }
        truth.push(Burst { t_start: a as f64 * cfg.dt, t_end: b as f64 * cfg.dt });
    }

    let series = TimeSeries::new(values, cfg.dt, 0.0, "synthetic bursty")?;
    Ok(SyntheticBursty { series, truth })
}
