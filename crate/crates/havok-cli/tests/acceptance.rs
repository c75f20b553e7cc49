//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Criterion 10 needs clinical data that is not shipped; it is skipped
//! unless the environment points at a local copy (see README).

use std::path::{Path, PathBuf};
use std::time::Instant;

use havok_cli::report::{pool_reports, read_summary_table};
use havok_core::havok::ForcingSeries;
use havok_core::nalgebra::{DMatrix, DVector};
use havok_core::physio;
use havok_core::systems::{
    generate_bursty, integrate_lorenz, lobe_switches, BurstSpec, LorenzConfig,
    SyntheticBurstConfig,
};
use havok_core::{
    amplitude_spectrum, cwt_morse, decompose, detect_bursts, dominant_bandwidth,
    embed, fft, fit, select_rank, stats, CoordinateSeries, FitMode, RankPolicy, TimeSeries,
};

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/osa_summary_table.csv")
}

fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

fn gaussian(seed: u64) -> impl FnMut() -> f64 {
    let mut next = lcg(seed);
    move || {
        let u1 = next() + 0.5 + 1e-12;
        let u2 = next() + 0.5;
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[test]
fn criterion_01_pooled_summary_table_statistics() {
    let start = Instant::now();
    let rows = read_summary_table(&fixture_path()).unwrap();
    assert_eq!(rows.len(), 26);
    let pooled = pool_reports(&rows).unwrap();

    let close = |got: Option<f64>, want: f64, what: &str| {
        let got = got.unwrap();
        assert!((got - want).abs() <= 0.01, "{what}: {got:.4} vs published {want}");
    };
    close(pooled.tb_mean_min.mean, 1.73, "pooled Tb mean");
    close(pooled.tb_mean_min.sd, 0.26, "pooled Tb sd");
    close(pooled.tib_mean_min.mean, 11.71, "pooled Tib mean");
    close(pooled.tib_mean_min.sd, 2.69, "pooled Tib sd");
    close(pooled.rank_r.mean, 9.35, "pooled rank mean");
    close(pooled.rank_r.sd, 0.94, "pooled rank sd");
    close(pooled.vr_energy_pct.mean, 4.19, "pooled forcing energy mean");
    close(pooled.vr_energy_pct.sd, 0.31, "pooled forcing energy sd");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "[PASS] criterion 1: pooled Tb {:.4}+/-{:.4}, Tib {:.4}+/-{:.4}, rank {:.4}+/-{:.4}, energy {:.4}+/-{:.4} ({elapsed:?})",
        pooled.tb_mean_min.mean.unwrap(),
        pooled.tb_mean_min.sd.unwrap(),
        pooled.tib_mean_min.mean.unwrap(),
        pooled.tib_mean_min.sd.unwrap(),
        pooled.rank_r.mean.unwrap(),
        pooled.rank_r.sd.unwrap(),
        pooled.vr_energy_pct.mean.unwrap(),
        pooled.vr_energy_pct.sd.unwrap(),
    );
}

#[test]
fn criterion_02_pearson_reproduction() {
    let start = Instant::now();
    let rows = read_summary_table(&fixture_path()).unwrap();
    let pooled = pool_reports(&rows).unwrap();

    let tb = pooled.ahi_vs_tb.expect("AHI vs Tb correlation");
    assert!((tb.r - 0.4364).abs() <= 0.01, "r(AHI, Tb) = {:.4}", tb.r);
    assert!((tb.p_value - 0.0258).abs() <= 0.002, "p(AHI, Tb) = {:.4}", tb.p_value);

    let tib = pooled.ahi_vs_tib.expect("AHI vs Tib correlation");
    assert!((tib.r + 0.3872).abs() <= 0.01, "r(AHI, Tib) = {:.4}", tib.r);
    assert!((tib.p_value - 0.0507).abs() <= 0.002, "p(AHI, Tib) = {:.4}", tib.p_value);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "[PASS] criterion 2: r(AHI,Tb) = {:.4} (p = {:.4}), r(AHI,Tib) = {:.4} (p = {:.4}) ({elapsed:?})",
        tb.r, tb.p_value, tib.r, tib.p_value
    );
}

#[test]
fn criterion_03_lorenz_forcing_properties() {
    let start = Instant::now();
    // 200 analysis time units at dt = 0.001 after a 10-unit transient
    let dt = 0.001;
    let cfg = LorenzConfig { dt, n_steps: 210_000, ..Default::default() };
    let traj = integrate_lorenz(&cfg).unwrap();
    let series = traj.measurement(dt, 10.0).unwrap();

    let emb = embed(&series, 100, 1, RankPolicy::Fixed(15)).unwrap();
    let forcing = emb.forcing();

    // (a) fat-tailed forcing distribution
    let kurtosis = stats::excess_kurtosis(&forcing.vr);
    assert!(kurtosis > 2.0, "forcing excess kurtosis {kurtosis:.2}");

    // (b) some psi in the sweep grid ties active forcing to lobe switches
    let switches = lobe_switches(&series.values, dt, 0.5);
    assert!(switches.len() > 20, "only {} lobe switches", switches.len());
    let grid = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.08, 0.12, 0.15, 0.2];
    let lookahead = 1.0;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut found = false;
    for &psi in &grid {
        let analysis = detect_bursts(&forcing, psi, 0.0, 0.0).unwrap();
        if analysis.bursts.is_empty() {
            continue;
        }
        let recall = switches
            .iter()
            .filter(|&&t| {
                analysis
                    .bursts
                    .iter()
                    .any(|b| b.t_start < t && b.t_end > t - lookahead)
            })
            .count() as f64
            / switches.len() as f64;
        let precision = analysis
            .bursts
            .iter()
            .filter(|b| switches.iter().any(|&t| t >= b.t_start && t < b.t_end + lookahead))
            .count() as f64
            / analysis.bursts.len() as f64;
        if best.is_none_or(|(_, r, p)| recall + precision > r + p) {
            best = Some((psi, recall, precision));
        }
        if recall >= 0.7 && precision >= 0.5 {
            found = true;
            break;
        }
    }
    let (psi, recall, precision) = best.unwrap();
    assert!(
        found,
        "no psi in the grid reaches recall >= 0.7 with precision >= 0.5 (best: psi = {psi}, recall {recall:.2}, precision {precision:.2})"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "runtime {elapsed:?}");
    println!(
        "[PASS] criterion 3: kurtosis {kurtosis:.2}, psi = {psi} gives switch recall {recall:.2} at precision {precision:.2} ({elapsed:?})"
    );
}

#[test]
fn criterion_04_linear_system_identification() {
    let start = Instant::now();
    // random stable system, spectral radius 0.9
    let mut next = lcg(17);
    let mut a0 = DMatrix::<f64>::zeros(3, 3);
    for v in a0.iter_mut() {
        *v = next();
    }
    let mut x = DVector::from_column_slice(&[1.0, 0.3, -0.4]);
    let mut rho = 0.0;
    for _ in 0..300 {
        let y = &a0 * &x;
        let ny = y.norm();
        rho = ny / x.norm();
        if ny > 0.0 {
            x = y / ny;
        }
    }
    a0 *= 0.9 / rho;
    let b0 = DVector::from_column_slice(&[0.7, -0.4, 0.2]);

    let n = 2000;
    let mut v = DMatrix::<f64>::zeros(n, 4);
    let mut state = DVector::from_column_slice(&[0.2, -0.1, 0.05]);
    for k in 0..n {
        let u = next();
        for i in 0..3 {
            v[(k, i)] = state[i];
        }
        v[(k, 3)] = u;
        state = &a0 * &state + &b0 * u;
    }
    let model = fit(&CoordinateSeries { v, dt: 0.01 }, FitMode::Discrete).unwrap();
    let a_err = (&model.a - &a0).iter().map(|e| e * e).sum::<f64>().sqrt();
    let b_err = (&model.b - &b0).norm();
    assert!(a_err <= 1e-6, "|A - A0|_F = {a_err:.2e}");
    assert!(b_err <= 1e-6, "|B - B0| = {b_err:.2e}");

    // derivative mode: fourth-order convergence under dt halving
    let run = |dt: f64| -> f64 {
        let a_c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0, -0.4]);
        let b_c = DVector::from_column_slice(&[0.5, 1.0]);
        let n = (40.0 / dt) as usize;
        let substeps = 40usize;
        let h = dt / substeps as f64;
        let u = |t: f64| (1.3 * t).sin() + 0.5 * (2.9 * t).cos();
        let mut v = DMatrix::<f64>::zeros(n, 3);
        let mut s = DVector::from_column_slice(&[1.0, 0.0]);
        let mut t = 0.0;
        for k in 0..n {
            v[(k, 0)] = s[0];
            v[(k, 1)] = s[1];
            v[(k, 2)] = u(t);
            for _ in 0..substeps {
                let f = |s: &DVector<f64>, tt: f64| &a_c * s + &b_c * u(tt);
                let k1 = f(&s, t);
                let k2 = f(&(&s + &k1 * (h / 2.0)), t + h / 2.0);
                let k3 = f(&(&s + &k2 * (h / 2.0)), t + h / 2.0);
                let k4 = f(&(&s + &k3 * h), t + h);
                s += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                t += h;
            }
        }
        let model = fit(&CoordinateSeries { v, dt }, FitMode::Derivative).unwrap();
        (&model.a - &a_c).iter().map(|e| e * e).sum::<f64>().sqrt()
    };
    let coarse = run(0.02);
    let fine = run(0.01);
    assert!(
        coarse / fine >= 8.0,
        "derivative-mode error only shrank {:.1}x ({coarse:.2e} -> {fine:.2e})",
        coarse / fine
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "runtime {elapsed:?}");
    println!(
        "[PASS] criterion 4: recovery |dA| = {a_err:.1e}, |dB| = {b_err:.1e}; derivative error ratio {:.1}x ({elapsed:?})",
        coarse / fine
    );
}

#[test]
fn criterion_05_burst_round_trip() {
    let start = Instant::now();
    let cfg = SyntheticBurstConfig {
        duration: 300.0,
        dt: 0.05,
        noise_sd: 0.0,
        bursts: vec![
            BurstSpec { t_start: 20.0, t_end: 26.5, amplitude: 4.0, carrier_freq_hz: 0.4 },
            BurstSpec { t_start: 100.0, t_end: 102.0, amplitude: 5.0, carrier_freq_hz: 1.0 },
            BurstSpec { t_start: 150.25, t_end: 160.75, amplitude: 4.5, carrier_freq_hz: 0.7 },
            BurstSpec { t_start: 220.0, t_end: 225.0, amplitude: 6.0, carrier_freq_hz: 0.2 },
        ],
        seed: 99,
    };
    let gen = generate_bursty(&cfg).unwrap();
    let forcing = ForcingSeries { vr: gen.series.values.clone(), dt: cfg.dt, energy_fraction: 0.0 };
    // psi below every burst's in-burst energy floor relative to the peak
    let analysis = detect_bursts(&forcing, 0.01, 0.0, 0.0).unwrap();
    assert_eq!(analysis.bursts.len(), gen.truth.len());
    for (got, want) in analysis.bursts.iter().zip(&gen.truth) {
        assert_eq!(got, want, "burst mismatch");
    }
    for (tb, want) in analysis.tb.iter().zip(gen.truth.iter()) {
        assert!((tb - want.duration()).abs() <= 1e-12);
    }
    let want_tib: Vec<f64> =
        gen.truth.windows(2).map(|w| w[1].t_start - w[0].t_end).collect();
    for (tib, want) in analysis.tib.iter().zip(&want_tib) {
        assert!((tib - want).abs() <= 1e-12);
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "[PASS] criterion 5: {} bursts recovered sample-exactly ({elapsed:?})",
        gen.truth.len()
    );
}

#[test]
fn criterion_06_spectral_correctness() {
    let start = Instant::now();
    // FFT against the quadratic-time transform
    let mut next = lcg(5);
    for n in [8usize, 15, 97, 256] {
        let x: Vec<f64> = (0..n).map(|_| next()).collect();
        let fast = fft::fft_forward(&x);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1e-300;
        for (k, bin) in fast.iter().enumerate() {
            let mut re = 0.0;
            let mut im = 0.0;
            for (t, &v) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            let d = ((bin.re - re).powi(2) + (bin.im - im).powi(2)).sqrt();
            worst = worst.max(d);
            scale = scale.max((re * re + im * im).sqrt());
        }
        assert!(worst / scale < 1e-9, "n = {n}: relative error {:.2e}", worst / scale);
    }

    // Parseval
    let x: Vec<f64> = (0..731).map(|_| next()).collect();
    let v = fft::fft_forward(&x);
    let time: f64 = x.iter().map(|a| a * a).sum();
    let freq: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>() / x.len() as f64;
    assert!((time - freq).abs() / time < 1e-9, "Parseval violated");

    // bin-aligned sinusoid amplitude and collapsed band
    let fs = 100.0;
    let n = 1000;
    let tone: Vec<f64> = (0..n)
        .map(|k| 3.0 * (2.0 * std::f64::consts::PI * 5.0 * k as f64 / fs).sin())
        .collect();
    let ts = TimeSeries::new(tone, 1.0 / fs, 0.0, "tone").unwrap();
    let spec = amplitude_spectrum(&ts).unwrap();
    let k5 = spec.freqs.iter().position(|&f| (f - 5.0).abs() < 1e-9).unwrap();
    assert!((spec.amplitude[k5] - 3.0).abs() <= 1e-9, "amplitude {}", spec.amplitude[k5]);
    let (f_l, f_h) = dominant_bandwidth(&spec, 0.95).unwrap();
    assert!((f_l - 5.0).abs() < 1e-9 && (f_h - 5.0).abs() < 1e-9, "band [{f_l}, {f_h}]");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "runtime {elapsed:?}");
    println!("[PASS] criterion 6: FFT oracle, Parseval, tone amplitude, one-bin band ({elapsed:?})");
}

#[test]
fn criterion_07_cwt_ridge() {
    let start = Instant::now();
    let fs = 100.0;
    let n = 4096;
    let f0 = 5.0;
    let voices = 10usize;
    let tone: Vec<f64> = (0..n)
        .map(|k| (2.0 * std::f64::consts::PI * f0 * k as f64 / fs).sin())
        .collect();
    let ts = TimeSeries::new(tone, 1.0 / fs, 0.0, "tone").unwrap();
    let sg = cwt_morse(&ts, 3.0, 60.0, voices).unwrap();
    let one_voice = 2f64.powf(1.0 / voices as f64);
    let mut checked = 0;
    for t in 0..n {
        if sg.coi[t] >= f0 {
            continue;
        }
        let mut best = 0;
        for (s, row) in sg.modulus.iter().enumerate() {
            if row[t] > sg.modulus[best][t] {
                best = s;
            }
        }
        let ratio = (sg.freqs[best] / f0).max(f0 / sg.freqs[best]);
        assert!(ratio <= one_voice * (1.0 + 1e-12), "ridge off by {ratio:.4}x at t = {t}");
        checked += 1;
    }
    assert!(checked > n / 2, "cone of influence left only {checked} samples");

    let zero = TimeSeries::new(vec![0.0; 256], 0.01, 0.0, "zero").unwrap();
    let zsg = cwt_morse(&zero, 3.0, 60.0, voices).unwrap();
    assert!(zsg.modulus.iter().all(|row| row.iter().all(|&v| v == 0.0)));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!("[PASS] criterion 7: ridge within one voice on {checked} samples; zero maps to zero ({elapsed:?})");
}

#[test]
fn criterion_08_rank_selection_trials() {
    let start = Instant::now();
    let (p, q) = (20usize, 200usize);
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut next = lcg(seed + 1);
        let mut h = DMatrix::<f64>::zeros(p, q);
        for (comp, sigma) in [10.0, 5.0, 2.0].into_iter().enumerate() {
            let _ = comp;
            let u: Vec<f64> = (0..p).map(|_| next()).collect();
            let w: Vec<f64> = (0..q).map(|_| next()).collect();
            let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nw = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            for i in 0..p {
                for j in 0..q {
                    h[(i, j)] += sigma * u[i] / nu * w[j] / nw;
                }
            }
        }
        let mut noise = gaussian(seed + 1000);
        for v in h.iter_mut() {
            *v += 1e-3 * noise();
        }
        let (_, s, _) = decompose(&h).unwrap();
        if select_rank(&s, p, q, RankPolicy::Auto).unwrap() == 3 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "auto rank correct in only {hits}/100 trials");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!("[PASS] criterion 8: auto rank = 3 in {hits}/100 seeded trials ({elapsed:?})");
}

#[test]
fn criterion_09_physio_front_end() {
    let start = Instant::now();
    // Butterworth against the analytic magnitude
    let filt = havok_core::filter::butterworth_bandpass(5, 0.5, 30.0, 100.0).unwrap();
    let analytic = |f: f64| -> f64 {
        let k = 200.0f64;
        let warp = |f: f64| k * (std::f64::consts::PI * f / 100.0).tan();
        let w = warp(f);
        let w0_sq = warp(0.5) * warp(30.0);
        let bw = warp(30.0) - warp(0.5);
        let qq = (w * w - w0_sq) / (bw * w);
        1.0 / (1.0 + (qq * qq).powi(5)).sqrt()
    };
    let delta_db = 20.0 * (filt.magnitude_at(10.0) / analytic(10.0)).log10().abs();
    assert!(delta_db <= 1.0, "10 Hz design vs analytic differs by {delta_db:.3} dB");
    assert!(20.0 * filt.magnitude_at(10.0).log10() >= -1.0, "10 Hz passband loss");
    // stopband: measured attenuation of sinusoids must reach 40 dB
    let measure = |f: f64| -> f64 {
        let n = 6000;
        let x: Vec<f64> = (0..n)
            .map(|k| (2.0 * std::f64::consts::PI * f * k as f64 / 100.0).sin())
            .collect();
        let y = filt.filtfilt(&x);
        y[n / 4..3 * n / 4].iter().map(|v| v.abs()).fold(0.0f64, f64::max)
    };
    let dc: Vec<f64> = vec![1.0; 6000];
    let dc_out = filt.filtfilt(&dc)[1500..4500].iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    assert!(20.0 * dc_out.max(1e-300).log10() <= -40.0, "DC attenuation {dc_out:.2e}");
    let at45 = measure(45.0);
    assert!(20.0 * at45.max(1e-300).log10() <= -40.0, "45 Hz attenuation {at45:.2e}");

    // synthetic ECG at 20 dB SNR for ten minutes
    let fs = 250.0;
    let duration = 600.0;
    let beats: Vec<f64> = (0..((duration - 2.0) / 0.8) as usize).map(|k| 1.0 + k as f64 * 0.8).collect();
    let n = (duration * fs) as usize;
    let sigma_w = 0.012;
    let mut clean = vec![0.0f64; n];
    for (k, v) in clean.iter_mut().enumerate() {
        let t = k as f64 / fs;
        let beat_idx = ((t - 1.0) / 0.8).round();
        let bt = 1.0 + beat_idx.max(0.0) * 0.8;
        let d = t - bt;
        if d.abs() < 0.1 && (beat_idx as usize) < beats.len() && beat_idx >= 0.0 {
            *v += (-0.5 * (d / sigma_w) * (d / sigma_w)).exp();
        }
    }
    let rms = (clean.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let mut noise = lcg(404);
    // scale uniform noise to the target SNR power
    let noise_sd = rms / 10.0;
    let uniform_sd = (1.0f64 / 12.0).sqrt();
    let samples: Vec<f64> = clean
        .iter()
        .map(|v| v + noise() * noise_sd / uniform_sd)
        .collect();
    let ecg = physio::EcgRecord { samples, fs, record_id: "synthetic".into() };
    let filtered = physio::bandpass_butterworth(&ecg, 0.5, 30.0, 5, true).unwrap();
    let rr = physio::detect_rpeaks(&filtered).unwrap();

    let mut matched = 0usize;
    let mut worst = 0.0f64;
    let mut used = vec![false; rr.peak_times.len()];
    for &bt in &beats {
        let mut best: Option<(usize, f64)> = None;
        for (i, &t) in rr.peak_times.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = (t - bt).abs();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, d)) = best {
            if d <= 0.05 {
                used[i] = true;
                matched += 1;
                worst = worst.max(d);
            }
        }
    }
    let sensitivity = matched as f64 / beats.len() as f64;
    let ppv = matched as f64 / rr.peak_times.len() as f64;
    assert!(sensitivity >= 0.99, "sensitivity {sensitivity:.4}");
    assert!(ppv >= 0.99, "PPV {ppv:.4}");
    assert!(worst <= 0.020, "worst timing error {:.1} ms", worst * 1000.0);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!(
        "[PASS] criterion 9: sensitivity {sensitivity:.3}, PPV {ppv:.3}, timing <= {:.1} ms; filter matches analytic response ({elapsed:?})",
        worst * 1000.0
    );
}

/// Reproduction guide for a real record (see README): set
/// `HAVOK_A03_ECG` (CSV `time,mv`) and `HAVOK_A03_ANNOTATIONS`
/// (CSV `minute,label`), plus optionally `HAVOK_A03_AHI`.
#[test]
fn criterion_10_optional_clinical_record() {
    let start = Instant::now();
    let (ecg_path, ann_path) = match (
        std::env::var("HAVOK_A03_ECG"),
        std::env::var("HAVOK_A03_ANNOTATIONS"),
    ) {
        (Ok(e), Ok(a)) => (PathBuf::from(e), PathBuf::from(a)),
        _ => {
            println!("[SKIP] criterion 10: clinical record not supplied (set HAVOK_A03_ECG and HAVOK_A03_ANNOTATIONS)");
            return;
        }
    };
    let ecg = havok_cli::io::read_ecg_csv(&ecg_path, "a03").unwrap();
    let annotations = havok_cli::io::read_annotations(&ann_path).unwrap();
    let cfg = havok_cli::config::AnalysisConfig::default();
    let out = std::env::temp_dir().join("havok_a03_acceptance");
    let opts = havok_cli::pipeline::PipelineOptions {
        record_id: "a03".into(),
        ahi: std::env::var("HAVOK_A03_AHI").ok().and_then(|v| v.parse().ok()),
        annotations: Some(annotations),
        feature: physio::HrvFeature::Tri,
    };
    let report = havok_cli::pipeline::run_pipeline(
        havok_cli::pipeline::PipelineInput::Ecg(ecg),
        &cfg,
        &opts,
        &out,
    )
    .unwrap();
    assert!((8..=12).contains(&report.rank_r), "rank {}", report.rank_r);
    let tb = report.tb_mean_min.unwrap();
    assert!((1.0..=3.0).contains(&tb), "Tb mean {tb:.2} min");
    let fh = report.f_h_mhz.unwrap();
    assert!((1.5..=3.5).contains(&fh), "f_H {fh:.2} mHz");
    println!(
        "[PASS] criterion 10: rank {}, Tb {tb:.2} min, f_H {fh:.2} mHz ({:?})",
        report.rank_r,
        start.elapsed()
    );
}
