//! `havok` command line: synthetic generators, the HRV front end, each
//! analysis stage as its own subcommand, the full pipeline, and pooled
//! summaries across records.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use havok_core::physio::HrvFeature;
use havok_core::systems::{
    generate_bursty, integrate_lorenz, lobe_switches, BurstSpec, LorenzConfig,
    SyntheticBurstConfig,
};
use havok_core::{
    amplitude_spectrum, burst_statistics, cwt_morse, detect_bursts, dominant_bandwidth, embed,
    fit, windowed_spectra, ForcingSeries,
};

use havok_cli::config::AnalysisConfig;
use havok_cli::error::{CliError, CliResult};
use havok_cli::pipeline::{run_pipeline, PipelineInput, PipelineOptions};
use havok_cli::{io, report, svg};

#[derive(Parser)]
#[command(
    name = "havok",
    version,
    about = "Decompose a scalar time series into an intermittently forced linear system and characterize the forcing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit synthetic ground-truth signals.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// ECG front end: filter, R peaks, RR intervals, HRV features.
    Hrv(HrvArgs),
    /// Hankel embedding and SVD of a scalar series.
    Embed(EmbedArgs),
    /// Fit the forced linear model on an embedding.
    Fit(FitArgs),
    /// Threshold burst detection on a forcing series.
    Bursts(BurstsArgs),
    /// Single-sided amplitude spectrum and dominant band.
    Spectrum(SpectrumArgs),
    /// Morse wavelet scalogram.
    Scalogram(ScalogramArgs),
    /// Full chain: ingest, embed, fit, bursts, spectra, report.
    Pipeline(PipelineArgs),
    /// Pool per-record reports: column statistics and AHI correlations.
    Pool(PoolArgs),
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Chaotic Lorenz trajectory; the x component is the measurement.
    Lorenz(GenerateLorenzArgs),
    /// Seeded noise plus scripted bursts with exact interval truth.
    Bursty(GenerateBurstyArgs),
}

#[derive(Args)]
struct GenerateLorenzArgs {
    /// Simulated time units after burn-in.
    #[arg(long, default_value_t = 50.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.001)]
    dt: f64,
    /// Transient discarded before the output starts.
    #[arg(long, default_value_t = 10.0)]
    burn_in: f64,
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
    #[arg(long, default_value_t = 28.0)]
    rho: f64,
    #[arg(long, default_value_t = 8.0 / 3.0)]
    beta: f64,
    /// Initial state as "x,y,z".
    #[arg(long, default_value = "-8,8,27")]
    x0: String,
    /// Moving-average window (time units) for the lobe-switch truth.
    #[arg(long, default_value_t = 0.5)]
    switch_smoothing: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateBurstyArgs {
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Burst spec "t_start:t_end:amplitude:carrier_hz"; repeatable.
    #[arg(long = "burst")]
    bursts: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InputSeriesArgs {
    /// Scalar series CSV: `time,value` rows or a headerless single column.
    #[arg(long)]
    input: PathBuf,
    /// Sample interval override; required for single-column input.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    window_p: Option<usize>,
    #[arg(long)]
    lag_tau: Option<usize>,
    /// Rank policy: "auto", an integer, or "energy:0.97"-style fractions.
    #[arg(long)]
    rank: Option<String>,
    /// Fit mode: "discrete" or "derivative".
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    min_duration: Option<f64>,
    #[arg(long)]
    merge_gap: Option<f64>,
    #[arg(long)]
    energy_fraction: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    time_bandwidth: Option<f64>,
    #[arg(long)]
    voices: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> CliResult<AnalysisConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                AnalysisConfig::from_toml_file(path).map_err(|m| CliError::input("config", m))?
            }
            None => AnalysisConfig::default(),
        };
        if let Some(v) = self.window_p {
            cfg.window_p = v;
        }
        if let Some(v) = self.lag_tau {
            cfg.lag_tau = v;
        }
        if let Some(rank) = &self.rank {
            if rank == "auto" {
                cfg.rank_policy = "auto".into();
            } else if let Some(frac) = rank.strip_prefix("energy:") {
                cfg.rank_policy = "energy".into();
                cfg.rank_energy = frac.parse().map_err(|_| {
                    CliError::input("config", format!("bad energy fraction '{frac}'"))
                })?;
            } else {
                cfg.rank_policy = "fixed".into();
                cfg.rank_fixed = rank
                    .parse()
                    .map_err(|_| CliError::input("config", format!("bad rank '{rank}'")))?;
            }
        }
        if let Some(v) = &self.mode {
            cfg.mode = v.clone();
        }
        if let Some(v) = self.psi {
            cfg.psi = v;
        }
        if let Some(v) = self.min_duration {
            cfg.min_duration = v;
        }
        if let Some(v) = self.merge_gap {
            cfg.merge_gap = v;
        }
        if let Some(v) = self.energy_fraction {
            cfg.energy_fraction = v;
        }
        if let Some(v) = self.gamma {
            cfg.wavelet.gamma = v;
        }
        if let Some(v) = self.time_bandwidth {
            cfg.wavelet.time_bandwidth = v;
        }
        if let Some(v) = self.voices {
            cfg.wavelet.voices = v;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct HrvArgs {
    /// ECG CSV `time,mv`.
    #[arg(long, conflicts_with_all = ["ecg_bin", "rr"])]
    ecg: Option<PathBuf>,
    /// ECG as headerless little-endian i16; needs --sidecar.
    #[arg(long, requires = "sidecar", conflicts_with = "rr")]
    ecg_bin: Option<PathBuf>,
    /// JSON sidecar {"fs": Hz, "gain": adu_per_mv} for --ecg-bin.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Pre-computed RR CSV `time,rr` (skips peak detection).
    #[arg(long)]
    rr: Option<PathBuf>,
    #[arg(long, default_value = "record")]
    record_id: String,
    /// Feature emitted as the scalar series: tri, mean-rr, sdnn, rmssd, pnn50.
    #[arg(long, default_value = "tri")]
    feature: String,
    /// Apply the bandpass single-pass instead of forward-backward.
    #[arg(long)]
    single_pass: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    input: InputSeriesArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Directory produced by `embed` (V.csv, S.csv, embedding.json).
    #[arg(long)]
    embedding: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BurstsArgs {
    /// Forcing CSV `time,vr` (or any two-column series file).
    #[arg(long)]
    forcing: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Sweep "start:stop:step" over psi; writes detection counts per value.
    #[arg(long)]
    psi_grid: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputSeriesArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Analysis window "t_start:t_end" in seconds; repeatable.
    #[arg(long = "window")]
    windows: Vec<String>,
    /// Apply a Hann taper to windowed segments.
    #[arg(long)]
    hann: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScalogramArgs {
    #[command(flatten)]
    input: InputSeriesArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Minute annotations CSV `minute,label` drawn under the plot.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Also dump the full-resolution matrix as f64 binary.
    #[arg(long)]
    bin: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Scalar series CSV input; repeatable for batch processing.
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// ECG CSV input.
    #[arg(long)]
    ecg: Option<PathBuf>,
    /// ECG binary input; needs --sidecar.
    #[arg(long, requires = "sidecar")]
    ecg_bin: Option<PathBuf>,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// RR CSV input.
    #[arg(long)]
    rr: Option<PathBuf>,
    /// Minute annotations CSV.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Apnea-hypopnea index metadata for the report.
    #[arg(long)]
    ahi: Option<f64>,
    #[arg(long)]
    record_id: Option<String>,
    /// HRV feature for ECG/RR input.
    #[arg(long, default_value = "tri")]
    feature: String,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PoolArgs {
    /// report.json files produced by `pipeline`.
    #[arg(long = "report")]
    reports: Vec<PathBuf>,
    /// Summary-table CSV (same columns as a published per-record table).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_feature(name: &str) -> CliResult<HrvFeature> {
    match name {
        "tri" => Ok(HrvFeature::Tri),
        "mean-rr" => Ok(HrvFeature::MeanRr),
        "sdnn" => Ok(HrvFeature::Sdnn),
        "rmssd" => Ok(HrvFeature::Rmssd),
        "pnn50" => Ok(HrvFeature::Pnn50),
        other => Err(CliError::input("hrv", format!("unknown feature '{other}'"))),
    }
}

fn parse_numbers(text: &str, sep: char, what: &str) -> CliResult<Vec<f64>> {
    text.split(sep)
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input("args", format!("bad {what} component '{f}'")))
        })
        .collect()
}

fn stem_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "record".into())
}

fn cmd_generate_lorenz(args: GenerateLorenzArgs) -> CliResult<()> {
    let x0 = parse_numbers(&args.x0, ',', "x0")?;
    if x0.len() != 3 {
        return Err(CliError::input("args", "--x0 needs three components"));
    }
    let n_steps = ((args.duration + args.burn_in) / args.dt) as usize;
    let cfg = LorenzConfig {
        sigma: args.sigma,
        rho: args.rho,
        beta: args.beta,
        x0: [x0[0], x0[1], x0[2]],
        dt: args.dt,
        n_steps,
    };
    let traj = integrate_lorenz(&cfg).map_err(|e| CliError::from_core("generate", e))?;
    let series = traj
        .measurement(args.dt, args.burn_in)
        .map_err(|e| CliError::from_core("generate", e))?;
    io::write_timeseries(&args.out.join("series.csv"), &series)?;
    let switches: Vec<f64> = lobe_switches(&series.values, args.dt, args.switch_smoothing)
        .iter()
        .map(|t| t + series.t0)
        .collect();
    let truth = serde_json::json!({
        "system": "lorenz",
        "sigma": args.sigma,
        "rho": args.rho,
        "beta": args.beta,
        "dt": args.dt,
        "burn_in": args.burn_in,
        "switch_smoothing": args.switch_smoothing,
        "lobe_switch_times": switches,
    });
    io::write_json(&args.out.join("truth.json"), &truth)?;
    println!("wrote {} samples and {} lobe switches", series.len(), switches.len());
    Ok(())
}

fn cmd_generate_bursty(args: GenerateBurstyArgs) -> CliResult<()> {
    let mut bursts = Vec::new();
    for spec in &args.bursts {
        let v = parse_numbers(spec, ':', "burst")?;
        if v.len() != 4 {
            return Err(CliError::input("args", "--burst needs t_start:t_end:amplitude:carrier_hz"));
        }
        bursts.push(BurstSpec { t_start: v[0], t_end: v[1], amplitude: v[2], carrier_freq_hz: v[3] });
    }
    let cfg = SyntheticBurstConfig {
        duration: args.duration,
        dt: args.dt,
        noise_sd: args.noise_sd,
        bursts,
        seed: args.seed,
    };
    let gen = generate_bursty(&cfg).map_err(|e| CliError::from_core("generate", e))?;
    io::write_timeseries(&args.out.join("series.csv"), &gen.series)?;
    let truth = serde_json::json!({
        "system": "bursty",
        "seed": args.seed,
        "noise_sd": args.noise_sd,
        "bursts": gen
            .truth
            .iter()
            .map(|b| serde_json::json!({"t_start": b.t_start, "t_end": b.t_end}))
            .collect::<Vec<_>>(),
    });
    io::write_json(&args.out.join("truth.json"), &truth)?;
    println!("wrote {} samples with {} bursts", gen.series.len(), gen.truth.len());
    Ok(())
}

fn cmd_hrv(args: HrvArgs) -> CliResult<()> {
    let feature = parse_feature(&args.feature)?;
    let rr = if let Some(path) = &args.rr {
        io::read_rr(path)?
    } else {
        let record = if let Some(path) = &args.ecg {
            io::read_ecg_csv(path, &args.record_id)?
        } else if let Some(path) = &args.ecg_bin {
            io::read_ecg_binary(path, args.sidecar.as_ref().unwrap(), &args.record_id)?
        } else {
            return Err(CliError::input("hrv", "need --ecg, --ecg-bin, or --rr"));
        };
        let filtered =
            havok_core::physio::bandpass_butterworth(&record, 0.5, 30.0, 5, !args.single_pass)
                .map_err(|e| CliError::from_core("hrv", e))?;
        havok_core::physio::detect_rpeaks(&filtered).map_err(|e| CliError::from_core("hrv", e))?
    };
    io::write_rr(&args.out.join("rr.csv"), &rr)?;
    let frames = havok_core::physio::hrv_features(&rr, 60.0, 1.0 / 128.0);
    io::write_hrv_frames(&args.out.join("hrv.csv"), &frames)?;
    let series = havok_core::physio::feature_series(&frames, feature, 60.0)
        .map_err(|e| CliError::from_core("hrv", e))?;
    io::write_timeseries(&args.out.join("feature.csv"), &series)?;
    println!(
        "{} beats, {} rejected, {} feature minutes",
        rr.peak_times.len(),
        rr.rejected_count,
        series.len()
    );
    Ok(())
}

fn cmd_embed(args: EmbedArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let series = io::read_timeseries(&args.input.input, args.input.dt, "input")?;
    let policy = cfg.rank_policy().map_err(|m| CliError::input("embed", m))?;
    let embedding =
        embed(&series, cfg.window_p, cfg.lag_tau, policy).map_err(|e| CliError::from_core("embed", e))?;
    io::write_embedding(&args.out, &embedding)?;
    println!("p = {}, q = {}, rank r = {}", cfg.window_p, embedding.snapshots(), embedding.rank_r);
    Ok(())
}

fn cmd_fit(args: FitArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let (coords, sidecar, s) = io::read_embedding_coords(&args.embedding)?;
    let mode = cfg.fit_mode().map_err(|m| CliError::input("fit", m))?;
    let model = fit(&coords, mode).map_err(|e| CliError::from_core("fit", e))?;
    io::write_model(&args.out.join("model.json"), &model)?;
    let total: f64 = s.iter().map(|v| v * v).sum();
    let energy = if total > 0.0 && sidecar.r <= s.len() {
        s[sidecar.r - 1] * s[sidecar.r - 1] / total
    } else {
        0.0
    };
    let forcing = ForcingSeries {
        vr: (0..coords.v.nrows()).map(|i| coords.v[(i, sidecar.r - 1)]).collect(),
        dt: sidecar.dt,
        energy_fraction: energy,
    };
    io::write_forcing(&args.out.join("forcing.csv"), &forcing, 0.0)?;
    println!("fit r = {} ({}), residual ratio {:.3e}", model.r, cfg.mode, model.residual_ratio());
    Ok(())
}

fn cmd_bursts(args: BurstsArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let series = io::read_timeseries(&args.forcing, args.dt, "forcing")?;
    let forcing = ForcingSeries { vr: series.values.clone(), dt: series.dt, energy_fraction: 0.0 };
    if let Some(grid) = &args.psi_grid {
        let v = parse_numbers(grid, ':', "psi grid")?;
        if v.len() != 3 || v[2].is_nan() || v[2] <= 0.0 {
            return Err(CliError::input("bursts", "--psi-grid needs start:stop:step"));
        }
        let mut text = String::from("psi,n_bursts,tb_mean,tb_sd,tib_mean,tib_sd\n");
        let mut count = 0usize;
        let mut psi = v[0];
        while psi <= v[1] + 1e-12 {
            let analysis = detect_bursts(&forcing, psi, cfg.min_duration, cfg.merge_gap)
                .map_err(|e| CliError::from_core("bursts", e))?;
            let stats = burst_statistics(&analysis);
            let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            text.push_str(&format!(
                "{psi},{},{},{},{},{}\n",
                stats.n_bursts,
                fmt(stats.tb_mean),
                fmt(stats.tb_sd),
                fmt(stats.tib_mean),
                fmt(stats.tib_sd)
            ));
            count += 1;
            psi += v[2];
        }
        std::fs::create_dir_all(&args.out)
            .and_then(|_| std::fs::write(args.out.join("psi_grid.csv"), text))
            .map_err(|e| CliError::input("bursts", e.to_string()))?;
        println!("swept {count} psi values");
    } else {
        let analysis = detect_bursts(&forcing, cfg.psi, cfg.min_duration, cfg.merge_gap)
            .map_err(|e| CliError::from_core("bursts", e))?;
        let stats = burst_statistics(&analysis);
        io::write_bursts(&args.out.join("bursts.csv"), &analysis)?;
        io::write_json(&args.out.join("bursts.json"), &io::burst_summary_json(&analysis, &stats))?;
        println!("{} bursts above psi = {}", stats.n_bursts, cfg.psi);
    }
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let series = io::read_timeseries(&args.input.input, args.input.dt, "input")?;
    let spec = amplitude_spectrum(&series).map_err(|e| CliError::from_core("spectrum", e))?;
    let band = dominant_bandwidth(&spec, cfg.energy_fraction)
        .map_err(|e| CliError::from_core("spectrum", e))?;
    io::write_spectrum(&args.out.join("spectrum.csv"), &spec)?;
    let mut windows = Vec::new();
    for w in &args.windows {
        let v = parse_numbers(w, ':', "window")?;
        if v.len() != 2 {
            return Err(CliError::input("spectrum", "--window needs t_start:t_end"));
        }
        windows.push((v[0], v[1]));
    }
    if !windows.is_empty() {
        let specs = windowed_spectra(&series, &windows, args.hann)
            .map_err(|e| CliError::from_core("spectrum", e))?;
        for (k, s) in specs.iter().enumerate() {
            io::write_spectrum(&args.out.join(format!("spectrum_w{}.csv", k + 1)), s)?;
        }
    }
    let band_json = serde_json::json!({
        "f_l_hz": band.0,
        "f_h_hz": band.1,
        "energy_fraction": cfg.energy_fraction,
    });
    io::write_json(&args.out.join("band.json"), &band_json)?;
    println!("dominant band {} - {} Hz", band.0, band.1);
    Ok(())
}

fn cmd_scalogram(args: ScalogramArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let series = io::read_timeseries(&args.input.input, args.input.dt, "input")?;
    let annotations = match &args.annotations {
        Some(path) => Some(io::read_annotations(path)?),
        None => None,
    };
    let sg = cwt_morse(&series, cfg.wavelet.gamma, cfg.wavelet.time_bandwidth, cfg.wavelet.voices)
        .map_err(|e| CliError::from_core("scalogram", e))?;
    io::write_scalogram_csv(&args.out.join("scalogram.csv"), &sg)?;
    if args.bin {
        io::write_scalogram_binary(&args.out.join("scalogram.bin"), &sg)?;
    }
    let text = svg::scalogram_svg(&sg, annotations.as_ref(), &series.label)?;
    std::fs::create_dir_all(&args.out)
        .and_then(|_| std::fs::write(args.out.join("scalogram.svg"), text))
        .map_err(|e| CliError::input("scalogram", e.to_string()))?;
    println!("{} scales x {} samples", sg.scales.len(), sg.times.len());
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let feature = parse_feature(&args.feature)?;
    let annotations = match &args.annotations {
        Some(path) => Some(io::read_annotations(path)?),
        None => None,
    };
    if args.input.len() > 1 {
        if args.ecg.is_some() || args.ecg_bin.is_some() || args.rr.is_some() {
            return Err(CliError::input("pipeline", "batch mode takes series inputs only"));
        }
        // one worker per record, each writing its own subdirectory
        let results: Vec<CliResult<String>> = args
            .input
            .par_iter()
            .map(|path| {
                let id = stem_of(path);
                let series = io::read_timeseries(path, args.dt, &id)?;
                let opts = PipelineOptions {
                    record_id: id.clone(),
                    ahi: args.ahi,
                    annotations: annotations.clone(),
                    feature,
                };
                run_pipeline(PipelineInput::Series(series), &cfg, &opts, &args.out.join(&id))?;
                Ok(id)
            })
            .collect();
        for res in results {
            println!("completed {}", res?);
        }
        return Ok(());
    }
    let (input, default_id) = if let Some(path) = args.input.first() {
        (PipelineInput::Series(io::read_timeseries(path, args.dt, &stem_of(path))?), stem_of(path))
    } else if let Some(path) = &args.ecg {
        (PipelineInput::Ecg(io::read_ecg_csv(path, &stem_of(path))?), stem_of(path))
    } else if let Some(path) = &args.ecg_bin {
        (
            PipelineInput::Ecg(io::read_ecg_binary(path, args.sidecar.as_ref().unwrap(), &stem_of(path))?),
            stem_of(path),
        )
    } else if let Some(path) = &args.rr {
        (PipelineInput::Rr(io::read_rr(path)?), stem_of(path))
    } else {
        return Err(CliError::input("pipeline", "no input given"));
    };
    let opts = PipelineOptions {
        record_id: args.record_id.clone().unwrap_or(default_id),
        ahi: args.ahi,
        annotations,
        feature,
    };
    let report = run_pipeline(input, &cfg, &opts, &args.out)?;
    println!(
        "record {}: rank {}, {} bursts, band {:.4}-{:.4} mHz",
        report.record_id,
        report.rank_r,
        report.n_bursts,
        report.f_l_mhz.unwrap_or(f64::NAN),
        report.f_h_mhz.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn cmd_pool(args: PoolArgs) -> CliResult<()> {
    let mut reports = Vec::new();
    if let Some(table) = &args.table {
        reports.extend(report::read_summary_table(table)?);
    }
    for path in &args.reports {
        reports.push(report::read_report(path)?);
    }
    let pooled = report::pool_reports(&reports)?;
    let value =
        serde_json::to_value(&pooled).map_err(|e| CliError::input("pool", e.to_string()))?;
    match &args.out {
        Some(path) => {
            io::write_json(path, &value)?;
            println!(
                "pooled {} records{}",
                pooled.n_records,
                pooled
                    .ahi_vs_tb
                    .as_ref()
                    .map(|p| format!(", r(AHI, Tb) = {:.4} (p = {:.4})", p.r, p.p_value))
                    .unwrap_or_default()
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(GenerateCommand::Lorenz(args)) => cmd_generate_lorenz(args),
        Command::Generate(GenerateCommand::Bursty(args)) => cmd_generate_bursty(args),
        Command::Hrv(args) => cmd_hrv(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Bursts(args) => cmd_bursts(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Scalogram(args) => cmd_scalogram(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Pool(args) => cmd_pool(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{}", err.to_json());
        std::process::exit(err.exit_code);
    }
}
