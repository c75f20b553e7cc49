//! End-to-end record analysis: ingest, embed, fit, burst statistics,
//! spectra, scalogram, association, report.

use std::path::Path;

use havok_core::physio::{self, AnnotationTrack, EcgRecord, HrvFeature};
use havok_core::{
    amplitude_spectrum, burst_statistics, cwt_morse, detect_bursts, dominant_bandwidth, embed,
    estimate_pdf, fit, Binning, TimeSeries,
};

use crate::config::AnalysisConfig;
use crate::error::{CliError, CliResult};
use crate::io;
use crate::report::RecordReport;
use crate::svg;

/// What the pipeline starts from.
pub enum PipelineInput {
    /// A ready scalar series (already uniformly sampled).
    Series(TimeSeries),
    /// Raw ECG; the HRV front end runs first.
    Ecg(EcgRecord),
    /// Pre-computed RR intervals; skips peak detection.
    Rr(physio::RrSeries),
}

pub struct PipelineOptions {
    pub record_id: String,
    pub ahi: Option<f64>,
    pub annotations: Option<AnnotationTrack>,
    /// HRV feature used to build the embedded series from ECG/RR input.
    pub feature: HrvFeature,
}

/// Runs every analysis stage and writes the fixed artifact set into
/// `out_dir`: `report.json`, `forcing.csv`, `bursts.csv`,
/// `distribution.csv`, `spectrum.csv`, `scalogram.csv`,
/// `scalogram.svg`, `model.json` (plus `rr.csv` and `hrv.csv` for ECG
/// input). Returns the report.
pub fn run_pipeline(
    input: PipelineInput,
    cfg: &AnalysisConfig,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> CliResult<RecordReport> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::input("pipeline", format!("{}: {e}", out_dir.display())))?;

    // ingest stage: everything becomes a scalar TimeSeries
    let series = match input {
        PipelineInput::Series(ts) => ts,
        PipelineInput::Ecg(record) => {
            let filtered = physio::bandpass_butterworth(&record, 0.5, 30.0, 5, true)
                .map_err(|e| CliError::from_core("hrv", e))?;
            let rr = physio::detect_rpeaks(&filtered).map_err(|e| CliError::from_core("hrv", e))?;
            io::write_rr(&out_dir.join("rr.csv"), &rr)?;
            let frames = physio::hrv_features(&rr, 60.0, 1.0 / 128.0);
            io::write_hrv_frames(&out_dir.join("hrv.csv"), &frames)?;
            physio::feature_series(&frames, opts.feature, 60.0)
                .map_err(|e| CliError::from_core("hrv", e))?
        }
        PipelineInput::Rr(rr) => {
            let frames = physio::hrv_features(&rr, 60.0, 1.0 / 128.0);
            io::write_hrv_frames(&out_dir.join("hrv.csv"), &frames)?;
            physio::feature_series(&frames, opts.feature, 60.0)
                .map_err(|e| CliError::from_core("hrv", e))?
        }
    };

    // embedding stage
    let policy = cfg.rank_policy().map_err(|m| CliError::input("embed", m))?;
    let embedding = embed(&series, cfg.window_p, cfg.lag_tau, policy)
        .map_err(|e| CliError::from_core("embed", e))?;
    let forcing = embedding.forcing();
    io::write_forcing(&out_dir.join("forcing.csv"), &forcing, 0.0)?;

    // model stage
    let mode = cfg.fit_mode().map_err(|m| CliError::input("fit", m))?;
    let model =
        fit(&embedding.coordinates(), mode).map_err(|e| CliError::from_core("fit", e))?;
    io::write_model(&out_dir.join("model.json"), &model)?;
    if model.residual_ratio() > 0.1 {
        eprintln!(
            "warning: discarded regression row is {:.1}% of the operator norm; \
             the forcing coordinate may be partially predictable",
            100.0 * model.residual_ratio()
        );
    }

    // burst stage
    let analysis = detect_bursts(&forcing, cfg.psi, cfg.min_duration, cfg.merge_gap)
        .map_err(|e| CliError::from_core("bursts", e))?;
    let stats = burst_statistics(&analysis);
    io::write_bursts(&out_dir.join("bursts.csv"), &analysis)?;

    // forcing distribution
    let dist = estimate_pdf(&forcing.vr, Binning::FreedmanDiaconis)
        .map_err(|e| CliError::from_core("pdf", e))?;
    io::write_distribution(&out_dir.join("distribution.csv"), &dist)?;

    // spectrum stage
    let forcing_ts = TimeSeries::new(forcing.vr.clone(), forcing.dt, 0.0, "forcing")
        .map_err(|e| CliError::from_core("spectrum", e))?;
    let spec = amplitude_spectrum(&forcing_ts).map_err(|e| CliError::from_core("spectrum", e))?;
    let band = dominant_bandwidth(&spec, cfg.energy_fraction)
        .map_err(|e| CliError::from_core("spectrum", e))?;
    io::write_spectrum(&out_dir.join("spectrum.csv"), &spec)?;

    // scalogram stage
    let sg = cwt_morse(
        &forcing_ts,
        cfg.wavelet.gamma,
        cfg.wavelet.time_bandwidth,
        cfg.wavelet.voices,
    )
    .map_err(|e| CliError::from_core("scalogram", e))?;
    io::write_scalogram_csv(&out_dir.join("scalogram.csv"), &sg)?;
    // burst timeline starts at the first embedded snapshot
    let shifted_annotations = opts.annotations.as_ref().map(|ann| AnnotationTrack {
        minute_labels: ann.minute_labels.clone(),
        t0: ann.t0 - series.t0,
    });
    let svg_text = svg::scalogram_svg(
        &sg,
        shifted_annotations.as_ref(),
        &format!("Forcing scalogram: {}", opts.record_id),
    )?;
    std::fs::write(out_dir.join("scalogram.svg"), svg_text)
        .map_err(|e| CliError::input("scalogram", e.to_string()))?;

    // association stage (annotations share the recording's time origin)
    let association = shifted_annotations
        .as_ref()
        .map(|ann| physio::burst_annotation_association(&analysis, ann));
    if let Some(assoc) = &association {
        let value = serde_json::json!({
            "overlap_fraction": assoc.overlap_fraction,
            "point_biserial_r": assoc.point_biserial_r,
            "p_value": assoc.p_value,
            "note": assoc.note,
        });
        io::write_json(&out_dir.join("association.json"), &value)?;
    }

    let minutes = |v: Option<f64>| v.map(|s| s / 60.0);
    let report = RecordReport {
        record_id: opts.record_id.clone(),
        ahi: opts.ahi,
        rank_r: embedding.rank_r,
        vr_energy_pct: 100.0 * forcing.energy_fraction,
        psi: cfg.psi,
        n_bursts: stats.n_bursts,
        tb_mean_min: minutes(stats.tb_mean),
        tb_sd_min: minutes(stats.tb_sd),
        tib_mean_min: minutes(stats.tib_mean),
        tib_sd_min: minutes(stats.tib_sd),
        f_l_mhz: Some(band.0 * 1000.0),
        f_h_mhz: Some(band.1 * 1000.0),
        forcing_excess_kurtosis: dist.excess_kurtosis,
        forcing_tail_mass_3sigma: dist.tail_mass_3sigma,
        overlap_fraction: association.as_ref().map(|a| a.overlap_fraction),
        point_biserial_r: association.as_ref().and_then(|a| a.point_biserial_r),
        association_p_value: association.as_ref().and_then(|a| a.p_value),
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        generated_unix_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let value = serde_json::to_value(&report)
        .map_err(|e| CliError::input("report", e.to_string()))?;
    io::write_json(&out_dir.join("report.json"), &value)?;
    Ok(report)
}
