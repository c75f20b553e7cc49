//! File formats: CSV series and matrices, JSON sidecars, raw binary
//! scalogram dumps.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use havok_core::embedding::DelayEmbedding;
use havok_core::havok::{FitMode, ForcingSeries, HavokModel};
use havok_core::intermittency::{BurstAnalysis, BurstStatistics, DistributionEstimate};
use havok_core::physio::{AnnotationTrack, EcgRecord, HrvFrame, MinuteLabel, RrSeries};
use havok_core::{Scalogram, SpectrumResult, TimeSeries};

use crate::error::{io_err, CliError, CliResult};

const STAGE: &str = "io";

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| io_err(STAGE, path, e))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(STAGE, parent, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_err(STAGE, path, e))
}

fn parse_f64(field: &str, path: &Path, line: usize) -> CliResult<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        CliError::input(STAGE, format!("{}:{line}: cannot parse '{field}' as a number", path.display()))
    })
}

/// Reads a scalar series from CSV.
///
/// Accepts `time,<anything>` two-column files (sample interval inferred
/// from the time column) or headerless single-column files, which
/// require an explicit `--dt`.
pub fn read_timeseries(path: &Path, dt_flag: Option<f64>, label: &str) -> CliResult<TimeSeries> {
    let reader = open(path)?;
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut single_column = true;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(STAGE, path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let first = fields.next().unwrap_or("");
        let second = fields.next();
        if idx == 0 && first.parse::<f64>().is_err() {
            continue; // header row
        }
        match second {
            Some(v) if !v.trim().is_empty() => {
                single_column = false;
                times.push(parse_f64(first, path, idx + 1)?);
                values.push(parse_f64(v, path, idx + 1)?);
            }
            _ => values.push(parse_f64(first, path, idx + 1)?),
        }
    }
    if values.len() < 2 {
        return Err(CliError::insufficient(
            STAGE,
            format!("{}: need at least two samples", path.display()),
        ));
    }
    let (dt, t0) = if single_column {
        let dt = dt_flag.ok_or_else(|| {
            CliError::input(
                STAGE,
                format!("{}: single-column input requires --dt", path.display()),
            )
        })?;
        (dt, 0.0)
    } else {
        let dt = dt_flag.unwrap_or((times[times.len() - 1] - times[0]) / (times.len() - 1) as f64);
        (dt, times[0])
    };
    TimeSeries::new(values, dt, t0, label).map_err(|e| CliError::from_core(STAGE, e))
}

pub fn write_timeseries(path: &Path, ts: &TimeSeries) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "time,value").map_err(|e| io_err(STAGE, path, e))?;
    for (k, v) in ts.values.iter().enumerate() {
        writeln!(w, "{},{v}", ts.time_at(k)).map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

pub fn write_forcing(path: &Path, forcing: &ForcingSeries, t0: f64) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "time,vr").map_err(|e| io_err(STAGE, path, e))?;
    for (k, v) in forcing.vr.iter().enumerate() {
        writeln!(w, "{},{v}", t0 + k as f64 * forcing.dt).map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

/// ECG from two-column CSV `time,mv`.
pub fn read_ecg_csv(path: &Path, record_id: &str) -> CliResult<EcgRecord> {
    let ts = read_timeseries(path, None, record_id)?;
    Ok(EcgRecord { samples: ts.values, fs: 1.0 / ts.dt, record_id: record_id.into() })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EcgSidecar {
    /// Sampling frequency, Hz.
    pub fs: f64,
    /// ADC units per millivolt.
    pub gain: f64,
}

/// ECG from headerless little-endian i16 samples plus a JSON sidecar
/// carrying the sampling frequency and gain.
pub fn read_ecg_binary(path: &Path, sidecar_path: &Path, record_id: &str) -> CliResult<EcgRecord> {
    let sidecar: EcgSidecar = serde_json::from_reader(open(sidecar_path)?)
        .map_err(|e| CliError::input(STAGE, format!("{}: {e}", sidecar_path.display())))?;
    if sidecar.fs.is_nan() || sidecar.gain.is_nan() || sidecar.fs <= 0.0 || sidecar.gain <= 0.0 {
        return Err(CliError::input(STAGE, "sidecar fs and gain must be positive"));
    }
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(|e| io_err(STAGE, path, e))?;
    if bytes.len() % 2 != 0 {
        return Err(CliError::input(STAGE, format!("{}: odd byte count for i16 data", path.display())));
    }
    let samples: Vec<f64> = bytes
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / sidecar.gain)
        .collect();
    Ok(EcgRecord { samples, fs: sidecar.fs, record_id: record_id.into() })
}

/// Annotations from CSV `minute,label` with label N or A.
pub fn read_annotations(path: &Path) -> CliResult<AnnotationTrack> {
    let reader = open(path)?;
    let mut labels: Vec<(usize, MinuteLabel)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(STAGE, path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let minute = fields.next().unwrap_or("");
        let label = fields.next().unwrap_or("").trim();
        if idx == 0 && minute.parse::<usize>().is_err() {
            continue; // header
        }
        let minute: usize = minute.trim().parse().map_err(|_| {
            CliError::input(STAGE, format!("{}:{}: bad minute index", path.display(), idx + 1))
        })?;
        let label = match label {
            "N" | "n" => MinuteLabel::Normal,
            "A" | "a" => MinuteLabel::Apnea,
            other => {
                return Err(CliError::input(
                    STAGE,
                    format!("{}:{}: label '{other}' is not N or A", path.display(), idx + 1),
                ))
            }
        };
        labels.push((minute, label));
    }
    labels.sort_by_key(|&(m, _)| m);
    if labels.is_empty() {
        return Err(CliError::insufficient(STAGE, format!("{}: no annotations", path.display())));
    }
    Ok(AnnotationTrack { minute_labels: labels.into_iter().map(|(_, l)| l).collect(), t0: 0.0 })
}

/// RR intervals from CSV `time,rr` (bypasses the ECG stage).
pub fn read_rr(path: &Path) -> CliResult<RrSeries> {
    let reader = open(path)?;
    let mut peak_times = Vec::new();
    let mut rr = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(STAGE, path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t = fields.next().unwrap_or("");
        let v = fields.next().unwrap_or("");
        if idx == 0 && t.parse::<f64>().is_err() {
            continue;
        }
        peak_times.push(parse_f64(t, path, idx + 1)?);
        rr.push(parse_f64(v, path, idx + 1)?);
    }
    // the stored series pairs each interval with its completing beat;
    // reconstruct peak times accordingly
    if peak_times.len() < 2 {
        return Err(CliError::insufficient(STAGE, format!("{}: too few intervals", path.display())));
    }
    Ok(RrSeries { peak_times, rr: rr[1..].to_vec(), rejected_count: 0 })
}

pub fn write_rr(path: &Path, rr: &RrSeries) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "time,rr").map_err(|e| io_err(STAGE, path, e))?;
    // first row anchors the first beat; its interval is undefined
    writeln!(w, "{},0", rr.peak_times[0]).map_err(|e| io_err(STAGE, path, e))?;
    for (t, v) in rr.peak_times.iter().skip(1).zip(&rr.rr) {
        writeln!(w, "{t},{v}").map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

pub fn write_hrv_frames(path: &Path, frames: &[HrvFrame]) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "minute,n_beats,tri,mean_rr,sdnn,rmssd,pnn50").map_err(|e| io_err(STAGE, path, e))?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for f in frames {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            f.minute_index,
            f.n_beats,
            fmt(f.tri),
            fmt(f.mean_rr),
            fmt(f.sdnn),
            fmt(f.rmssd),
            fmt(f.pnn50)
        )
        .map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EmbeddingSidecar {
    pub p: usize,
    pub tau: usize,
    pub q: usize,
    pub r: usize,
    pub dt: f64,
}

fn write_matrix_csv(path: &Path, rows: usize, cols: usize, get: impl Fn(usize, usize) -> f64) -> CliResult<()> {
    let mut w = create(path)?;
    for i in 0..rows {
        let mut line = String::new();
        for j in 0..cols {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&get(i, j).to_string());
        }
        writeln!(w, "{line}").map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

/// Writes `U.csv`, `S.csv`, `V.csv`, and `embedding.json` into a directory.
pub fn write_embedding(dir: &Path, emb: &DelayEmbedding) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(STAGE, dir, e))?;
    let (p, _) = emb.hankel.shape();
    let q = emb.snapshots();
    let m = emb.svd_s.len();
    write_matrix_csv(&dir.join("U.csv"), p, m, |i, j| emb.svd_u[(i, j)])?;
    write_matrix_csv(&dir.join("S.csv"), m, 1, |i, _| emb.svd_s[i])?;
    write_matrix_csv(&dir.join("V.csv"), q, m, |i, j| emb.svd_v[(i, j)])?;
    let sidecar = EmbeddingSidecar { p, tau: emb.lag_tau, q, r: emb.rank_r, dt: emb.dt };
    serde_json::to_writer_pretty(create(&dir.join("embedding.json"))?, &sidecar)
        .map_err(|e| CliError::input(STAGE, e.to_string()))?;
    Ok(())
}

/// Loads the `V` factor and sidecar back as fit input.
pub fn read_embedding_coords(dir: &Path) -> CliResult<(havok_core::CoordinateSeries, EmbeddingSidecar, Vec<f64>)> {
    let sidecar: EmbeddingSidecar = serde_json::from_reader(open(&dir.join("embedding.json"))?)
        .map_err(|e| CliError::input(STAGE, format!("{}: {e}", dir.join("embedding.json").display())))?;
    let path = dir.join("V.csv");
    let reader = open(&path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(STAGE, &path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: CliResult<Vec<f64>> =
            line.split(',').map(|f| parse_f64(f, &path, idx + 1)).collect();
        rows.push(row?);
    }
    if rows.len() != sidecar.q {
        return Err(CliError::input(
            STAGE,
            format!("V.csv has {} rows, sidecar says q = {}", rows.len(), sidecar.q),
        ));
    }
    let r = sidecar.r;
    let mut v = havok_core::nalgebra::DMatrix::<f64>::zeros(rows.len(), r);
    for (i, row) in rows.iter().enumerate() {
        if row.len() < r {
            return Err(CliError::input(STAGE, format!("V.csv row {i} shorter than rank {r}")));
        }
        for j in 0..r {
            v[(i, j)] = row[j];
        }
    }
    let s_path = dir.join("S.csv");
    let s_reader = open(&s_path)?;
    let mut s = Vec::new();
    for (idx, line) in s_reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(STAGE, &s_path, e))?;
        if !line.trim().is_empty() {
            s.push(parse_f64(&line, &s_path, idx + 1)?);
        }
    }
    Ok((havok_core::CoordinateSeries { v, dt: sidecar.dt }, sidecar, s))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub r: usize,
    pub dt: f64,
    pub mode: String,
    /// Row-major `(r-1) x (r-1)` dynamics matrix.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub residual_row_norm: f64,
}

pub fn write_model(path: &Path, model: &HavokModel) -> CliResult<()> {
    let d = model.r - 1;
    let mut a = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            a.push(model.a[(i, j)]);
        }
    }
    let file = ModelFile {
        r: model.r,
        dt: model.dt,
        mode: match model.mode {
            FitMode::Discrete => "discrete".into(),
            FitMode::Derivative => "derivative".into(),
        },
        a,
        b: model.b.iter().copied().collect(),
        residual_row_norm: model.residual_row_norm,
    };
    serde_json::to_writer_pretty(create(path)?, &file)
        .map_err(|e| CliError::input(STAGE, e.to_string()))?;
    Ok(())
}

pub fn read_model(path: &Path) -> CliResult<HavokModel> {
    let file: ModelFile = serde_json::from_reader(open(path)?)
        .map_err(|e| CliError::input(STAGE, format!("{}: {e}", path.display())))?;
    if file.r < 2 {
        return Err(CliError::input(STAGE, "model rank below 2"));
    }
    let d = file.r - 1;
    if file.a.len() != d * d || file.b.len() != d {
        return Err(CliError::input(
            STAGE,
            format!("model shape mismatch: r = {}, |A| = {}, |B| = {}", file.r, file.a.len(), file.b.len()),
        ));
    }
    let mode = match file.mode.as_str() {
        "discrete" => FitMode::Discrete,
        "derivative" => FitMode::Derivative,
        other => return Err(CliError::input(STAGE, format!("unknown model mode '{other}'"))),
    };
    Ok(HavokModel {
        a: havok_core::nalgebra::DMatrix::from_row_slice(d, d, &file.a),
        b: havok_core::nalgebra::DVector::from_column_slice(&file.b),
        mode,
        residual_row_norm: file.residual_row_norm,
        r: file.r,
        dt: file.dt,
    })
}

pub fn write_bursts(path: &Path, analysis: &BurstAnalysis) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "k,t_s,t_e,Tb").map_err(|e| io_err(STAGE, path, e))?;
    for (k, b) in analysis.bursts.iter().enumerate() {
        writeln!(w, "{k},{},{},{}", b.t_start, b.t_end, b.duration())
            .map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

pub fn burst_summary_json(analysis: &BurstAnalysis, stats: &BurstStatistics) -> serde_json::Value {
    serde_json::json!({
        "psi": analysis.psi,
        "threshold": analysis.threshold,
        "n_bursts": stats.n_bursts,
        "tb_mean": stats.tb_mean,
        "tb_sd": stats.tb_sd,
        "tib_mean": stats.tib_mean,
        "tib_sd": stats.tib_sd,
    })
}

pub fn write_distribution(path: &Path, est: &DistributionEstimate) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "bin_center,density,gaussian_ref").map_err(|e| io_err(STAGE, path, e))?;
    for ((c, d), g) in est.bin_centers().iter().zip(&est.density).zip(&est.gaussian_ref) {
        writeln!(w, "{c},{d},{g}").map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

pub fn write_spectrum(path: &Path, spec: &SpectrumResult) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "freq_hz,amplitude,power").map_err(|e| io_err(STAGE, path, e))?;
    for ((f, a), p) in spec.freqs.iter().zip(&spec.amplitude).zip(&spec.power) {
        writeln!(w, "{f},{a},{p}").map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

/// Time indices that downsample `n` columns to at most `max_cols`.
pub fn downsample_indices(n: usize, max_cols: usize) -> Vec<usize> {
    if n <= max_cols {
        return (0..n).collect();
    }
    (0..max_cols).map(|k| k * (n - 1) / (max_cols - 1)).collect()
}

/// Scalogram grid CSV: first row holds times, first column holds
/// frequencies. Time axis capped at 4096 columns for plot files.
pub fn write_scalogram_csv(path: &Path, sg: &Scalogram) -> CliResult<()> {
    let mut w = create(path)?;
    let idx = downsample_indices(sg.times.len(), 4096);
    let mut header = String::from("freq_hz");
    for &i in &idx {
        header.push(',');
        header.push_str(&sg.times[i].to_string());
    }
    writeln!(w, "{header}").map_err(|e| io_err(STAGE, path, e))?;
    for (s, row) in sg.modulus.iter().enumerate() {
        let mut line = sg.freqs[s].to_string();
        for &i in &idx {
            line.push(',');
            line.push_str(&row[i].to_string());
        }
        writeln!(w, "{line}").map_err(|e| io_err(STAGE, path, e))?;
    }
    Ok(())
}

/// Full-resolution scalogram dump: little-endian f64, row-major
/// (scales x times), with a JSON sidecar describing the axes.
pub fn write_scalogram_binary(path: &Path, sg: &Scalogram) -> CliResult<()> {
    let mut w = create(path)?;
    for row in &sg.modulus {
        for v in row {
            w.write_all(&v.to_le_bytes()).map_err(|e| io_err(STAGE, path, e))?;
        }
    }
    let sidecar = serde_json::json!({
        "rows": sg.modulus.len(),
        "cols": sg.times.len(),
        "freqs_hz": sg.freqs,
        "t0": sg.times.first().copied().unwrap_or(0.0),
        "dt": if sg.times.len() > 1 { sg.times[1] - sg.times[0] } else { 0.0 },
        "layout": "row-major scales x times, f64 little-endian",
    });
    let sidecar_path = path.with_extension("json");
    serde_json::to_writer_pretty(create(&sidecar_path)?, &sidecar)
        .map_err(|e| CliError::input(STAGE, e.to_string()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut w = create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::input(STAGE, e.to_string()))?;
    writeln!(w, "{text}").map_err(|e| io_err(STAGE, path, e))?;
    Ok(())
}
