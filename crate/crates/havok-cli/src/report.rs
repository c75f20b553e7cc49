//! Per-record report rows and pooled summaries across records.

use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use havok_core::{pearson_test, stats};

use crate::error::{io_err, CliError, CliResult};

const STAGE: &str = "report";

/// One analyzed record: the summary-table row plus provenance.
///
/// Durations are minutes and band edges millihertz, matching the
/// case-study reporting units regardless of the input sample interval.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RecordReport {
    pub record_id: String,
    /// Apnea-hypopnea index supplied as metadata; absent for
    /// non-clinical inputs.
    pub ahi: Option<f64>,
    pub rank_r: usize,
    /// Percent of squared singular-value energy in the forcing coordinate.
    pub vr_energy_pct: f64,
    pub psi: f64,
    pub n_bursts: usize,
    pub tb_mean_min: Option<f64>,
    pub tb_sd_min: Option<f64>,
    pub tib_mean_min: Option<f64>,
    pub tib_sd_min: Option<f64>,
    pub f_l_mhz: Option<f64>,
    pub f_h_mhz: Option<f64>,
    /// Fisher excess kurtosis of the forcing samples.
    pub forcing_excess_kurtosis: f64,
    /// Empirical mass beyond three standard deviations.
    pub forcing_tail_mass_3sigma: f64,
    /// Fraction of bursts touching an apnea-labeled minute; absent
    /// without annotations.
    pub overlap_fraction: Option<f64>,
    pub point_biserial_r: Option<f64>,
    pub association_p_value: Option<f64>,
    pub config_hash: String,
    pub tool_version: String,
    /// Wall-clock stamp; the only field allowed to differ between
    /// reruns on identical input.
    pub generated_unix_s: u64,
}

/// Mean and sample SD of one pooled column.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PooledColumn {
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub n: usize,
}

fn pool_column(values: &[f64]) -> PooledColumn {
    PooledColumn { mean: stats::mean(values), sd: stats::sample_sd(values), n: values.len() }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PearsonSummary {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Pooled statistics over a set of record reports.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PooledSummary {
    pub n_records: usize,
    pub ahi: PooledColumn,
    pub rank_r: PooledColumn,
    pub vr_energy_pct: PooledColumn,
    pub tb_mean_min: PooledColumn,
    pub tib_mean_min: PooledColumn,
    pub f_l_mhz: PooledColumn,
    pub f_h_mhz: PooledColumn,
    /// Pearson test of AHI against mean burst duration.
    pub ahi_vs_tb: Option<PearsonSummary>,
    /// Pearson test of AHI against mean inter-burst duration.
    pub ahi_vs_tib: Option<PearsonSummary>,
    /// Set when the correlations could not be computed.
    pub correlation_note: Option<String>,
}

/// Column-wise means and SDs plus the two AHI correlation tests.
///
/// Correlations need at least three records with both members present;
/// below that the pooled means are still produced and the note says why
/// the tests are missing.
pub fn pool_reports(reports: &[RecordReport]) -> CliResult<PooledSummary> {
    if reports.is_empty() {
        return Err(CliError::insufficient(STAGE, "no reports to pool"));
    }
    let collect = |f: &dyn Fn(&RecordReport) -> Option<f64>| -> Vec<f64> {
        reports.iter().filter_map(f).collect()
    };
    let ahi = collect(&|r| r.ahi);
    let tb = collect(&|r| r.tb_mean_min);
    let tib = collect(&|r| r.tib_mean_min);

    let paired = |y: &dyn Fn(&RecordReport) -> Option<f64>| -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for r in reports {
            if let (Some(a), Some(b)) = (r.ahi, y(r)) {
                xs.push(a);
                ys.push(b);
            }
        }
        (xs, ys)
    };
    let mut correlation_note = None;
    let mut run_test = |y: &dyn Fn(&RecordReport) -> Option<f64>| -> Option<PearsonSummary> {
        let (xs, ys) = paired(y);
        if xs.len() < 3 {
            correlation_note =
                Some(format!("insufficient records for correlation ({} < 3)", xs.len()));
            return None;
        }
        match pearson_test(&xs, &ys) {
            Ok(res) => Some(PearsonSummary { r: res.r, p_value: res.p_value, n: xs.len() }),
            Err(e) => {
                correlation_note = Some(format!("correlation undefined: {e}"));
                None
            }
        }
    };
    let ahi_vs_tb = run_test(&|r| r.tb_mean_min);
    let ahi_vs_tib = run_test(&|r| r.tib_mean_min);

    Ok(PooledSummary {
        n_records: reports.len(),
        ahi: pool_column(&ahi),
        rank_r: pool_column(&reports.iter().map(|r| r.rank_r as f64).collect::<Vec<_>>()),
        vr_energy_pct: pool_column(
            &reports.iter().map(|r| r.vr_energy_pct).collect::<Vec<_>>(),
        ),
        tb_mean_min: pool_column(&tb),
        tib_mean_min: pool_column(&tib),
        f_l_mhz: pool_column(&collect(&|r| r.f_l_mhz)),
        f_h_mhz: pool_column(&collect(&|r| r.f_h_mhz)),
        ahi_vs_tb,
        ahi_vs_tib,
        correlation_note,
    })
}

/// Reads a summary table in CSV form:
/// `record_id,ahi,rank_r,vr_energy_pct,tb_mean,tb_sd,tib_mean,tib_sd,f_l_mhz,f_h_mhz`.
///
/// This is the same shape as a published per-patient summary table, so
/// pooled statistics can be reproduced without the restricted raw
/// recordings.
pub fn read_summary_table(path: &Path) -> CliResult<Vec<RecordReport>> {
    let file = std::fs::File::open(path).map_err(|e| io_err(STAGE, path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(STAGE, path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if idx == 0 && fields[1].parse::<f64>().is_err() {
            continue; // header
        }
        if fields.len() != 10 {
            return Err(CliError::input(
                STAGE,
                format!("{}:{}: expected 10 columns, got {}", path.display(), idx + 1, fields.len()),
            ));
        }
        let num = |k: usize| -> CliResult<f64> {
            fields[k].parse::<f64>().map_err(|_| {
                CliError::input(
                    STAGE,
                    format!("{}:{}: bad number '{}'", path.display(), idx + 1, fields[k]),
                )
            })
        };
        out.push(RecordReport {
            record_id: fields[0].to_string(),
            ahi: Some(num(1)?),
            rank_r: num(2)? as usize,
            vr_energy_pct: num(3)?,
            psi: 0.12,
            n_bursts: 0,
            tb_mean_min: Some(num(4)?),
            tb_sd_min: Some(num(5)?),
            tib_mean_min: Some(num(6)?),
            tib_sd_min: Some(num(7)?),
            f_l_mhz: Some(num(8)?),
            f_h_mhz: Some(num(9)?),
            forcing_excess_kurtosis: f64::NAN,
            forcing_tail_mass_3sigma: f64::NAN,
            overlap_fraction: None,
            point_biserial_r: None,
            association_p_value: None,
            config_hash: String::new(),
            tool_version: String::new(),
            generated_unix_s: 0,
        });
    }
    if out.is_empty() {
        return Err(CliError::insufficient(STAGE, format!("{}: no rows", path.display())));
    }
    Ok(out)
}

pub fn read_report(path: &Path) -> CliResult<RecordReport> {
    let file = std::fs::File::open(path).map_err(|e| io_err(STAGE, path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| CliError::input(STAGE, format!("{}: {e}", path.display())))
}
