//! The shared CSV report schema.
//!
//! Every command that reports metrics writes the same columns; floats
//! carry four decimals. One row per video (config column `video:<id>`)
//! plus one `aggregate` row per run.

use std::fs;
use std::path::Path;

use ddsam2_core::metrics::MetricsReport;

use crate::error::{CliError, Result};

pub const HEADER: &str = "method,config,dice_mean,dice_std,nsd_mean,nsd_std,hd95_mean,hd95_std,asd_mean,asd_std,params_trainable,params_total";

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub config: String,
    pub dice_mean: f64,
    pub dice_std: f64,
    pub nsd_mean: f64,
    pub nsd_std: f64,
    pub hd95_mean: f64,
    pub hd95_std: f64,
    pub asd_mean: f64,
    pub asd_std: f64,
    pub params_trainable: u64,
    pub params_total: u64,
}

impl ReportRow {
    pub fn from_metrics(
        method: &str,
        config: &str,
        m: &MetricsReport,
        params_trainable: u64,
        params_total: u64,
    ) -> Self {
        ReportRow {
            method: method.to_string(),
            config: config.to_string(),
            dice_mean: m.dice.mean,
            dice_std: m.dice.std,
            nsd_mean: m.nsd.mean,
            nsd_std: m.nsd.std,
            hd95_mean: m.hd95.mean,
            hd95_std: m.hd95.std,
            asd_mean: m.asd.mean,
            asd_std: m.asd.std,
            params_trainable,
            params_total,
        }
    }

    /// Aggregate a set of per-video rows: mean and population std of
    /// each per-video mean.
    pub fn aggregate(method: &str, config: &str, rows: &[ReportRow]) -> Self {
        let stat = |f: fn(&ReportRow) -> f64| {
            let n = rows.len() as f64;
            let mean = rows.iter().map(&f).sum::<f64>() / n;
            let var = rows.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        let (dice_mean, dice_std) = stat(|r| r.dice_mean);
        let (nsd_mean, nsd_std) = stat(|r| r.nsd_mean);
        let (hd95_mean, hd95_std) = stat(|r| r.hd95_mean);
        let (asd_mean, asd_std) = stat(|r| r.asd_mean);
        ReportRow {
            method: method.to_string(),
            config: config.to_string(),
            dice_mean,
            dice_std,
            nsd_mean,
            nsd_std,
            hd95_mean,
            hd95_std,
            asd_mean,
            asd_std,
            params_trainable: rows.first().map_or(0, |r| r.params_trainable),
            params_total: rows.first().map_or(0, |r| r.params_total),
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{},{}",
            self.method,
            self.config,
            self.dice_mean,
            self.dice_std,
            self.nsd_mean,
            self.nsd_std,
            self.hd95_mean,
            self.hd95_std,
            self.asd_mean,
            self.asd_std,
            self.params_trainable,
            self.params_total
        )
    }
}

pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut text = String::from(HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r.to_csv_line());
        text.push('\n');
    }
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Validate the header and parse all rows back.
pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Input(format!("{}: empty report", path.display())))?;
    check_schema(header).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(CliError::Input(format!(
                "{}: row {} has {} fields, expected 12",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| CliError::Input(format!("{}: bad number {s}", path.display())))
        };
        rows.push(ReportRow {
            method: fields[0].to_string(),
            config: fields[1].to_string(),
            dice_mean: num(fields[2])?,
            dice_std: num(fields[3])?,
            nsd_mean: num(fields[4])?,
            nsd_std: num(fields[5])?,
            hd95_mean: num(fields[6])?,
            hd95_std: num(fields[7])?,
            asd_mean: num(fields[8])?,
            asd_std: num(fields[9])?,
            params_trainable: fields[10]
                .parse()
                .map_err(|_| CliError::Input(format!("bad count {}", fields[10])))?,
            params_total: fields[11]
                .parse()
                .map_err(|_| CliError::Input(format!("bad count {}", fields[11])))?,
        });
    }
    Ok(rows)
}

/// The fixed column set, in order.
pub fn check_schema(header: &str) -> std::result::Result<(), String> {
    if header.trim_end() == HEADER {
        Ok(())
    } else {
        Err(format!("schema mismatch: got '{header}'"))
    }
}
