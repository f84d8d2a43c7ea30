//! CSV tables and the JSON run manifest.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::bounds::Certificate;
use super::registry::{Criterion, RatioReport};
use crate::error::Result;

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Serialize)]
struct ReportRow<'a> {
    id: &'a str,
    samples: usize,
    scales: String,
    max_ratio: String,
    normalized: String,
    exponent: f64,
    max_normalized: f64,
    slope: f64,
    rule: &'static str,
    ceiling: Option<f64>,
    contrast_slope: Option<f64>,
    pass: bool,
}

pub fn write_reports(path: &Path, reports: &[RatioReport]) -> Result<()> {
    let rows: Vec<ReportRow> = reports
        .iter()
        .map(|r| {
            let (rule, ceiling) = match r.criterion {
                Criterion::Exact => ("exact", None),
                Criterion::Bounded { ceiling } => ("bounded", Some(ceiling)),
                Criterion::Decay { .. } => ("decay", None),
            };
            ReportRow {
                id: &r.id,
                samples: r.samples,
                scales: join(&r.scales),
                max_ratio: join(&r.max_ratio),
                normalized: join(&r.normalized),
                exponent: r.exponent,
                max_normalized: r.max_normalized,
                slope: r.slope,
                rule,
                ceiling,
                contrast_slope: r.contrast_slope,
                pass: r.pass,
            }
        })
        .collect();
    write_csv(path, &rows)
}

#[derive(Debug, Serialize)]
struct CertificateRow {
    kind: &'static str,
    t: f64,
    lhs: f64,
    rhs: f64,
    margin: f64,
    inflation: f64,
}

pub fn write_certificates(path: &Path, certs: &[Certificate]) -> Result<()> {
    let mut rows = Vec::new();
    for c in certs {
        for i in 0..c.times.len() {
            rows.push(CertificateRow {
                kind: c.kind.name(),
                t: c.times[i],
                lhs: c.lhs[i],
                rhs: c.rhs[i],
                margin: c.margin[i],
                inflation: c.inflation,
            });
        }
    }
    write_csv(path, &rows)
}

/// Git-style object hash, `sha256("blob <len>\0" + content)`, in hex.
pub fn content_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_path: Option<String>,
    pub preset: Option<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub input_hash: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
    pub constants: serde_json::Value,
    pub status: String,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
