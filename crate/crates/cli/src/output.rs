use std::io::Write;

use tgeo_core::VerificationReport;

use crate::config::{Format, RunConfig};

/// CSV rows a command wants to emit instead of the per-check listing.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn checks_table(r: &VerificationReport) -> Table {
    let mut rows: Vec<Vec<String>> = r
        .checks
        .iter()
        .map(|c| {
            let v = if c.verdict.is_pass() { "pass" } else { "fail" };
            vec![c.name.clone(), c.samples.to_string(), num(c.max_residual), num(c.tolerance), v.into()]
        })
        .collect();
    let v = if r.passed() { "pass" } else { "fail" };
    rows.push(vec!["overall".into(), r.samples.to_string(), num(r.max_residual), num(r.tolerance), v.into()]);
    Table { header: vec!["check", "samples", "max_residual", "tolerance", "verdict"], rows }
}

pub fn render(cfg: &RunConfig, report: &VerificationReport, table: Option<&Table>) -> std::io::Result<Vec<u8>> {
    match cfg.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let own;
            let t = match table {
                Some(t) => t,
                None => {
                    own = checks_table(report);
                    &own
                }
            };
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&t.header)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
            w.into_inner().map_err(|e| e.into_error())
        }
    }
}

pub fn emit(cfg: &RunConfig, bytes: &[u8]) -> std::io::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

/// One-line summary for stderr.
pub fn summary(report: &VerificationReport) -> String {
    let verdict = if report.passed() { "pass" } else { "fail" };
    let mut s = format!(
        "{}: {verdict} (max residual {:.3e}, tolerance {:.1e}, {} samples)",
        report.check, report.max_residual, report.tolerance, report.samples
    );
    if let Some(c) = &report.conclusion {
        s.push_str(&format!(", conclusion: {c}"));
    }
    s
}
