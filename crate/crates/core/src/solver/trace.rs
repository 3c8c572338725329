//! Trace CSV and one-line run summaries.
//!
//! With [`Encoding::Binary`] every float is written as the hexadecimal bit
//! pattern of its `f64` and the wall-clock column is left out, so repeated
//! runs produce identical bytes.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::spectral::io::Encoding;

use super::continuation::{SolveReport, SolveStatus};

const COLUMNS: &str =
    "t,dt,accepted,newton_iterations,krylov_iterations,residual,min_a,min_b,lemma21_slack,min_lambda_minus,shift";

fn float(value: f64, encoding: Encoding) -> String {
    match encoding {
        Encoding::Csv => format!("{value:e}"),
        Encoding::Binary => format!("0x{:016x}", value.to_bits()),
    }
}

pub fn trace_csv(report: &SolveReport, encoding: Encoding) -> String {
    let mut out = String::from(COLUMNS);
    if encoding == Encoding::Csv {
        out.push_str(",wall_seconds");
    }
    out.push('\n');
    for e in &report.trace {
        let floats = [
            e.t,
            e.dt,
            e.residual,
            e.min_a,
            e.min_b,
            e.lemma21_slack,
            e.min_lambda_minus,
            e.shift,
        ]
        .map(|v| float(v, encoding));
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            floats[0],
            floats[1],
            u8::from(e.accepted),
            e.newton_iterations,
            e.krylov_iterations,
            floats[2],
            floats[3],
            floats[4],
            floats[5],
            floats[6],
            floats[7],
        );
        if encoding == Encoding::Csv {
            let _ = write!(out, ",{:.6}", e.wall_seconds);
        }
        out.push('\n');
    }
    out
}

pub fn write_trace<W: Write>(
    report: &SolveReport,
    encoding: Encoding,
    mut writer: W,
) -> io::Result<()> {
    writer.write_all(trace_csv(report, encoding).as_bytes())
}

/// `{"status": ..., ...}` summary of a run.
pub fn summary_line(report: &SolveReport) -> String {
    let (status, t) = match report.status {
        SolveStatus::Converged => ("converged", 1.0),
        SolveStatus::Stalled { t } => ("stalled", t),
    };
    format!(
        "{{\"status\":\"{status}\",\"t\":{t},\"steps\":{},\"newton_iterations\":{},\"krylov_iterations\":{},\"residual\":{:e},\"min_a\":{:e},\"min_b\":{:e},\"lemma21_slack\":{:e},\"min_lambda_minus\":{:e},\"shift\":{:e}}}",
        report.trace.len(),
        report.newton_iterations(),
        report.krylov_iterations(),
        report.residual_norm,
        report.monitor.min_a,
        report.monitor.min_b,
        report.monitor.min_lemma21_slack,
        report.monitor.min_lambda_minus,
        report.shift,
    )
}
