//! CSV report emission. The schemas are fixed; rationals are `p/q` strings
//! so exactness survives the file. Files are written atomically
//! (temp-then-rename) so a crashed run never leaves a torn report.

use std::fs;
use std::path::Path;

use crate::construction::DeviationReport;
use crate::error::Result;
use crate::text::format_rational;
use crate::trace::TraceRow;

pub const REPORT_HEADER: &str =
    "k,N_k,h_k,eps_k,delta_k,integral_fk,stage_prob,stage_radius,final_prob,final_radius,floor,method,seed";

pub const TRACE_HEADER: &str = "x_id,N,average,integral,abs_deviation";

/// One row per stage, construct and verify alike.
pub fn report_csv(report: &DeviationReport) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for s in &report.stages {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.k,
            s.n_scale,
            s.height,
            format_rational(&s.eps),
            format_rational(&s.delta),
            format_rational(&s.integral_fk),
            format_rational(&s.stage_estimate.probability),
            s.stage_estimate.confidence_radius,
            format_rational(&s.final_estimate.probability),
            s.final_estimate.confidence_radius,
            format_rational(&s.floor),
            s.final_estimate.method.as_str(),
            report.seed,
        ));
    }
    out
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.x_id,
            r.n,
            format_rational(&r.average),
            format_rational(&r.integral),
            format_rational(&r.abs_deviation),
        ));
    }
    out
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = Path::new(&tmp);
    fs::write(tmp_path, content)?;
    fs::rename(tmp_path, path)?;
    Ok(())
}
