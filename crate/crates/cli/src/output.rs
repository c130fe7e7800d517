//! CSV and JSON serialization. All floats are written with 17 significant
//! digits so results round-trip exactly and runs are byte-comparable.

use std::io::Write;

use crate::CliError;

pub const SWEEP_HEADER: &str = "method,n,gamma_db,value,rel_error,runs,seconds,reliable";
pub const PLAN_HEADER: &str = "method,n,gamma_db,runs";

/// 17 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Planned run counts: exact integers while they fit, scientific beyond.
pub fn format_runs(x: f64) -> String {
    if x < 9.0e15 {
        format!("{x:.0}")
    } else {
        format_float(x)
    }
}

/// One row of a sweep or comparison CSV.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub method: &'static str,
    pub n: usize,
    pub gamma_db: f64,
    pub value: Option<f64>,
    pub rel_error: Option<f64>,
    pub runs: Option<u64>,
    pub seconds: Option<f64>,
    pub reliable: bool,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.method,
            self.n,
            format_float(self.gamma_db),
            format_opt(self.value),
            format_opt(self.rel_error),
            self.runs.map(|r| r.to_string()).unwrap_or_default(),
            format_opt(self.seconds),
            self.reliable
        )
    }
}

/// One row of a plan CSV.
#[derive(Debug, Clone)]
pub struct PlanRow {
    pub method: &'static str,
    pub n: usize,
    pub gamma_db: f64,
    pub runs: Option<f64>,
}

impl PlanRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.method,
            self.n,
            format_float(self.gamma_db),
            self.runs.map(format_runs).unwrap_or_default()
        )
    }
}

/// Write lines to `path`, or stdout when no path is given.
pub fn write_lines(path: Option<&std::path::Path>, lines: &[String]) -> Result<(), CliError> {
    let body = lines.join("\n") + "\n";
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::numeric(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .map_err(|e| CliError::numeric(format!("stdout write failed: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_17_significant_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(1.9646e-12), "1.9645999999999999e-12");
        assert_eq!(format_float(-5.0), "-5.0000000000000000e0");
        // round-trips exactly
        assert_eq!("1.9645999999999999e-12".parse::<f64>().unwrap(), 1.9646e-12);
    }

    #[test]
    fn run_counts_stay_integral_when_possible() {
        assert_eq!(format_runs(1537.0), "1537");
        assert_eq!(format_runs(7.6057e14), "760570000000000");
        assert_eq!(format_runs(1.5947e43), "1.5946999999999999e43");
    }

    #[test]
    fn empty_cells_for_missing_values() {
        let row = SweepRow {
            method: "imhof",
            n: 20,
            gamma_db: 5.0,
            value: None,
            rel_error: None,
            runs: None,
            seconds: Some(0.25),
            reliable: false,
        };
        let line = row.to_csv_line();
        assert!(line.starts_with("imhof,20,5.0000000000000000e0,,,,"));
        assert!(line.ends_with(",false"));
    }
}
