//! Deterministic file rendering: CSVs with fixed 17-significant-digit
//! floats so identical runs are byte-identical, plus the tidy plot-data
//! reshape.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use forkjoin::metrics::CcdfEstimate;

/// 17 significant digits round-trip f64 exactly.
pub fn render_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Four-column tail curve: tau, empirical survival, CI half-width, bound.
pub fn ccdf_csv(est: &CcdfEstimate, bound: impl Fn(f64) -> f64) -> String {
    let mut out = String::from("tau,empirical_survival,ci_halfwidth,bound_survival\n");
    for (i, &tau) in est.grid.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            render_f64(tau),
            render_f64(est.survival[i]),
            render_f64(est.ci_halfwidth[i]),
            render_f64(bound(tau)),
        );
    }
    out
}

/// One parsed row of a ccdf CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfRow {
    pub tau: f64,
    pub empirical_survival: f64,
    pub ci_halfwidth: f64,
    pub bound_survival: f64,
}

pub fn parse_ccdf_csv(path: &Path) -> Result<Vec<CcdfRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "tau,empirical_survival,ci_halfwidth,bound_survival" {
        bail!("{}: unexpected header {header:?}", path.display());
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let mut fields = line.split(',');
        let mut next = |name: &str| -> Result<f64> {
            fields
                .next()
                .with_context(|| format!("{}: row {}: missing {name}", path.display(), idx + 2))?
                .parse::<f64>()
                .with_context(|| format!("{}: row {}: bad {name}", path.display(), idx + 2))
        };
        rows.push(CcdfRow {
            tau: next("tau")?,
            empirical_survival: next("empirical_survival")?,
            ci_halfwidth: next("ci_halfwidth")?,
            bound_survival: next("bound_survival")?,
        });
    }
    Ok(rows)
}

/// Long-format plot rows (one per series per grid point):
/// scenario, n, k, tau, series in {empirical, bound}, value, ci.
pub fn plotdata_header() -> &'static str {
    "scenario,n,k,tau,series,value,ci\n"
}

pub fn plotdata_rows(scenario: &str, n: usize, k: usize, rows: &[CcdfRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "{scenario},{n},{k},{},empirical,{},{}",
            render_f64(r.tau),
            render_f64(r.empirical_survival),
            render_f64(r.ci_halfwidth),
        );
        let _ = writeln!(
            out,
            "{scenario},{n},{k},{},bound,{},{}",
            render_f64(r.tau),
            render_f64(r.bound_survival),
            render_f64(0.0),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendered_floats_round_trip_exactly() {
        for x in [
            0.1,
            2.0 / 3.0,
            1.0 - 1e-12,
            6.02e23,
            5e-324,
            1.7976931348623157e308,
        ] {
            assert_eq!(render_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn ccdf_csv_round_trips() {
        let est = CcdfEstimate {
            grid: vec![0.5, 1.0, 2.0],
            survival: vec![0.9, 0.5, 0.1],
            ci_halfwidth: vec![0.01, 0.02, 0.005],
            sample_count: 1000,
        };
        let csv = ccdf_csv(&est, |tau| (-tau).exp());
        let tmp = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(tmp.path(), &csv).unwrap();
        let rows = parse_ccdf_csv(tmp.path()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].tau, 1.0);
        assert_eq!(rows[1].empirical_survival, 0.5);
        assert_eq!(rows[2].bound_survival, (-2.0f64).exp());
    }
}
