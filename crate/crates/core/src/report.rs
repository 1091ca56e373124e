//! CSV tables and the run manifest.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{normalized_lvr, LvrTableRow, RelativeLiquidity};
use crate::arb_engine::{ConvergenceTable, ExperimentSummary, SimConfig};
use crate::config::ExperimentConfig;
use crate::cost_models::LiquidVenue;
use crate::curves::Curve;
use crate::stats::LinearFit;

pub const SUMMARY_HEADER: &str = "metric,mean,stderr,paths,steps";

pub fn write_summary<W: Write>(summary: &ExperimentSummary, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for (name, est) in summary.metrics() {
        writeln!(
            out,
            "{name},{},{},{},{}",
            est.mean, est.stderr, summary.paths, summary.steps
        )?;
    }
    Ok(())
}

pub fn write_convergence<W: Write>(table: &ConvergenceTable, mut out: W) -> std::io::Result<()> {
    let first = match table.rows.first() {
        Some(r) => r,
        None => return Ok(()),
    };
    write!(out, "steps,paths")?;
    for (name, _) in first.metrics() {
        write!(out, ",{name}_mean,{name}_se")?;
    }
    writeln!(out)?;
    for row in &table.rows {
        write!(out, "{},{}", row.steps, row.paths)?;
        for (_, est) in row.metrics() {
            write!(out, ",{},{}", est.mean, est.stderr)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub const FITS_HEADER: &str = "metric,slope,intercept,r2";

/// Log-log growth exponents; metrics that cannot be fitted print `nan`.
pub fn write_fits<W: Write>(table: &ConvergenceTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{FITS_HEADER}")?;
    let rows: [(&str, Option<LinearFit>); 4] = [
        ("convention_gap", table.convention_gap_fit),
        ("abs_variation", table.abs_variation_fit),
        ("cost_total", table.cost_total_fit),
        ("arb_minus_closed", table.arb_gap_fit),
    ];
    for (name, fit) in rows {
        match fit {
            Some(f) => writeln!(out, "{name},{},{},{}", f.slope, f.intercept, f.r2)?,
            None => writeln!(out, "{name},nan,nan,nan")?,
        }
    }
    Ok(())
}

/// The `ℓ/V` comparison row, available when both venues are CPMMs or the
/// liquid venue is perfectly liquid.
pub fn lvr_table_row(config: &SimConfig, summary: &ExperimentSummary) -> Option<LvrTableRow> {
    let pool = config.illiquid.as_cpmm()?;
    let r = match &config.liquid {
        LiquidVenue::Infinite => RelativeLiquidity::INFINITE,
        LiquidVenue::Curve(Curve::Cpmm(c)) => {
            RelativeLiquidity::new(c.invariant_root() / pool.invariant_root()).ok()?
        }
        _ => return None,
    };
    Some(LvrTableRow {
        sigma: config.gbm.sigma,
        r: r.value(),
        ell_over_v_theory: normalized_lvr(config.gbm.sigma, r),
        ell_over_v_mc: summary.arb_per_value.mean,
        stderr: summary.arb_per_value.stderr,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<usize>>,
    #[serde(default)]
    pub traces: usize,
    pub wall_clock_secs: f64,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| crate::Error::Parse {
            line: e.line() as u64,
            reason: e.to_string(),
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arb_engine::{run_experiment, ExecutionPriceConvention};
    use crate::cost_models::CostModel;
    use crate::price_dynamics::GbmSpec;

    fn config(liquid: LiquidVenue) -> SimConfig {
        SimConfig {
            gbm: GbmSpec::new(1.0, 0.3, 1.0, 50).unwrap(),
            illiquid: Curve::cpmm(2.0).unwrap(),
            liquid,
            cost: CostModel::Quadratic,
            convention: ExecutionPriceConvention::NewPrice,
            paths: 8,
            master_seed: 1,
        }
    }

    #[test]
    fn summary_layout() {
        let cfg = config(LiquidVenue::Infinite);
        let s = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_summary(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines.len(), 11);
        assert!(lines[1].starts_with("arb_gain,"));
        assert!(lines[1].ends_with(",8,50"));
    }

    #[test]
    fn lvr_row_needs_cpmm_pair() {
        let cfg = config(LiquidVenue::Curve(Curve::cpmm(8.0).unwrap()));
        let s = run_experiment(&cfg).unwrap();
        let row = lvr_table_row(&cfg, &s).unwrap();
        assert_eq!(row.r, 4.0);
        assert!((row.ell_over_v_theory - 0.09 / 8.0 * 0.75).abs() < 1e-15);
        assert!(lvr_table_row(&config(LiquidVenue::FixedSlope(1.0)), &s).is_none());
        assert!(lvr_table_row(&config(LiquidVenue::Infinite), &s).unwrap().r.is_infinite());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
