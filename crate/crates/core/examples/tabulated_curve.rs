//! A pool described by a table of (price, reserves) points, checked against
//! the envelope property V'(Q) = x*(Q) and simulated against a fixed-slope venue.

use std::path::Path;

use lvrlab::analytics::{ell, ell_at, LvrParams};
use lvrlab::arb_engine::{run_experiment, ExecutionPriceConvention, SimConfig};
use lvrlab::cost_models::{CostModel, LiquidVenue};
use lvrlab::curves::{Curve, LiquidityCurve, TabulatedCurve};
use lvrlab::price_dynamics::GbmSpec;

fn main() -> lvrlab::Result<()> {
    let csv = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demand_curve.csv");
    let table = TabulatedCurve::from_csv_path(&csv, 0.0)?;
    let (lo, hi) = table.domain();
    println!("table covers Q in [{lo}, {hi}] with {} knots", table.knots().count());

    for q in [0.5, 1.0, 2.0] {
        let h = 1e-6 * q;
        let dv = (table.value(q + h)? - table.value(q - h)?) / (2.0 * h);
        println!("Q = {q}: x* = {:.6}, dV/dQ = {dv:.6}", table.reserves_risky(q)?);
    }

    let liquid = LiquidVenue::FixedSlope(10.0);
    let sigma = 0.2;
    let rate = ell_at(&table, &liquid, sigma, 1.0)?;
    let check = ell(&LvrParams {
        sigma,
        q: 1.0,
        illiquid_slope: table.slope(1.0)?.abs(),
        liquid_slope: 10.0,
    });
    println!("ℓ(σ = {sigma}, Q = 1) = {rate:.6} (direct formula {check:.6})");

    let config = SimConfig {
        gbm: GbmSpec::new(1.0, sigma, 1.0, 1_000)?,
        illiquid: Curve::Tabulated(table),
        liquid,
        cost: CostModel::Quadratic,
        convention: ExecutionPriceConvention::NewPrice,
        paths: 1_000,
        master_seed: 3,
    };
    let s = run_experiment(&config)?;
    println!(
        "mean ARB = {:.6} ± {:.1e}, mean ∫ℓdt = {:.6}",
        s.arb_gain.mean, s.arb_gain.stderr, s.lvr_closed.mean
    );
    Ok(())
}
