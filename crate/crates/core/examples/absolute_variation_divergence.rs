//! With a constant marginal trading cost the total cost grows like √N,
//! because the absolute variation of the pool's inventory diverges.

use lvrlab::arb_engine::{run_experiment, ExecutionPriceConvention, SimConfig};
use lvrlab::cost_models::{CostModel, LiquidVenue, PiecewiseMarginalCost};
use lvrlab::curves::Curve;
use lvrlab::price_dynamics::GbmSpec;
use lvrlab::stats::loglog_fit;

fn main() -> lvrlab::Result<()> {
    // α far above any single-step trade keeps every trade on the constant branch
    let cost = CostModel::Piecewise(PiecewiseMarginalCost::new(0.01, 1.0, 1.0)?);
    let ns = [100usize, 1_000, 10_000, 100_000];
    let mut totals = Vec::new();
    for &steps in &ns {
        let config = SimConfig {
            gbm: GbmSpec::new(1.0, 0.2, 1.0, steps)?,
            illiquid: Curve::cpmm(1.0)?,
            liquid: LiquidVenue::Infinite,
            cost,
            convention: ExecutionPriceConvention::NewPrice,
            paths: 200,
            master_seed: 8,
        };
        let s = run_experiment(&config)?;
        println!(
            "N = {steps:>6}: Σ|Δx*| = {:.4}, total cost = {:.5}",
            s.abs_variation.mean, s.cost_total.mean
        );
        totals.push(s.cost_total.mean);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    if let Some(fit) = loglog_fit(&xs, &totals) {
        println!("log-log slope {:.3} (R² {:.4})", fit.slope, fit.r2);
    }
    Ok(())
}
