//! How LVR shrinks when the liquid venue is only `r` times deeper than
//! the pool: ℓ/V = σ²/8·(1 − 1/r) for two CPMMs.

use lvrlab::analytics::{normalized_lvr, RelativeLiquidity};
use lvrlab::arb_engine::{run_experiment, ExecutionPriceConvention, SimConfig};
use lvrlab::cost_models::{CostModel, LiquidVenue};
use lvrlab::curves::Curve;
use lvrlab::price_dynamics::GbmSpec;

fn main() -> lvrlab::Result<()> {
    let sigma = 0.3;
    println!("{:>6} {:>12} {:>12} {:>10}", "r", "theory", "simulated", "stderr");
    for r in [1.5, 2.0, 4.0, 10.0, 100.0] {
        let config = SimConfig {
            gbm: GbmSpec::new(1.0, sigma, 0.25, 2_000)?,
            illiquid: Curve::cpmm(1.0)?,
            liquid: LiquidVenue::Curve(Curve::cpmm(r)?),
            cost: CostModel::Quadratic,
            convention: ExecutionPriceConvention::NewPrice,
            paths: 1_000,
            master_seed: 11,
        };
        let s = run_experiment(&config)?;
        let theory = normalized_lvr(sigma, RelativeLiquidity::new(r)?);
        println!(
            "{r:>6} {theory:>12.6} {:>12.6} {:>10.1e}",
            s.arb_per_value.mean, s.arb_per_value.stderr
        );
    }
    Ok(())
}
