//! Quadratic cost approximation versus the exact CPMM execution cost.

use lvrlab::cost_models::{cpmm_exact_cost, quadratic_cost};
use lvrlab::curves::{CpmmCurve, LiquidityCurve};

fn main() -> lvrlab::Result<()> {
    let venue = CpmmCurve::new(10.0)?;
    let q = 1.0;
    let x = venue.reserves_risky(q)?;
    let slope = venue.slope(q)?.abs();
    println!("venue reserves x̃ = {x}, |x̃'| = {slope}");
    println!("{:>10} {:>14} {:>14} {:>12} {:>12}", "dx/x̃", "quadratic", "exact", "rel. gap", "dx/(x̃+dx)");
    for ratio in [1e-4, 1e-3, 1e-2, 1e-1, 0.5] {
        let dx = ratio * x;
        let approx = quadratic_cost(slope, dx)?;
        let exact = cpmm_exact_cost(&venue, q, dx)?;
        println!(
            "{ratio:>10.0e} {approx:>14.6e} {exact:>14.6e} {:>12.4e} {:>12.4e}",
            (approx - exact) / approx,
            dx / (x + dx)
        );
    }
    Ok(())
}
