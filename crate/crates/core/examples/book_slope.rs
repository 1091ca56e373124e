//! Estimates the marginal-liquidity slope |x̃'| from an order-book snapshot
//! and fits the piecewise cost model to a book with a heavy touch.

use std::path::Path;

use lvrlab::book_depth::{estimate_slope, fit_piecewise_cost, parse_snapshot_path, DEFAULT_WINDOW_BPS};

fn main() -> lvrlab::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    let book = parse_snapshot_path(dir.join("linear_book.csv"))?;
    for bps in [25.0, DEFAULT_WINDOW_BPS, 100.0] {
        let est = estimate_slope(&book, bps)?;
        println!(
            "window {bps:>5} bps: slope {:.6} over {} levels (R² {:.4})",
            est.slope_magnitude, est.n_levels, est.r2
        );
    }

    let heavy = parse_snapshot_path(dir.join("top_heavy_book.csv"))?;
    let fit = fit_piecewise_cost(&heavy)?;
    println!(
        "top-heavy book: c = {:.4}, α = {:.2}, slope = {:.4}",
        fit.c(),
        fit.alpha(),
        fit.slope_magnitude()
    );
    for dx in [0.5, 3.0, 5.0] {
        println!("  cost of trading {dx}: {:.5}", fit.total(dx)?);
    }
    Ok(())
}
