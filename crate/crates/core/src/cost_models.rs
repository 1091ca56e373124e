//! Trading cost on the liquid venue, in numéraire units.
//!
//! The main model charges `Δx² / (2|x̃*'(Q)|)` for a trade of `Δx` risky
//! units, which is the slippage of a linear price impact. For a CPMM liquid
//! venue this approximates the exact slippage `Q·Δx² / (x̃(Q) + Δx)`. The
//! piecewise model has constant marginal cost `c` up to a size `α` and
//! linear marginal cost beyond it.

use crate::curves::{CpmmCurve, Curve, LiquidityCurve};
use crate::error::{Error, Result};

/// `Δx² / (2·slope_magnitude)`.
pub fn quadratic_cost(slope_magnitude: f64, dx: f64) -> Result<f64> {
    if slope_magnitude == f64::INFINITY {
        return Ok(0.0);
    }
    if !(slope_magnitude > 0.0) {
        return Err(Error::DegenerateLiquidity(slope_magnitude));
    }
    Ok(dx * dx / (2.0 * slope_magnitude))
}

/// Exact slippage of selling `dx` risky into a CPMM whose marginal price is `q`.
pub fn cpmm_exact_cost(liquid: &CpmmCurve, q: f64, dx: f64) -> Result<f64> {
    let x = liquid.reserves_risky(q)?;
    if x + dx <= 0.0 {
        return Err(Error::ReserveExhaustion { dx, reserves: x });
    }
    Ok(q * dx * dx / (x + dx))
}

/// The CPMM approximation written as `Q·Δx²/x̃(Q)`.
pub fn cpmm_approx_cost(liquid: &CpmmCurve, q: f64, dx: f64) -> Result<f64> {
    let x = liquid.reserves_risky(q)?;
    Ok(q * dx * dx / x)
}

/// Quadratic cost with a fixed marginal-liquidity slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCost {
    slope_magnitude: f64,
}

impl QuadraticCost {
    pub fn new(slope_magnitude: f64) -> Result<Self> {
        if !(slope_magnitude > 0.0) {
            return Err(Error::DegenerateLiquidity(slope_magnitude));
        }
        Ok(Self { slope_magnitude })
    }

    pub fn slope_magnitude(&self) -> f64 {
        self.slope_magnitude
    }

    /// The price argument is unused for a fixed slope; kept for symmetry
    /// with curve-backed evaluation.
    pub fn cost(&self, _q: f64, dx: f64) -> f64 {
        dx * dx / (2.0 * self.slope_magnitude)
    }
}

/// Constant marginal cost `c` up to `alpha`, then `c + (Δx − α)/slope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseMarginalCost {
    c: f64,
    alpha: f64,
    slope_magnitude: f64,
}

impl PiecewiseMarginalCost {
    pub fn new(c: f64, alpha: f64, slope_magnitude: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid("c", format!("must be positive, got {c}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if !(slope_magnitude > 0.0) {
            return Err(Error::DegenerateLiquidity(slope_magnitude));
        }
        Ok(Self {
            c,
            alpha,
            slope_magnitude,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn slope_magnitude(&self) -> f64 {
        self.slope_magnitude
    }

    /// `C'(dx)` for `dx >= 0`.
    pub fn marginal(&self, dx: f64) -> Result<f64> {
        if !(dx >= 0.0) {
            return Err(Error::Domain(format!(
                "piecewise marginal cost takes |dx|, got {dx}"
            )));
        }
        Ok(if dx <= self.alpha {
            self.c
        } else {
            (dx - self.alpha) / self.slope_magnitude + self.c
        })
    }

    /// `∫₀^dx C'(u) du` for `dx >= 0`.
    pub fn total(&self, dx: f64) -> Result<f64> {
        if !(dx >= 0.0) {
            return Err(Error::Domain(format!(
                "piecewise total cost takes |dx|, got {dx}"
            )));
        }
        let excess = (dx - self.alpha).max(0.0);
        Ok(self.c * dx + excess * excess / (2.0 * self.slope_magnitude))
    }
}

/// The liquid venue as seen by the arbitrageur: a source of `|x̃*'(Q)|`.
#[derive(Debug, Clone, PartialEq)]
pub enum LiquidVenue {
    /// Perfectly liquid benchmark; `|x̃*'| = +∞`.
    Infinite,
    FixedSlope(f64),
    Curve(Curve),
}

impl LiquidVenue {
    /// `|x̃*'(Q)|`, or `+∞` for the perfectly liquid benchmark.
    pub fn slope_magnitude(&self, q: f64) -> Result<f64> {
        match self {
            LiquidVenue::Infinite => Ok(f64::INFINITY),
            LiquidVenue::FixedSlope(s) => Ok(*s),
            LiquidVenue::Curve(c) => Ok(c.slope(q)?.abs()),
        }
    }
}

/// Which cost the arbitrageur pays on the liquid venue each step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CostModel {
    /// No trading cost, whatever the venue.
    Frictionless,
    /// `Δx²/(2|x̃*'(Q)|)` with the slope read from the liquid venue.
    #[default]
    Quadratic,
    /// Exact CPMM slippage; requires a CPMM liquid venue.
    CpmmExact,
    /// Piecewise marginal cost applied to `|Δx|`.
    Piecewise(PiecewiseMarginalCost),
}

impl CostModel {
    /// Cost of moving `dx` risky units through `venue` at pre-trade price `q`.
    pub fn cost(&self, venue: &LiquidVenue, q: f64, dx: f64) -> Result<f64> {
        match self {
            CostModel::Frictionless => Ok(0.0),
            CostModel::Quadratic => quadratic_cost(venue.slope_magnitude(q)?, dx),
            CostModel::CpmmExact => match venue {
                LiquidVenue::Curve(Curve::Cpmm(c)) => cpmm_exact_cost(c, q, dx),
                _ => Err(Error::invalid(
                    "cost",
                    "exact CPMM cost requires a CPMM liquid venue",
                )),
            },
            CostModel::Piecewise(p) => p.total(dx.abs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_examples() {
        assert_eq!(quadratic_cost(0.5, 0.0).unwrap(), 0.0);
        assert!((quadratic_cost(0.5, 0.1).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(quadratic_cost(0.5, -0.1).unwrap(), quadratic_cost(0.5, 0.1).unwrap());
        assert_eq!(quadratic_cost(f64::INFINITY, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_rejects_degenerate_slope() {
        assert_eq!(quadratic_cost(0.0, 1.0), Err(Error::DegenerateLiquidity(0.0)));
        assert!(quadratic_cost(-1.0, 1.0).is_err());
        assert!(QuadraticCost::new(0.0).is_err());
        assert!((QuadraticCost::new(0.5).unwrap().cost(7.0, 0.1) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn cpmm_exact_examples() {
        // x̃ = 100 at Q = 1 means K = 100
        let pool = CpmmCurve::new(100.0).unwrap();
        let exact = cpmm_exact_cost(&pool, 1.0, 1.0).unwrap();
        assert!((exact - 1.0 / 101.0).abs() < 1e-15);
        assert_eq!(cpmm_exact_cost(&pool, 1.0, 0.0).unwrap(), 0.0);
        let approx = cpmm_approx_cost(&pool, 1.0, 1.0).unwrap();
        assert!((approx - 0.01).abs() < 1e-15);
        assert!(((approx - exact) / approx - 1.0 / 101.0).abs() < 1e-12);
        assert!(matches!(
            cpmm_exact_cost(&pool, 1.0, -100.0),
            Err(Error::ReserveExhaustion { .. })
        ));
    }

    #[test]
    fn cpmm_exact_matches_trade_against_pool() {
        let pool = CpmmCurve::new(7.0).unwrap();
        for &(q, dx) in &[(1.0, 0.3), (2.0, -1.0), (0.4, 5.0)] {
            let received = pool.numeraire_out(q, dx).unwrap();
            let cost = cpmm_exact_cost(&pool, q, dx).unwrap();
            assert!((q * dx - received - cost).abs() < 1e-12 * (q * dx).abs().max(1.0));
        }
    }

    #[test]
    fn both_cpmm_approximations_agree() {
        // 1/(2|x̃'|)·Δx² with |x̃'| = x̃/(2Q) equals Q·Δx²/x̃
        let pool = CpmmCurve::new(3.0).unwrap();
        for &(q, dx) in &[(1.0, 0.1), (2.5, -0.4), (0.3, 2.0)] {
            let a = quadratic_cost(pool.slope(q).unwrap().abs(), dx).unwrap();
            let b = cpmm_approx_cost(&pool, q, dx).unwrap();
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn piecewise_examples() {
        let p = PiecewiseMarginalCost::new(0.01, 1.0, 2.0).unwrap();
        assert_eq!(p.marginal(0.5).unwrap(), 0.01);
        assert_eq!(p.marginal(1.0).unwrap(), 0.01);
        assert!((p.marginal(3.0).unwrap() - 1.01).abs() < 1e-15);
        assert_eq!(p.total(0.0).unwrap(), 0.0);
        assert!((p.total(1.0).unwrap() - 0.01).abs() < 1e-15);
        assert!((p.total(3.0).unwrap() - 1.03).abs() < 1e-14);
        assert!(matches!(p.marginal(-0.1), Err(Error::Domain(_))));
        assert!(matches!(p.total(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn piecewise_continuous_at_knee() {
        let p = PiecewiseMarginalCost::new(0.03, 2.5, 0.7).unwrap();
        let above = p.marginal(2.5 + 1e-13).unwrap();
        assert!((above - p.marginal(2.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn piecewise_validation() {
        assert!(PiecewiseMarginalCost::new(0.0, 1.0, 1.0).is_err());
        assert!(PiecewiseMarginalCost::new(0.1, 0.0, 1.0).is_err());
        assert!(matches!(
            PiecewiseMarginalCost::new(0.1, 1.0, 0.0),
            Err(Error::DegenerateLiquidity(_))
        ));
    }

    #[test]
    fn cost_model_dispatch() {
        let venue = LiquidVenue::FixedSlope(5.0);
        assert_eq!(CostModel::Frictionless.cost(&venue, 1.0, 1.0).unwrap(), 0.0);
        assert!((CostModel::Quadratic.cost(&venue, 1.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(CostModel::Quadratic.cost(&LiquidVenue::Infinite, 1.0, 1.0).unwrap(), 0.0);
        assert!(CostModel::CpmmExact.cost(&venue, 1.0, 1.0).is_err());
        let pool = LiquidVenue::Curve(Curve::cpmm(100.0).unwrap());
        assert!((CostModel::CpmmExact.cost(&pool, 1.0, 1.0).unwrap() - 1.0 / 101.0).abs() < 1e-15);
        let pw = CostModel::Piecewise(PiecewiseMarginalCost::new(0.01, 1.0, 2.0).unwrap());
        assert!((pw.cost(&venue, 1.0, -0.5).unwrap() - 0.005).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn cpmm_relative_gap_is_exact(k in 1e-2f64..1e3, q in 1e-2f64..1e2, ratio in 1e-5f64..0.5) {
            let pool = CpmmCurve::new(k).unwrap();
            let x = pool.reserves_risky(q).unwrap();
            let dx = ratio * x;
            let exact = cpmm_exact_cost(&pool, q, dx).unwrap();
            let approx = quadratic_cost(pool.slope(q).unwrap().abs(), dx).unwrap();
            prop_assert!(((approx - exact) / approx - dx / (x + dx)).abs() < 1e-12);
        }

        #[test]
        fn quadratic_scaling(s in 1e-3f64..1e3, dx in -1e3f64..1e3, lambda in 0.0f64..=1.0) {
            let full = quadratic_cost(s, dx).unwrap();
            let part = quadratic_cost(s, lambda * dx).unwrap();
            prop_assert!(full >= 0.0);
            prop_assert!(part <= lambda * lambda * full * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn piecewise_total_convex_increasing(
            c in 1e-3f64..1.0, alpha in 1e-2f64..10.0, s in 1e-2f64..10.0,
            a in 0.0f64..20.0, b in 0.0f64..20.0, w in 0.0f64..=1.0,
        ) {
            let p = PiecewiseMarginalCost::new(c, alpha, s).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(p.total(lo).unwrap() <= p.total(hi).unwrap());
            let mid = w * a + (1.0 - w) * b;
            let chord = w * p.total(a).unwrap() + (1.0 - w) * p.total(b).unwrap();
            prop_assert!(p.total(mid).unwrap() <= chord + 1e-12 * chord.max(1.0));
        }
    }
}
