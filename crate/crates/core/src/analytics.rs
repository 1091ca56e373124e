//! Closed-form LVR with a costly counterpart venue.
//!
//! The instantaneous rate is
//!
//! ```text
//! ℓ(σ, Q) = σ²Q²/2 · (1 − |x*'(Q)| / |x̃*'(Q)|) · |x*'(Q)|
//! ```
//!
//! where `x*` is the passive pool and `x̃*` the liquid venue. With CPMMs on
//! both sides and `r = |x̃*'| / |x*'|` this is `σ²Q²/2 · (1 − 1/r) · |x*'|`,
//! and per unit of pool value `ℓ/V = σ²/8 · (1 − 1/r)`.

use std::io::Write;

use serde::Serialize;

use crate::arb_engine::StepRecord;
use crate::cost_models::LiquidVenue;
use crate::curves::LiquidityCurve;
use crate::error::{Error, Result};
use crate::price_dynamics::PricePath;
use crate::stats::NeumaierSum;

/// Inputs to `ℓ`; slopes are magnitudes. `liquid_slope` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LvrParams {
    pub sigma: f64,
    pub q: f64,
    pub illiquid_slope: f64,
    pub liquid_slope: f64,
}

/// `r = |x̃*'| / |x*'|`; may be `+∞` for the perfectly liquid benchmark.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RelativeLiquidity(f64);

impl RelativeLiquidity {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 {
            Ok(Self(r))
        } else {
            Err(Error::invalid("r", format!("relative liquidity must be positive, got {r}")))
        }
    }

    pub const INFINITE: Self = Self(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    /// `r ≥ 1`: the liquid venue is at least as deep at the margin.
    /// Below 1 the formulas give a negative rate, which is reported as is.
    pub fn is_deeper_than_pool(self) -> bool {
        self.0 >= 1.0
    }

    /// `1 − 1/r`.
    pub fn cost_factor(self) -> f64 {
        1.0 - 1.0 / self.0
    }
}

/// Instantaneous LVR rate.
pub fn ell(p: &LvrParams) -> f64 {
    let ratio = p.illiquid_slope / p.liquid_slope;
    0.5 * p.sigma * p.sigma * p.q * p.q * (1.0 - ratio) * p.illiquid_slope
}

/// Instantaneous LVR for a CPMM of root `k` against a CPMM `r` times deeper.
pub fn ell_cpmm(sigma: f64, q: f64, k: f64, r: RelativeLiquidity) -> f64 {
    let slope = k / (2.0 * q * q.sqrt());
    0.5 * sigma * sigma * q * q * r.cost_factor() * slope
}

/// `ℓ/V = σ²/8 · (1 − 1/r)` for CPMMs.
pub fn normalized_lvr(sigma: f64, r: RelativeLiquidity) -> f64 {
    sigma * sigma / 8.0 * r.cost_factor()
}

/// `ℓ` at price `q` read off the two venues.
pub fn ell_at(
    illiquid: &dyn LiquidityCurve,
    liquid: &LiquidVenue,
    sigma: f64,
    q: f64,
) -> Result<f64> {
    Ok(ell(&LvrParams {
        sigma,
        q,
        illiquid_slope: illiquid.slope(q)?.abs(),
        liquid_slope: liquid.slope_magnitude(q)?,
    }))
}

/// Left-endpoint Riemann sum `Σ ℓ(σ, Q_{t_{i−1}})·Δt`.
pub fn integrate_ell(
    path: &PricePath,
    illiquid: &dyn LiquidityCurve,
    liquid: &LiquidVenue,
    sigma: f64,
) -> Result<f64> {
    let dt = path.dt();
    let mut acc = NeumaierSum::new();
    for &q in &path.prices[..path.prices.len() - 1] {
        acc.add(ell_at(illiquid, liquid, sigma, q)? * dt);
    }
    Ok(acc.value())
}

/// Itô limit of the quadratic cost: `Σ σ²Q²(x*')²/(2|x̃*'|)·Δt`, left endpoints.
pub fn ito_quadratic_cost(
    path: &PricePath,
    illiquid: &dyn LiquidityCurve,
    liquid: &LiquidVenue,
    sigma: f64,
) -> Result<f64> {
    let dt = path.dt();
    let mut acc = NeumaierSum::new();
    for &q in &path.prices[..path.prices.len() - 1] {
        let s = illiquid.slope(q)?;
        acc.add(sigma * sigma * q * q * s * s / (2.0 * liquid.slope_magnitude(q)?) * dt);
    }
    Ok(acc.value())
}

/// `E[LVR_T]` for CPMMs: `2K√q0 · (1 − 1/r) · (1 − e^{−σ²T/8})`.
///
/// Follows from `ℓ = σ²/8·(1 − 1/r)·V(Q_t)`, `V = 2K√Q` and the lognormal
/// moment `E[√Q_t] = √q0·e^{−σ²t/8}`, integrated over `[0, T]`.
pub fn expected_lvr_cpmm(sigma: f64, horizon: f64, q0: f64, k: f64, r: RelativeLiquidity) -> f64 {
    2.0 * k * q0.sqrt() * r.cost_factor() * -(-sigma * sigma * horizon / 8.0).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VariationStats {
    /// `Σ (Δx*)² / (2|x̃*'(q_prev)|)`
    pub quadratic_variation_cost: f64,
    /// `Σ |Δx*|`
    pub absolute_variation: f64,
}

pub fn variation_stats(records: &[StepRecord], liquid: &LiquidVenue) -> Result<VariationStats> {
    let mut quad = NeumaierSum::new();
    let mut abs = NeumaierSum::new();
    for rec in records {
        quad.add(rec.dx * rec.dx / (2.0 * liquid.slope_magnitude(rec.q_prev)?));
        abs.add(rec.dx.abs());
    }
    Ok(VariationStats {
        quadratic_variation_cost: quad.value(),
        absolute_variation: abs.value(),
    })
}

/// One row of the normalized-LVR comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LvrTableRow {
    pub sigma: f64,
    pub r: f64,
    pub ell_over_v_theory: f64,
    pub ell_over_v_mc: f64,
    pub stderr: f64,
}

pub const LVR_TABLE_HEADER: &str = "sigma,r,ell_over_V_theory,ell_over_V_mc,stderr";

pub fn write_lvr_table<W: Write>(rows: &[LvrTableRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{LVR_TABLE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.sigma, r.r, r.ell_over_v_theory, r.ell_over_v_mc, r.stderr
        )?;
    }
    Ok(())
}
