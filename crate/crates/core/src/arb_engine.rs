//! Discretized arbitrage between the passive pool and the liquid venue.
//!
//! At every grid step the arbitrageur moves the pool from `x*(q_prev)` to
//! `x*(q_new)`, unloads the risky leg on the liquid venue and pays that
//! venue's trading cost. Summing over steps gives `ARB_T^(N)`. Alongside it
//! the engine tracks the costly rebalancing strategy
//! `R_T = V_0 + Σ x*(Q_{i−1})·ΔQ_i − Σ cost_i`, the quadratic and absolute
//! variation of `x*`, and the closed-form `∫ℓ dt` on the same path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{ell, LvrParams};
use crate::cost_models::{CostModel, LiquidVenue};
use crate::curves::{Curve, LiquidityCurve};
use crate::error::{Error, Result};
use crate::price_dynamics::{path_seed, sample_path, GbmSpec, PricePath};
use crate::stats::{loglog_fit, LinearFit, MeanEstimate, NeumaierSum};

/// Price at which the arbitrageur values the risky leg of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionPriceConvention {
    /// `Q_{t_{i−1}}`, as the discrete sum is literally indexed.
    PreviousPrice,
    /// `Q_{t_i}`: the arbitrageur trades after observing the new signal.
    #[default]
    NewPrice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub gbm: GbmSpec,
    pub illiquid: Curve,
    pub liquid: LiquidVenue,
    pub cost: CostModel,
    pub convention: ExecutionPriceConvention,
    pub paths: usize,
    pub master_seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.gbm.validate()?;
        if self.paths == 0 {
            return Err(Error::invalid("paths", "must be at least 1"));
        }
        if let LiquidVenue::FixedSlope(s) = self.liquid {
            if !(s > 0.0) {
                return Err(Error::DegenerateLiquidity(s));
            }
        }
        if self.cost == CostModel::CpmmExact && !matches!(self.liquid, LiquidVenue::Curve(Curve::Cpmm(_))) {
            return Err(Error::invalid("cost", "exact CPMM cost requires a CPMM liquid venue"));
        }
        self.illiquid.check_domain(self.gbm.q0)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub t: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t_prev: f64,
    pub t_new: f64,
    pub q_prev: f64,
    pub q_new: f64,
    /// `x*(q_prev) − x*(q_new)`: risky units taken from the pool.
    pub dx: f64,
    /// `y*(q_new) − y*(q_prev)`: numéraire paid into the pool.
    pub dy: f64,
    pub gross: f64,
    pub cost: f64,
    pub net: f64,
}

impl StepRecord {
    /// Record of a step with no price move.
    pub fn idle(t_prev: f64, t_new: f64, q: f64) -> Self {
        Self {
            t_prev,
            t_new,
            q_prev: q,
            q_new: q,
            dx: 0.0,
            dy: 0.0,
            gross: 0.0,
            cost: 0.0,
            net: 0.0,
        }
    }
}

/// One arbitrage step from `prev` to `new`.
pub fn run_step(
    illiquid: &dyn LiquidityCurve,
    liquid: &LiquidVenue,
    cost: &CostModel,
    convention: ExecutionPriceConvention,
    prev: GridPoint,
    new: GridPoint,
) -> Result<StepRecord> {
    if prev.q == new.q {
        illiquid.check_domain(prev.q)?;
        return Ok(StepRecord::idle(prev.t, new.t, prev.q));
    }
    let dx = illiquid.reserves_risky(prev.q)? - illiquid.reserves_risky(new.q)?;
    let dy = illiquid.reserves_numeraire(new.q)? - illiquid.reserves_numeraire(prev.q)?;
    let price = match convention {
        ExecutionPriceConvention::PreviousPrice => prev.q,
        ExecutionPriceConvention::NewPrice => new.q,
    };
    let gross = price * dx - dy;
    let cost = cost.cost(liquid, prev.q, dx)?;
    Ok(StepRecord {
        t_prev: prev.t,
        t_new: new.t,
        q_prev: prev.q,
        q_new: new.q,
        dx,
        dy,
        gross,
        cost,
        net: gross - cost,
    })
}

/// Per-path outputs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PathResult {
    /// `ARB_T^(N) = Σ (gross_i − cost_i)`
    pub arb_gain: f64,
    pub cost_total: f64,
    /// `Σ (Δx*)² / (2|x̃*'(q_prev)|)`
    pub quad_variation_cost: f64,
    /// `Σ σ²Q²(x*')²/(2|x̃*'|)·Δt` at left endpoints
    pub ito_quad_cost: f64,
    /// `Σ |Δx*|`
    pub abs_variation: f64,
    /// `Σ (q_new − q_prev)·dx`: NewPrice minus PreviousPrice gross gains
    pub convention_gap: f64,
    pub v0: f64,
    pub v_t: f64,
    /// `Σ ℓ(σ, Q_{t_{i−1}})·Δt`
    pub lvr_closed: f64,
    /// `R_T`
    pub rebal_value: f64,
    /// `Σ V(Q_{t_{i−1}})·Δt`, the normaliser for `ℓ/V`
    pub value_time: f64,
}

impl PathResult {
    /// `R_T − V_T`
    pub fn rebal_minus_terminal(&self) -> f64 {
        self.rebal_value - self.v_t
    }
}

struct PointEval {
    q: f64,
    x: f64,
    y: f64,
    slope: f64,
    liquid_slope: f64,
}

fn eval_point(illiquid: &dyn LiquidityCurve, liquid: &LiquidVenue, q: f64) -> Result<PointEval> {
    Ok(PointEval {
        q,
        x: illiquid.reserves_risky(q)?,
        y: illiquid.reserves_numeraire(q)?,
        slope: illiquid.slope(q)?,
        liquid_slope: liquid.slope_magnitude(q)?,
    })
}

pub fn run_path(config: &SimConfig, path: &PricePath) -> Result<PathResult> {
    let illiquid: &dyn LiquidityCurve = &config.illiquid;
    let liquid = &config.liquid;
    let sigma = config.gbm.sigma;
    let dt = path.dt();
    let at = |i: usize| {
        eval_point(illiquid, liquid, path.prices[i])
            .map_err(|e| Error::Domain(format!("step {i} (t = {}): {e}", path.times[i])))
    };

    let mut prev = at(0)?;
    let v0 = prev.q * prev.x + prev.y;
    let mut arb = NeumaierSum::new();
    let mut cost_total = NeumaierSum::new();
    let mut quad = NeumaierSum::new();
    let mut ito = NeumaierSum::new();
    let mut abs = NeumaierSum::new();
    let mut gap = NeumaierSum::new();
    let mut rebal = NeumaierSum::new();
    let mut lvr = NeumaierSum::new();
    let mut value_time = NeumaierSum::new();

    for i in 1..path.prices.len() {
        let new = at(i)?;
        let dq = new.q - prev.q;
        let dx = prev.x - new.x;
        let dy = new.y - prev.y;
        let price = match config.convention {
            ExecutionPriceConvention::PreviousPrice => prev.q,
            ExecutionPriceConvention::NewPrice => new.q,
        };
        let cost = if dx == 0.0 {
            0.0
        } else {
            config
                .cost
                .cost(liquid, prev.q, dx)
                .map_err(|e| Error::Domain(format!("step {i}: {e}")))?
        };
        arb.add(price * dx - dy - cost);
        cost_total.add(cost);
        quad.add(dx * dx / (2.0 * prev.liquid_slope));
        abs.add(dx.abs());
        gap.add(dq * dx);
        rebal.add(prev.x * dq);
        ito.add(sigma * sigma * prev.q * prev.q * prev.slope * prev.slope / (2.0 * prev.liquid_slope) * dt);
        lvr.add(
            ell(&LvrParams {
                sigma,
                q: prev.q,
                illiquid_slope: prev.slope.abs(),
                liquid_slope: prev.liquid_slope,
            }) * dt,
        );
        value_time.add((prev.q * prev.x + prev.y) * dt);
        prev = new;
    }

    let v_t = prev.q * prev.x + prev.y;
    let cost_total = cost_total.value();
    Ok(PathResult {
        arb_gain: arb.value(),
        cost_total,
        quad_variation_cost: quad.value(),
        ito_quad_cost: ito.value(),
        abs_variation: abs.value(),
        convention_gap: gap.value(),
        v0,
        v_t,
        lvr_closed: lvr.value(),
        rebal_value: v0 + rebal.value() - cost_total,
        value_time: value_time.value(),
    })
}

/// Every step of a path, for inspection.
pub fn step_records(config: &SimConfig, path: &PricePath) -> Result<Vec<StepRecord>> {
    (1..path.prices.len())
        .map(|i| {
            run_step(
                &config.illiquid,
                &config.liquid,
                &config.cost,
                config.convention,
                GridPoint { t: path.times[i - 1], q: path.prices[i - 1] },
                GridPoint { t: path.times[i], q: path.prices[i] },
            )
        })
        .collect()
}

/// Samples and runs every path; the result order is the path index order.
pub fn run_paths(config: &SimConfig) -> Result<Vec<PathResult>> {
    config.validate()?;
    let outcomes: Vec<Result<PathResult>> = (0..config.paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_path(&config.gbm, path_seed(config.master_seed, i as u64))?;
            run_path(config, &path).map_err(|e| Error::Path { index: i, source: Box::new(e) })
        })
        .collect();
    let total = outcomes.len();
    let mut results = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => results.push(r),
            Err(e) => failures.push(e),
        }
    }
    if let Some(first) = failures.first() {
        return Err(Error::Experiment {
            failed: failures.len(),
            total,
            first: Box::new(first.clone()),
        });
    }
    Ok(results)
}

/// Monte-Carlo means of the per-path outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub steps: usize,
    pub paths: usize,
    pub arb_gain: MeanEstimate,
    pub lvr_closed: MeanEstimate,
    /// per-path `ARB_T^(N) − Σℓ·Δt`
    pub arb_minus_closed: MeanEstimate,
    pub rebal_minus_terminal: MeanEstimate,
    pub cost_total: MeanEstimate,
    pub quad_variation_cost: MeanEstimate,
    pub ito_quad_cost: MeanEstimate,
    pub abs_variation: MeanEstimate,
    pub convention_gap: MeanEstimate,
    /// per-path `ARB_T^(N) / Σ V·Δt`
    pub arb_per_value: MeanEstimate,
}

impl ExperimentSummary {
    pub fn from_results(steps: usize, results: &[PathResult]) -> Self {
        let est = |f: &dyn Fn(&PathResult) -> f64| {
            MeanEstimate::from_samples(&results.iter().map(f).collect::<Vec<_>>())
        };
        Self {
            steps,
            paths: results.len(),
            arb_gain: est(&|r| r.arb_gain),
            lvr_closed: est(&|r| r.lvr_closed),
            arb_minus_closed: est(&|r| r.arb_gain - r.lvr_closed),
            rebal_minus_terminal: est(&|r| r.rebal_minus_terminal()),
            cost_total: est(&|r| r.cost_total),
            quad_variation_cost: est(&|r| r.quad_variation_cost),
            ito_quad_cost: est(&|r| r.ito_quad_cost),
            abs_variation: est(&|r| r.abs_variation),
            convention_gap: est(&|r| r.convention_gap),
            arb_per_value: est(&|r| r.arb_gain / r.value_time),
        }
    }

    /// `(metric name, estimate)` in a fixed order.
    pub fn metrics(&self) -> [(&'static str, MeanEstimate); 10] {
        [
            ("arb_gain", self.arb_gain),
            ("lvr_closed", self.lvr_closed),
            ("arb_minus_closed", self.arb_minus_closed),
            ("rebal_minus_terminal", self.rebal_minus_terminal),
            ("cost_total", self.cost_total),
            ("quad_variation_cost", self.quad_variation_cost),
            ("ito_quad_cost", self.ito_quad_cost),
            ("abs_variation", self.abs_variation),
            ("convention_gap", self.convention_gap),
            ("arb_per_value", self.arb_per_value),
        ]
    }
}

pub fn run_experiment(config: &SimConfig) -> Result<ExperimentSummary> {
    let results = run_paths(config)?;
    Ok(ExperimentSummary::from_results(config.gbm.steps, &results))
}

/// Experiments repeated over a list of step counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ExperimentSummary>,
    /// Log-log slope of `|mean convention gap|` against `N`.
    pub convention_gap_fit: Option<LinearFit>,
    /// Log-log slope of mean absolute variation against `N`.
    pub abs_variation_fit: Option<LinearFit>,
    /// Log-log slope of mean total cost against `N`.
    pub cost_total_fit: Option<LinearFit>,
    /// Log-log slope of `|mean(ARB − Σℓ·Δt)|` against `N`.
    pub arb_gap_fit: Option<LinearFit>,
}

pub fn convergence_study(config: &SimConfig, steps: &[usize]) -> Result<ConvergenceTable> {
    if steps.len() < 2 {
        return Err(Error::invalid("steps", "need at least two step counts"));
    }
    let rows = steps
        .iter()
        .map(|&n| {
            let cfg = SimConfig {
                gbm: config.gbm.with_steps(n),
                ..config.clone()
            };
            run_experiment(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = steps.iter().map(|&n| n as f64).collect();
    let fit = |f: &dyn Fn(&ExperimentSummary) -> f64| {
        loglog_fit(&ns, &rows.iter().map(f).collect::<Vec<_>>())
    };
    Ok(ConvergenceTable {
        convention_gap_fit: fit(&|r| r.convention_gap.mean.abs()),
        abs_variation_fit: fit(&|r| r.abs_variation.mean),
        cost_total_fit: fit(&|r| r.cost_total.mean),
        arb_gap_fit: fit(&|r| r.arb_minus_closed.mean.abs()),
        rows,
    })
}
