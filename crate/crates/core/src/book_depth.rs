//! L2 order-book snapshots and marginal-liquidity estimation.
//!
//! Signed cumulative depth `D(p)` is positive on the ask side (size available
//! up to `p`) and negative on the bid side. Near mid it is roughly linear,
//! `D(p) ≈ |x̃*'(Q)|·(p − mid)`, and the slope is fitted by least squares
//! through the origin.

use std::io::Read;

use serde::Serialize;

use crate::cost_models::PiecewiseMarginalCost;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW_BPS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bid,
    Ask,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub price: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthSnapshot {
    /// Descending by price.
    pub bids: Vec<Level>,
    /// Ascending by price.
    pub asks: Vec<Level>,
    pub timestamp: Option<String>,
}

impl DepthSnapshot {
    /// Sorts both sides and checks the snapshot invariants.
    pub fn new(mut bids: Vec<Level>, mut asks: Vec<Level>) -> Result<Self> {
        for l in bids.iter().chain(&asks) {
            if !(l.price.is_finite() && l.price > 0.0) {
                return Err(Error::Validation(format!("price {} must be positive", l.price)));
            }
            if !(l.size.is_finite() && l.size > 0.0) {
                return Err(Error::Validation(format!("size {} must be positive", l.size)));
            }
        }
        if bids.is_empty() {
            return Err(Error::Validation("bid side is empty".into()));
        }
        if asks.is_empty() {
            return Err(Error::Validation("ask side is empty".into()));
        }
        bids.sort_by(|a, b| b.price.total_cmp(&a.price));
        asks.sort_by(|a, b| a.price.total_cmp(&b.price));
        if bids[0].price >= asks[0].price {
            return Err(Error::Validation(format!(
                "crossed book: best bid {} >= best ask {}",
                bids[0].price, asks[0].price
            )));
        }
        Ok(Self {
            bids,
            asks,
            timestamp: None,
        })
    }

    pub fn best_bid(&self) -> Level {
        self.bids[0]
    }

    pub fn best_ask(&self) -> Level {
        self.asks[0]
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.best_bid().price + self.best_ask().price)
    }

    pub fn half_spread(&self) -> f64 {
        0.5 * (self.best_ask().price - self.best_bid().price)
    }

    pub fn side(&self, side: Side) -> &[Level] {
        match side {
            Side::Bid => &self.bids,
            Side::Ask => &self.asks,
        }
    }
}

/// Parses a snapshot CSV with header `side,price,size`.
pub fn parse_snapshot<R: Read>(input: R) -> Result<DepthSnapshot> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, reason: e.to_string() })?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["side", "price", "size"] {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected header `side,price,size`, got `{}`", cols.join(",")),
        });
    }
    let mut bids = Vec::new();
    let mut asks = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |i: usize, name: &str| -> Result<f64> {
            record[i].parse::<f64>().map_err(|e| Error::Parse {
                line,
                reason: format!("{name} `{}`: {e}", &record[i]),
            })
        };
        let level = Level {
            price: num(1, "price")?,
            size: num(2, "size")?,
        };
        match &record[0] {
            "bid" => bids.push(level),
            "ask" => asks.push(level),
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("side must be `bid` or `ask`, got `{other}`"),
                })
            }
        }
    }
    DepthSnapshot::new(bids, asks)
}

pub fn parse_snapshot_path(path: impl AsRef<std::path::Path>) -> Result<DepthSnapshot> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_snapshot(file)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeEstimate {
    /// Risky units per unit of price, comparable to `|x̃*'(Q)|`.
    pub slope_magnitude: f64,
    pub mid: f64,
    pub window_bps: f64,
    pub r2: f64,
    pub n_levels: usize,
}

pub const SLOPE_REPORT_HEADER: &str = "mid,slope,r2,n_levels,window_bps";

impl SlopeEstimate {
    /// `mid,slope,r2,n_levels,window_bps`
    pub fn report_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.mid, self.slope_magnitude, self.r2, self.n_levels, self.window_bps
        )
    }
}

/// `(p − mid, D(p))` for the levels of one side within `max_dist` of mid.
fn side_points(book: &DepthSnapshot, side: Side, max_dist: f64) -> Vec<(f64, f64)> {
    let mid = book.mid();
    let sign = match side {
        Side::Bid => -1.0,
        Side::Ask => 1.0,
    };
    let mut cum = 0.0;
    book.side(side)
        .iter()
        .map(|l| {
            cum += l.size;
            (l.price - mid, sign * cum)
        })
        .take_while(|(d, _)| d.abs() <= max_dist)
        .collect()
}

struct OriginFit {
    slope: f64,
    r2: f64,
}

/// Least squares `y = b·x` with uncentred R².
fn fit_through_origin(points: &[(f64, f64)]) -> Result<OriginFit> {
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("all levels sit at the reference price".into()));
    }
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let syy: f64 = points.iter().map(|(_, y)| y * y).sum();
    let slope = sxy / sxx;
    let sse: f64 = points.iter().map(|(x, y)| (y - slope * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(OriginFit { slope, r2 })
}

fn window_distance(book: &DepthSnapshot, window_bps: f64) -> Result<f64> {
    if !(window_bps.is_finite() && window_bps > 0.0) {
        return Err(Error::invalid("window_bps", format!("must be positive, got {window_bps}")));
    }
    // tolerance so a level sitting exactly on the window edge is kept
    Ok(book.mid() * window_bps * 1e-4 * (1.0 + 1e-12))
}

fn estimate(book: &DepthSnapshot, window_bps: f64, sides: &[Side]) -> Result<SlopeEstimate> {
    let max_dist = window_distance(book, window_bps)?;
    let mut points = Vec::new();
    for &side in sides {
        let pts = side_points(book, side, max_dist);
        if pts.len() < 2 {
            return Err(Error::InsufficientLevels(format!(
                "{} {side:?} level(s) within {window_bps} bps of mid, need 2",
                pts.len()
            )));
        }
        points.extend(pts);
    }
    let fit = fit_through_origin(&points)?;
    Ok(SlopeEstimate {
        slope_magnitude: fit.slope.max(0.0),
        mid: book.mid(),
        window_bps,
        r2: fit.r2,
        n_levels: points.len(),
    })
}

/// Pooled bid/ask regression of signed cumulative depth on distance from mid.
pub fn estimate_slope(book: &DepthSnapshot, window_bps: f64) -> Result<SlopeEstimate> {
    estimate(book, window_bps, &[Side::Bid, Side::Ask])
}

/// Single-side diagnostic version of [`estimate_slope`].
pub fn estimate_slope_side(book: &DepthSnapshot, side: Side, window_bps: f64) -> Result<SlopeEstimate> {
    estimate(book, window_bps, &[side])
}

/// Depth beyond the best level against distance from the best price.
fn beyond_best_points(book: &DepthSnapshot, side: Side) -> Result<Vec<(f64, f64)>> {
    let levels = book.side(side);
    if levels.len() < 2 {
        return Err(Error::InsufficientLevels(format!(
            "{side:?} side has {} level(s), need 2 to fit beyond the best level",
            levels.len()
        )));
    }
    let best = levels[0].price;
    let mut cum = 0.0;
    Ok(levels[1..]
        .iter()
        .map(|l| {
            cum += l.size;
            ((l.price - best).abs(), cum)
        })
        .collect())
}

fn fit_piecewise(book: &DepthSnapshot, sides: &[Side]) -> Result<PiecewiseMarginalCost> {
    let mut points = Vec::new();
    let mut alpha = 0.0;
    for &side in sides {
        points.extend(beyond_best_points(book, side)?);
        alpha += book.side(side)[0].size;
    }
    alpha /= sides.len() as f64;
    let fit = fit_through_origin(&points)?;
    PiecewiseMarginalCost::new(book.half_spread(), alpha, fit.slope)
}

/// `c` = half-spread, `α` = mean best-level size, slope fitted beyond the best level.
pub fn fit_piecewise_cost(book: &DepthSnapshot) -> Result<PiecewiseMarginalCost> {
    fit_piecewise(book, &[Side::Bid, Side::Ask])
}

pub fn fit_piecewise_cost_side(book: &DepthSnapshot, side: Side) -> Result<PiecewiseMarginalCost> {
    fit_piecewise(book, &[side])
}
