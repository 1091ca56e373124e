//! Liquidity curves: a venue's equilibrium reserves as a function of the
//! exchange rate `Q`.
//!
//! A curve exposes `x*(Q)` (risky reserves), `y*(Q)` (numéraire reserves),
//! the signed slope `x*'(Q) <= 0` and the pool value `V(Q) = Q·x*(Q) + y*(Q)`.
//! Along any curve `dy* = -Q dx*`, so `V'(Q) = x*(Q)`.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Behavioural contract shared by every venue's demand curve.
pub trait LiquidityCurve: Send + Sync {
    /// Closed price interval on which the curve is defined.
    fn domain(&self) -> (f64, f64);

    /// `x*(Q)`
    fn reserves_risky(&self, q: f64) -> Result<f64>;

    /// `y*(Q)`
    fn reserves_numeraire(&self, q: f64) -> Result<f64>;

    /// Signed `x*'(Q)`; non-positive for a downward-sloping demand curve.
    fn slope(&self, q: f64) -> Result<f64>;

    fn value(&self, q: f64) -> Result<f64> {
        Ok(q * self.reserves_risky(q)? + self.reserves_numeraire(q)?)
    }

    fn check_domain(&self, q: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if q.is_finite() && q > 0.0 && q >= lo && q <= hi {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "price {q} outside curve domain [{lo}, {hi}]"
            )))
        }
    }
}

/// Constant-product curve `x·y = K²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpmmCurve {
    root: f64,
}

impl CpmmCurve {
    pub fn new(invariant_root: f64) -> Result<Self> {
        if !(invariant_root.is_finite() && invariant_root > 0.0) {
            return Err(Error::invalid(
                "invariant_root",
                format!("must be positive and finite, got {invariant_root}"),
            ));
        }
        Ok(Self {
            root: invariant_root,
        })
    }

    /// `K = √(x·y)`
    pub fn invariant_root(&self) -> f64 {
        self.root
    }

    /// Equilibrium reserves `(K/√Q, K√Q)`.
    pub fn reserves(&self, q: f64) -> Result<(f64, f64)> {
        self.check_domain(q)?;
        let sq = q.sqrt();
        Ok((self.root / sq, self.root * sq))
    }

    /// Numéraire received for selling `dx` risky into the pool when its
    /// marginal price is `q`, keeping `(x + dx)(y - dy) = K²`.
    pub fn numeraire_out(&self, q: f64, dx: f64) -> Result<f64> {
        let (x, y) = self.reserves(q)?;
        if x + dx <= 0.0 {
            return Err(Error::ReserveExhaustion { dx, reserves: x });
        }
        Ok(y * dx / (x + dx))
    }
}

impl LiquidityCurve for CpmmCurve {
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn check_domain(&self, q: f64) -> Result<()> {
        if q.is_finite() && q > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("CPMM price must be positive, got {q}")))
        }
    }

    fn reserves_risky(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.root / q.sqrt())
    }

    fn reserves_numeraire(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.root * q.sqrt())
    }

    fn slope(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(-self.root / (2.0 * q * q.sqrt()))
    }
}

/// Demand curve given by tabulated `(Q, x*)` pairs, interpolated with a
/// monotone (Fritsch–Carlson) cubic Hermite spline.
///
/// `y*` is recovered from `dy* = -Q dx*`, anchored at the lower end of the
/// table. Each piece integrates exactly with three-point Gauss–Legendre.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    prices: Vec<f64>,
    reserves: Vec<f64>,
    tangents: Vec<f64>,
    numeraire: Vec<f64>,
}

const MIN_ROWS: usize = 4;

impl TabulatedCurve {
    /// Builds a curve from `(Q, x*)` points with `y*(Q_min) = y_at_min`.
    pub fn from_points(points: &[(f64, f64)], y_at_min: f64) -> Result<Self> {
        if points.len() < MIN_ROWS {
            return Err(Error::invalid(
                "curve",
                format!("need at least {MIN_ROWS} rows, got {}", points.len()),
            ));
        }
        if !(y_at_min.is_finite() && y_at_min >= 0.0) {
            return Err(Error::invalid("y_at_min", "must be finite and non-negative"));
        }
        for (i, &(q, x)) in points.iter().enumerate() {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::invalid("Q", format!("row {i}: price must be positive")));
            }
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::invalid(
                    "x_star",
                    format!("row {i}: reserves must be non-negative"),
                ));
            }
            if i > 0 {
                let (pq, px) = points[i - 1];
                if q <= pq {
                    return Err(Error::invalid(
                        "Q",
                        format!("row {i}: prices must be strictly increasing"),
                    ));
                }
                if x > px {
                    return Err(Error::invalid(
                        "x_star",
                        format!("row {i}: reserves must be non-increasing in Q"),
                    ));
                }
            }
        }

        let prices: Vec<f64> = points.iter().map(|p| p.0).collect();
        let reserves: Vec<f64> = points.iter().map(|p| p.1).collect();
        let tangents = pchip_tangents(&prices, &reserves);

        let mut curve = Self {
            prices,
            reserves,
            tangents,
            numeraire: Vec::new(),
        };
        let mut numeraire = Vec::with_capacity(curve.prices.len());
        numeraire.push(y_at_min);
        for i in 0..curve.prices.len() - 1 {
            let next = numeraire[i] + curve.numeraire_gain(i, curve.prices[i + 1]);
            numeraire.push(next);
        }
        curve.numeraire = numeraire;
        Ok(curve)
    }

    /// Reads a table with header `Q,x_star`.
    pub fn from_csv_reader<R: Read>(reader: R, y_at_min: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse { line: 1, reason: e.to_string() })?
            .clone();
        if headers.len() != 2 || &headers[0] != "Q" || &headers[1] != "x_star" {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected header `Q,x_star`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut points = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::Parse { line, reason: "missing column".into() })?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse { line, reason: e.to_string() })
            };
            points.push((field(0)?, field(1)?));
        }
        Self::from_points(&points, y_at_min)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, y_at_min: f64) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file, y_at_min)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.prices.iter().copied().zip(self.reserves.iter().copied())
    }

    fn piece(&self, q: f64) -> usize {
        let last = self.prices.len() - 2;
        match self.prices.partition_point(|&p| p <= q) {
            0 => 0,
            k => (k - 1).min(last),
        }
    }

    fn eval_piece(&self, i: usize, q: f64) -> (f64, f64) {
        let h = self.prices[i + 1] - self.prices[i];
        let t = (q - self.prices[i]) / h;
        let (x0, x1) = (self.reserves[i], self.reserves[i + 1]);
        let (m0, m1) = (self.tangents[i] * h, self.tangents[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * x0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * x1
            + (t3 - t2) * m1;
        let deriv = ((6.0 * t2 - 6.0 * t) * x0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * x1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (value, deriv)
    }

    /// `-∫_{q_i}^{q} s·x*'(s) ds` on piece `i`; the integrand is a cubic.
    fn numeraire_gain(&self, i: usize, q: f64) -> f64 {
        const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let a = self.prices[i];
        let half = 0.5 * (q - a);
        let mid = 0.5 * (q + a);
        let sum: f64 = NODES
            .iter()
            .zip(WEIGHTS)
            .map(|(&n, w)| {
                let s = mid + half * n;
                w * s * self.eval_piece(i, s).1
            })
            .sum();
        -half * sum
    }
}

/// Fritsch–Carlson tangents with the shape-preserving three-point end rule.
fn pchip_tangents(q: &[f64], x: &[f64]) -> Vec<f64> {
    let n = q.len();
    let h: Vec<f64> = q.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (x[k + 1] - x[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m[0] = pchip_end(h[0], h[1], d[0], d[1]);
    m[n - 1] = pchip_end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

fn pchip_end(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

impl LiquidityCurve for TabulatedCurve {
    fn domain(&self) -> (f64, f64) {
        (self.prices[0], self.prices[self.prices.len() - 1])
    }

    fn reserves_risky(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.eval_piece(self.piece(q), q).0.max(0.0))
    }

    fn reserves_numeraire(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        let i = self.piece(q);
        Ok(self.numeraire[i] + self.numeraire_gain(i, q))
    }

    fn slope(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.eval_piece(self.piece(q), q).1.min(0.0))
    }
}

/// Closed set of curve kinds, so configurations can own a curve by value.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Cpmm(CpmmCurve),
    Tabulated(TabulatedCurve),
}

impl Curve {
    pub fn cpmm(invariant_root: f64) -> Result<Self> {
        CpmmCurve::new(invariant_root).map(Curve::Cpmm)
    }

    pub fn as_cpmm(&self) -> Option<&CpmmCurve> {
        match self {
            Curve::Cpmm(c) => Some(c),
            Curve::Tabulated(_) => None,
        }
    }

    fn inner(&self) -> &dyn LiquidityCurve {
        match self {
            Curve::Cpmm(c) => c,
            Curve::Tabulated(t) => t,
        }
    }
}

impl LiquidityCurve for Curve {
    fn domain(&self) -> (f64, f64) {
        self.inner().domain()
    }
    fn check_domain(&self, q: f64) -> Result<()> {
        self.inner().check_domain(q)
    }
    fn reserves_risky(&self, q: f64) -> Result<f64> {
        self.inner().reserves_risky(q)
    }
    fn reserves_numeraire(&self, q: f64) -> Result<f64> {
        self.inner().reserves_numeraire(q)
    }
    fn slope(&self, q: f64) -> Result<f64> {
        self.inner().slope(q)
    }
    fn value(&self, q: f64) -> Result<f64> {
        self.inner().value(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// `x* = 10/Q` tabulated over [0.5, 2]; smooth and convex.
    fn hyperbola_table() -> TabulatedCurve {
        let pts: Vec<(f64, f64)> = (0..=30)
            .map(|i| {
                let q = 0.5 + 1.5 * i as f64 / 30.0;
                (q, 10.0 / q)
            })
            .collect();
        TabulatedCurve::from_points(&pts, 0.0).unwrap()
    }

    #[test]
    fn cpmm_reserves_examples() {
        assert_eq!(CpmmCurve::new(1.0).unwrap().reserves(1.0).unwrap(), (1.0, 1.0));
        let (x, y) = CpmmCurve::new(2.0).unwrap().reserves(4.0).unwrap();
        assert!((x - 1.0).abs() < 1e-15 && (y - 4.0).abs() < 1e-15);
        let (x, y) = CpmmCurve::new(1.0).unwrap().reserves(4.0).unwrap();
        assert!((x - 0.5).abs() < 1e-15 && (y - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cpmm_slope_examples() {
        let c = CpmmCurve::new(1.0).unwrap();
        assert!((c.slope(1.0).unwrap() + 0.5).abs() < 1e-15);
        assert!((c.slope(4.0).unwrap() + 0.0625).abs() < 1e-15);
    }

    #[test]
    fn cpmm_value_examples() {
        assert!((Curve::cpmm(1.0).unwrap().value(1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((Curve::cpmm(1.0).unwrap().value(4.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((Curve::cpmm(3.0).unwrap().value(1.0).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn cpmm_rejects_bad_inputs() {
        assert!(CpmmCurve::new(0.0).is_err());
        assert!(CpmmCurve::new(-1.0).is_err());
        let c = CpmmCurve::new(1.0).unwrap();
        assert!(matches!(c.reserves(0.0), Err(Error::Domain(_))));
        assert!(matches!(c.slope(-2.0), Err(Error::Domain(_))));
        assert!(matches!(c.value(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn cpmm_trade_conserves_product() {
        let c = CpmmCurve::new(3.0).unwrap();
        for &(q, dx) in &[(1.0, 0.5), (2.5, -0.3), (0.1, 4.0)] {
            let (x, y) = c.reserves(q).unwrap();
            let dy = c.numeraire_out(q, dx).unwrap();
            assert!(rel((x + dx) * (y - dy), 9.0) < 1e-12);
        }
        assert!(matches!(
            c.numeraire_out(1.0, -3.0),
            Err(Error::ReserveExhaustion { .. })
        ));
    }

    #[test]
    fn tabulated_reproduces_knots_and_rejects_outside() {
        let t = hyperbola_table();
        for (q, x) in t.knots().collect::<Vec<_>>() {
            assert!(rel(t.reserves_risky(q).unwrap(), x) < 1e-14);
        }
        assert!(matches!(t.reserves_risky(0.49), Err(Error::Domain(_))));
        assert!(matches!(t.slope(2.01), Err(Error::Domain(_))));
        assert_eq!(t.reserves_numeraire(0.5).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_tracks_smooth_curve() {
        let t = hyperbola_table();
        for i in 0..200 {
            let q = 0.5 + 1.5 * (i as f64 + 0.5) / 200.0;
            assert!(rel(t.reserves_risky(q).unwrap(), 10.0 / q) < 1e-3);
            // dy = -Q dx = 10/Q dQ  =>  y = 10 ln(Q/0.5)
            let y = t.reserves_numeraire(q).unwrap();
            assert!((y - 10.0 * (q / 0.5).ln()).abs() < 1e-2);
        }
    }

    #[test]
    fn tabulated_validation() {
        let ok = [(1.0, 4.0), (2.0, 3.0), (3.0, 2.0), (4.0, 1.0)];
        assert!(TabulatedCurve::from_points(&ok, 0.0).is_ok());
        assert!(TabulatedCurve::from_points(&ok[..3], 0.0).is_err());
        let unsorted = [(1.0, 4.0), (3.0, 3.0), (2.0, 2.0), (4.0, 1.0)];
        assert!(TabulatedCurve::from_points(&unsorted, 0.0).is_err());
        let rising = [(1.0, 1.0), (2.0, 3.0), (3.0, 2.0), (4.0, 1.0)];
        assert!(TabulatedCurve::from_points(&rising, 0.0).is_err());
        let negative = [(1.0, 4.0), (2.0, 3.0), (3.0, 2.0), (4.0, -1.0)];
        assert!(TabulatedCurve::from_points(&negative, 0.0).is_err());
    }

    #[test]
    fn tabulated_csv_parsing() {
        let csv = "Q,x_star\n1,4\n2,3\n3,2\n4,1\n";
        let t = TabulatedCurve::from_csv_reader(csv.as_bytes(), 0.0).unwrap();
        assert_eq!(t.domain(), (1.0, 4.0));
        let bad_header = "price,x\n1,4\n2,3\n3,2\n4,1\n";
        assert!(matches!(
            TabulatedCurve::from_csv_reader(bad_header.as_bytes(), 0.0),
            Err(Error::Parse { line: 1, .. })
        ));
        let bad_row = "Q,x_star\n1,4\n2,abc\n3,2\n4,1\n";
        assert!(matches!(
            TabulatedCurve::from_csv_reader(bad_row.as_bytes(), 0.0),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    fn envelope_and_slope_checks(curve: &dyn LiquidityCurve, q: f64) {
        let h = 1e-6 * q;
        let fd_value = (curve.value(q + h).unwrap() - curve.value(q - h).unwrap()) / (2.0 * h);
        assert!(
            rel(fd_value, curve.reserves_risky(q).unwrap()) <= 1e-6,
            "envelope at {q}"
        );
        let fd_slope = (curve.reserves_risky(q + h).unwrap()
            - curve.reserves_risky(q - h).unwrap())
            / (2.0 * h);
        assert!(rel(fd_slope, curve.slope(q).unwrap()) <= 1e-6, "slope at {q}");
    }

    proptest! {
        #[test]
        fn cpmm_invariants(k in 1e-3f64..1e3, q in 1e-3f64..1e3) {
            let c = CpmmCurve::new(k).unwrap();
            let (x, y) = c.reserves(q).unwrap();
            prop_assert!(rel(x * y, k * k) < 1e-12);
            prop_assert!(rel(c.value(q).unwrap(), 2.0 * k * q.sqrt()) < 1e-12);
            prop_assert!(c.slope(q).unwrap() <= 0.0);
            prop_assert!((c.slope(q).unwrap().abs() - x / (2.0 * q)).abs() <= 1e-12 * x / q);
            envelope_and_slope_checks(&c, q);
        }

        #[test]
        fn tabulated_invariants(q in 0.5f64..2.0) {
            let t = hyperbola_table();
            prop_assert!(t.reserves_risky(q).unwrap() >= 0.0);
            prop_assert!(t.reserves_numeraire(q).unwrap() >= 0.0);
            prop_assert!(t.slope(q).unwrap() <= 0.0);
            // keep the finite-difference stencil inside a single piece
            let knot_gap = t.knots().map(|k| (k.0 - q).abs()).fold(f64::INFINITY, f64::min);
            prop_assume!(knot_gap > 2e-6 * q);
            envelope_and_slope_checks(&t, q);
        }
    }
}
