//! Plain-text experiment configuration (TOML) and its translation into a
//! [`SimConfig`].
//!
//! ```toml
//! [gbm]
//! q0 = 1.0
//! sigma = 0.2
//! horizon = 1.0
//! steps = 10000
//!
//! [illiquid]
//! kind = "cpmm"
//! k = 1.0
//!
//! [liquid]
//! kind = "cpmm"        # infinite | fixed_slope | cpmm | tabulated
//! k = 2.0
//!
//! [cost]
//! kind = "quadratic"   # frictionless | quadratic | cpmm_exact | piecewise
//!
//! [run]
//! paths = 10000
//! master_seed = 42
//! convention = "new_price"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arb_engine::{ExecutionPriceConvention, SimConfig};
use crate::cost_models::{CostModel, LiquidVenue, PiecewiseMarginalCost};
use crate::curves::{Curve, TabulatedCurve};
use crate::error::{Error, Result};
use crate::price_dynamics::GbmSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub gbm: GbmSpec,
    pub illiquid: CurveSpec,
    pub liquid: VenueSpec,
    pub cost: CostSpec,
    pub run: RunSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gbm: GbmSpec::default(),
            illiquid: CurveSpec::Cpmm { k: 1.0 },
            liquid: VenueSpec::Infinite,
            cost: CostSpec::Quadratic,
            run: RunSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Cpmm {
        k: f64,
    },
    Tabulated {
        csv: PathBuf,
        #[serde(default)]
        y_at_min: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VenueSpec {
    Infinite,
    FixedSlope {
        slope: f64,
    },
    Cpmm {
        k: f64,
    },
    Tabulated {
        csv: PathBuf,
        #[serde(default)]
        y_at_min: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    Frictionless,
    Quadratic,
    CpmmExact,
    Piecewise { c: f64, alpha: f64, slope: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub paths: usize,
    pub master_seed: u64,
    pub convention: ExecutionPriceConvention,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            paths: 1000,
            master_seed: 42,
            convention: ExecutionPriceConvention::NewPrice,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|sp| s[..sp.start].matches('\n').count() as u64 + 1)
                .unwrap_or(0),
            reason: e.message().to_string(),
        })
    }

    /// Loads a config file; relative curve tables resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let CurveSpec::Tabulated { csv, .. } = &mut self.illiquid {
            fix(csv);
        }
        if let VenueSpec::Tabulated { csv, .. } = &mut self.liquid {
            fix(csv);
        }
    }

    pub fn to_sim_config(&self) -> Result<SimConfig> {
        self.gbm.validate()?;
        let illiquid = match &self.illiquid {
            CurveSpec::Cpmm { k } => Curve::cpmm(*k).map_err(|_| positive("illiquid.k", *k))?,
            CurveSpec::Tabulated { csv, y_at_min } => {
                Curve::Tabulated(TabulatedCurve::from_csv_path(csv, *y_at_min)?)
            }
        };
        let liquid = match &self.liquid {
            VenueSpec::Infinite => LiquidVenue::Infinite,
            VenueSpec::FixedSlope { slope } => {
                if !(slope.is_finite() && *slope > 0.0) {
                    return Err(positive("liquid.slope", *slope));
                }
                LiquidVenue::FixedSlope(*slope)
            }
            VenueSpec::Cpmm { k } => {
                LiquidVenue::Curve(Curve::cpmm(*k).map_err(|_| positive("liquid.k", *k))?)
            }
            VenueSpec::Tabulated { csv, y_at_min } => {
                LiquidVenue::Curve(Curve::Tabulated(TabulatedCurve::from_csv_path(csv, *y_at_min)?))
            }
        };
        let cost = match &self.cost {
            CostSpec::Frictionless => CostModel::Frictionless,
            CostSpec::Quadratic => CostModel::Quadratic,
            CostSpec::CpmmExact => CostModel::CpmmExact,
            CostSpec::Piecewise { c, alpha, slope } => {
                CostModel::Piecewise(PiecewiseMarginalCost::new(*c, *alpha, *slope).map_err(|e| match e {
                    Error::DegenerateLiquidity(s) => positive("cost.slope", s),
                    Error::InvalidParameter { field: "c", reason } => Error::invalid("cost.c", reason),
                    Error::InvalidParameter { field: "alpha", reason } => Error::invalid("cost.alpha", reason),
                    other => other,
                })?)
            }
        };
        let sim = SimConfig {
            gbm: self.gbm,
            illiquid,
            liquid,
            cost,
            convention: self.run.convention,
            paths: self.run.paths,
            master_seed: self.run.master_seed,
        };
        sim.validate()?;
        Ok(sim)
    }
}

fn positive(field: &'static str, v: f64) -> Error {
    Error::invalid(field, format!("must be positive, got {v}"))
}

/// Flag-level overrides; every config field has one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub q0: Option<f64>,
    pub sigma: Option<f64>,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    pub paths: Option<usize>,
    pub master_seed: Option<u64>,
    pub convention: Option<ExecutionPriceConvention>,
    pub illiquid_kind: Option<String>,
    pub illiquid_k: Option<f64>,
    pub illiquid_csv: Option<PathBuf>,
    pub illiquid_y_at_min: Option<f64>,
    pub liquid_kind: Option<String>,
    pub liquid_k: Option<f64>,
    pub liquid_slope: Option<f64>,
    pub liquid_csv: Option<PathBuf>,
    pub liquid_y_at_min: Option<f64>,
    pub cost_kind: Option<String>,
    pub cost_c: Option<f64>,
    pub cost_alpha: Option<f64>,
    pub cost_slope: Option<f64>,
}

fn required<T: Copy>(v: Option<T>, current: Option<T>, field: &'static str) -> Result<T> {
    v.or(current)
        .ok_or_else(|| Error::invalid(field, "required for the selected kind"))
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(v) = self.q0 {
            cfg.gbm.q0 = v;
        }
        if let Some(v) = self.sigma {
            cfg.gbm.sigma = v;
        }
        if let Some(v) = self.horizon {
            cfg.gbm.horizon = v;
        }
        if let Some(v) = self.steps {
            cfg.gbm.steps = v;
        }
        if let Some(v) = self.paths {
            cfg.run.paths = v;
        }
        if let Some(v) = self.master_seed {
            cfg.run.master_seed = v;
        }
        if let Some(v) = self.convention {
            cfg.run.convention = v;
        }
        self.apply_illiquid(cfg)?;
        self.apply_liquid(cfg)?;
        self.apply_cost(cfg)
    }

    fn apply_illiquid(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        let (cur_k, cur_csv, cur_y) = match &cfg.illiquid {
            CurveSpec::Cpmm { k } => (Some(*k), None, None),
            CurveSpec::Tabulated { csv, y_at_min } => (None, Some(csv.clone()), Some(*y_at_min)),
        };
        let kind = match (&self.illiquid_kind, &cfg.illiquid) {
            (Some(k), _) => k.as_str(),
            (None, CurveSpec::Cpmm { .. }) => "cpmm",
            (None, CurveSpec::Tabulated { .. }) => "tabulated",
        };
        cfg.illiquid = match kind {
            "cpmm" => CurveSpec::Cpmm {
                k: required(self.illiquid_k, cur_k, "illiquid.k")?,
            },
            "tabulated" => CurveSpec::Tabulated {
                csv: self
                    .illiquid_csv
                    .clone()
                    .or(cur_csv)
                    .ok_or_else(|| Error::invalid("illiquid.csv", "required for kind `tabulated`"))?,
                y_at_min: self.illiquid_y_at_min.or(cur_y).unwrap_or(0.0),
            },
            other => {
                return Err(Error::invalid(
                    "illiquid.kind",
                    format!("unknown kind `{other}` (cpmm | tabulated)"),
                ))
            }
        };
        Ok(())
    }

    fn apply_liquid(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        let (cur_k, cur_slope, cur_csv, cur_y) = match &cfg.liquid {
            VenueSpec::Infinite => (None, None, None, None),
            VenueSpec::FixedSlope { slope } => (None, Some(*slope), None, None),
            VenueSpec::Cpmm { k } => (Some(*k), None, None, None),
            VenueSpec::Tabulated { csv, y_at_min } => (None, None, Some(csv.clone()), Some(*y_at_min)),
        };
        let kind = match (&self.liquid_kind, &cfg.liquid) {
            (Some(k), _) => k.as_str(),
            (None, VenueSpec::Infinite) => "infinite",
            (None, VenueSpec::FixedSlope { .. }) => "fixed_slope",
            (None, VenueSpec::Cpmm { .. }) => "cpmm",
            (None, VenueSpec::Tabulated { .. }) => "tabulated",
        };
        cfg.liquid = match kind {
            "infinite" => VenueSpec::Infinite,
            "fixed_slope" => VenueSpec::FixedSlope {
                slope: required(self.liquid_slope, cur_slope, "liquid.slope")?,
            },
            "cpmm" => VenueSpec::Cpmm {
                k: required(self.liquid_k, cur_k, "liquid.k")?,
            },
            "tabulated" => VenueSpec::Tabulated {
                csv: self
                    .liquid_csv
                    .clone()
                    .or(cur_csv)
                    .ok_or_else(|| Error::invalid("liquid.csv", "required for kind `tabulated`"))?,
                y_at_min: self.liquid_y_at_min.or(cur_y).unwrap_or(0.0),
            },
            other => {
                return Err(Error::invalid(
                    "liquid.kind",
                    format!("unknown kind `{other}` (infinite | fixed_slope | cpmm | tabulated)"),
                ))
            }
        };
        Ok(())
    }

    fn apply_cost(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        let (cur_c, cur_alpha, cur_slope) = match &cfg.cost {
            CostSpec::Piecewise { c, alpha, slope } => (Some(*c), Some(*alpha), Some(*slope)),
            _ => (None, None, None),
        };
        let kind = match (&self.cost_kind, &cfg.cost) {
            (Some(k), _) => k.as_str(),
            (None, CostSpec::Frictionless) => "frictionless",
            (None, CostSpec::Quadratic) => "quadratic",
            (None, CostSpec::CpmmExact) => "cpmm_exact",
            (None, CostSpec::Piecewise { .. }) => "piecewise",
        };
        cfg.cost = match kind {
            "frictionless" => CostSpec::Frictionless,
            "quadratic" => CostSpec::Quadratic,
            "cpmm_exact" => CostSpec::CpmmExact,
            "piecewise" => CostSpec::Piecewise {
                c: required(self.cost_c, cur_c, "cost.c")?,
                alpha: required(self.cost_alpha, cur_alpha, "cost.alpha")?,
                slope: required(self.cost_slope, cur_slope, "cost.slope")?,
            },
            other => {
                return Err(Error::invalid(
                    "cost.kind",
                    format!("unknown kind `{other}` (frictionless | quadratic | cpmm_exact | piecewise)"),
                ))
            }
        };
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[gbm]
q0 = 1.0
sigma = 0.2
horizon = 1.0
steps = 100

[illiquid]
kind = "cpmm"
k = 1.0

[liquid]
kind = "cpmm"
k = 2.0

[cost]
kind = "quadratic"

[run]
paths = 10
master_seed = 7
convention = "previous_price"
"#;

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.liquid, VenueSpec::Cpmm { k: 2.0 });
        assert_eq!(cfg.run.convention, ExecutionPriceConvention::PreviousPrice);
        let sim = cfg.to_sim_config().unwrap();
        assert_eq!(sim.paths, 10);
        assert_eq!(sim.cost, CostModel::Quadratic);
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = ExperimentConfig::from_toml_str("[gbm]\nsigma = 0.5\n").unwrap();
        assert_eq!(cfg.gbm.sigma, 0.5);
        assert_eq!(cfg.gbm.steps, GbmSpec::default().steps);
        let cfg = ExperimentConfig::from_toml_str("[run]\npaths = 3\n").unwrap();
        assert_eq!(cfg.gbm, ExperimentConfig::default().gbm);
        assert_eq!(cfg.run.paths, 3);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn negative_sigma_names_field() {
        let text = SAMPLE.replace("sigma = 0.2", "sigma = -0.1");
        let err = ExperimentConfig::from_toml_str(&text).unwrap().to_sim_config().unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "sigma", .. }), "{err}");
        assert!(err.to_string().contains("sigma"));
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = ExperimentConfig::from_toml_str("[run]\npathz = 3\n").unwrap_err();
        assert!(err.to_string().contains("pathz"), "{err}");
    }

    #[test]
    fn bad_curve_parameters_name_fields() {
        let text = SAMPLE.replace("k = 2.0", "k = -2.0");
        let err = ExperimentConfig::from_toml_str(&text).unwrap().to_sim_config().unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "liquid.k", .. }), "{err}");
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        Overrides {
            sigma: Some(0.4),
            liquid_k: Some(5.0),
            cost_kind: Some("piecewise".into()),
            cost_c: Some(0.01),
            cost_alpha: Some(1.0),
            cost_slope: Some(2.0),
            ..Default::default()
        }
        .apply(&mut cfg)
        .unwrap();
        assert_eq!(cfg.gbm.sigma, 0.4);
        assert_eq!(cfg.liquid, VenueSpec::Cpmm { k: 5.0 });
        assert_eq!(cfg.cost, CostSpec::Piecewise { c: 0.01, alpha: 1.0, slope: 2.0 });

        let mut cfg = ExperimentConfig::default();
        let err = Overrides {
            liquid_kind: Some("fixed_slope".into()),
            ..Default::default()
        }
        .apply(&mut cfg)
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "liquid.slope", .. }));
        let err = Overrides {
            cost_kind: Some("linear".into()),
            ..Default::default()
        }
        .apply(&mut cfg)
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "cost.kind", .. }));
    }
}
