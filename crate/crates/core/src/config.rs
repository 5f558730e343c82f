//! Experiment configuration and its structured-text (TOML) form.
//!
//! Every key except `method` has a default reproducing the baseline layer
//! experiment: a `(0,10)²` domain with `Δx = Δy = 0.1`, `Δt = 0.0702`, interest
//! region `(0,6)×(0,10)`, constant `σ = 2` on `[6,10]`, a `k = 10` modulated bump
//! at `(5,5)` moving along `x`, `ν = 0`, `μ = 1`, `t_final = 4`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{steps_for, GridSpec, YeeGrid};
use crate::init::InitialCondition;
use crate::profile::AbsorptionProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Maxwell,
    Berenger,
    Smart,
    Spml,
    HmlV1,
    HmlV2,
    HmlV3,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Maxwell,
        Method::Berenger,
        Method::Smart,
        Method::Spml,
        Method::HmlV1,
        Method::HmlV2,
        Method::HmlV3,
    ];

    /// The five rows of the comparison tables.
    pub const TABLE_ROWS: [Method; 5] = [
        Method::Berenger,
        Method::Smart,
        Method::HmlV1,
        Method::HmlV2,
        Method::HmlV3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Maxwell => "maxwell",
            Method::Berenger => "berenger",
            Method::Smart => "smart",
            Method::Spml => "spml",
            Method::HmlV1 => "hml_v1",
            Method::HmlV2 => "hml_v2",
            Method::HmlV3 => "hml_v3",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Maxwell => "Maxwell",
            Method::Berenger => "Berenger",
            Method::Smart => "Smart",
            Method::Spml => "SPML",
            Method::HmlV1 => "HMLV1",
            Method::HmlV2 => "HMLV2",
            Method::HmlV3 => "HMLV3",
        }
    }

    pub fn is_hml(self) -> bool {
        matches!(self, Method::HmlV1 | Method::HmlV2 | Method::HmlV3)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config("method", format!("unknown method `{s}`")))
    }
}

/// Condition on the east wall `x = x_max`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EastBoundary {
    /// `Ey = Hz`, weakly reflecting.
    #[default]
    Transparent,
    /// `Ey = 0`.
    Pec,
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x > self.x_min && x < self.x_max && y > self.y_min && y < self.y_max
    }
}

impl Default for Region {
    fn default() -> Self {
        Region {
            x_min: 0.0,
            x_max: 6.0,
            y_min: 0.0,
            y_max: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimConfigFile", into = "SimConfigFile")]
pub struct SimConfig {
    /// Grid at refinement level 0.
    pub base_grid: YeeGrid,
    pub refinement: u32,
    pub interest: Region,
    pub layer: AbsorptionProfile,
    pub method: Method,
    /// Backward-absorption weight `ν`.
    pub nu: f64,
    /// Absorption multiplier `μ`; solvers use `μσ`.
    pub mu: f64,
    pub init: InitialCondition,
    pub t_final: f64,
    pub east: EastBoundary,
    /// Number of harmonious extrapolation levels. Only 1 is implemented.
    pub extrapolation_order: u32,
}

impl SimConfig {
    /// Baseline experiment for `method`.
    pub fn baseline(method: Method) -> Self {
        SimConfig {
            base_grid: YeeGrid::baseline(4.0),
            refinement: 0,
            interest: Region::default(),
            layer: AbsorptionProfile::constant(2.0, 6.0, 10.0),
            method,
            nu: 0.0,
            mu: 1.0,
            init: InitialCondition::bump(10.0, [1.0, 0.0]),
            t_final: 4.0,
            east: EastBoundary::Transparent,
            extrapolation_order: 1,
        }
    }

    /// The effective grid after applying `refinement`.
    pub fn grid(&self) -> YeeGrid {
        self.base_grid.refined(self.refinement)
    }

    pub fn with_method(&self, method: Method) -> Self {
        SimConfig {
            method,
            ..self.clone()
        }
    }

    pub fn with_refinement(&self, refinement: u32) -> Self {
        SimConfig {
            refinement,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.base_grid;
        let r = &self.interest;
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::config(
                "t_final",
                format!("need t_final > 0, got {}", self.t_final),
            ));
        }
        if g.n_steps != steps_for(self.t_final, g.dt) {
            return Err(Error::config(
                "grid.n_steps",
                format!(
                    "{} steps of {} do not cover t_final = {} (expected {})",
                    g.n_steps,
                    g.dt,
                    self.t_final,
                    steps_for(self.t_final, g.dt)
                ),
            ));
        }
        if !(r.x_min < r.x_max && r.y_min < r.y_max) {
            return Err(Error::config("interest", "empty rectangle"));
        }
        if r.x_min < g.x_min || r.x_max > g.x_max || r.y_min < g.y_min || r.y_max > g.y_max {
            return Err(Error::config(
                "interest",
                "interest region must lie inside the grid domain",
            ));
        }
        self.layer.validate()?;
        if self.layer.start < g.x_min || self.layer.end > g.x_max {
            return Err(Error::config(
                "layer",
                "layer support must lie inside the grid domain",
            ));
        }
        if self.layer.start < r.x_max {
            return Err(Error::config(
                "layer.start",
                format!(
                    "layer starts at {} inside the interest region ending at {}",
                    self.layer.start, r.x_max
                ),
            ));
        }
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return Err(Error::config(
                "nu",
                format!("need finite nu >= 0, got {}", self.nu),
            ));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::config(
                "mu",
                format!("need finite mu >= 0, got {}", self.mu),
            ));
        }
        if self.extrapolation_order != 1 {
            return Err(Error::config(
                "extrapolation_order",
                format!(
                    "only single-level extrapolation is implemented, got {}",
                    self.extrapolation_order
                ),
            ));
        }
        if self.refinement > 6 {
            return Err(Error::config("refinement", "at most 6 refinement levels"));
        }
        self.init.validate()
    }

    /// Parses TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| parse_error(e.message()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

fn parse_error(msg: &str) -> Error {
    // Validation failures come back through serde as custom messages; keep the
    // key name that `Error::Config` put at the front.
    Error::Parse {
        path: "<config>".into(),
        reason: msg.to_string(),
    }
}

/// On-disk layout of [`SimConfig`]; every key but `method` is optional.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimConfigFile {
    method: Method,
    #[serde(default)]
    nu: f64,
    #[serde(default = "one")]
    mu: f64,
    #[serde(default = "four")]
    t_final: f64,
    #[serde(default)]
    refinement: u32,
    #[serde(default)]
    east: EastBoundary,
    #[serde(default = "one_u32")]
    extrapolation_order: u32,
    #[serde(default)]
    grid: Option<GridFile>,
    #[serde(default)]
    interest: Option<Region>,
    #[serde(default)]
    layer: Option<AbsorptionProfile>,
    #[serde(default)]
    init: Option<InitialCondition>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
    dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_steps: Option<usize>,
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

fn four() -> f64 {
    4.0
}

impl TryFrom<SimConfigFile> for SimConfig {
    type Error = Error;

    fn try_from(f: SimConfigFile) -> Result<Self> {
        let base = SimConfig::baseline(f.method);
        let base_grid = match f.grid {
            None => YeeGrid::baseline(f.t_final),
            Some(g) => YeeGrid::try_from(GridSpec {
                x_min: g.x_min,
                x_max: g.x_max,
                y_min: g.y_min,
                y_max: g.y_max,
                nx: g.nx,
                ny: g.ny,
                dt: g.dt,
                n_steps: g.n_steps.unwrap_or_else(|| steps_for(f.t_final, g.dt)),
            })?,
        };
        let cfg = SimConfig {
            base_grid,
            refinement: f.refinement,
            interest: f.interest.unwrap_or(base.interest),
            layer: f.layer.unwrap_or(base.layer),
            method: f.method,
            nu: f.nu,
            mu: f.mu,
            init: f.init.unwrap_or(base.init),
            t_final: f.t_final,
            east: f.east,
            extrapolation_order: f.extrapolation_order,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<SimConfig> for SimConfigFile {
    fn from(c: SimConfig) -> Self {
        let g = c.base_grid;
        SimConfigFile {
            method: c.method,
            nu: c.nu,
            mu: c.mu,
            t_final: c.t_final,
            refinement: c.refinement,
            east: c.east,
            extrapolation_order: c.extrapolation_order,
            grid: Some(GridFile {
                x_min: g.x_min,
                x_max: g.x_max,
                y_min: g.y_min,
                y_max: g.y_max,
                nx: g.nx,
                ny: g.ny,
                dt: g.dt,
                n_steps: Some(g.n_steps),
            }),
            interest: Some(c.interest),
            layer: Some(c.layer),
            init: Some(c.init),
        }
    }
}
