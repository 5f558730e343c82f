use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the absorption coefficient inside the layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Zero,
    Constant {
        value: f64,
    },
    /// `scale · (x − start)³`
    Cubic {
        scale: f64,
    },
}

/// Absorption coefficient `σ(x)`, supported on `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionProfile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    pub start: f64,
    pub end: f64,
}

impl AbsorptionProfile {
    pub fn new(kind: ProfileKind, start: f64, end: f64) -> Result<Self> {
        let p = AbsorptionProfile { kind, start, end };
        p.validate()?;
        Ok(p)
    }

    pub fn zero(start: f64, end: f64) -> Self {
        AbsorptionProfile {
            kind: ProfileKind::Zero,
            start,
            end,
        }
    }

    pub fn constant(value: f64, start: f64, end: f64) -> Self {
        AbsorptionProfile {
            kind: ProfileKind::Constant { value },
            start,
            end,
        }
    }

    pub fn cubic(scale: f64, start: f64, end: f64) -> Self {
        AbsorptionProfile {
            kind: ProfileKind::Cubic { scale },
            start,
            end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::config(
                "layer.start",
                format!("need start < end, got [{}, {}]", self.start, self.end),
            ));
        }
        match self.kind {
            ProfileKind::Constant { value } if !(value >= 0.0) || !value.is_finite() => Err(
                Error::config("layer.value", format!("need value >= 0, got {value}")),
            ),
            ProfileKind::Cubic { scale } if !(scale >= 0.0) || !scale.is_finite() => Err(
                Error::config("layer.scale", format!("need scale >= 0, got {scale}")),
            ),
            _ => Ok(()),
        }
    }

    /// `σ(x)`; zero off the support.
    pub fn sample(&self, x: f64) -> f64 {
        if x < self.start || x > self.end {
            return 0.0;
        }
        match self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::Constant { value } => value,
            ProfileKind::Cubic { scale } => {
                let d = x - self.start;
                scale * d * d * d
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            ProfileKind::Zero => true,
            ProfileKind::Constant { value } => value == 0.0,
            ProfileKind::Cubic { scale } => scale == 0.0,
        }
    }

    /// Order of the first derivative that jumps at `start` (0 for a step).
    pub fn contact_order(&self) -> Option<u32> {
        match self.kind {
            ProfileKind::Zero => None,
            ProfileKind::Constant { .. } => Some(0),
            ProfileKind::Cubic { .. } => Some(3),
        }
    }
}

/// Free-function form of [`AbsorptionProfile::sample`].
pub fn sample_sigma(profile: &AbsorptionProfile, x: f64) -> f64 {
    profile.sample(x)
}
