use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular profile of the modulated bump.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// `cos²(π|x−xc|/(2r))`: vanishes with its gradient on the ball boundary.
    #[default]
    Continuous,
    /// `cos²(π|x−xc|/r)`: equals 1 on the ball boundary, so the cutoff is a jump.
    Printed,
}

/// Initial magnetic field. The initial electric field is always zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `envelope · cos(kπ v·(x−xc)/r)` on the closed ball `B(xc, r)`.
    ModulatedBump {
        center: [f64; 2],
        radius: f64,
        k: f64,
        direction: [f64; 2],
        #[serde(default)]
        envelope: Envelope,
    },
    /// `exp(−|x−xc|²/(2 width²))`, set to zero where it falls below `cutoff`.
    Gaussian {
        center: [f64; 2],
        width: f64,
        cutoff: f64,
    },
    /// Independent uniform values in `[−1, 1]` at nodes inside `B(xc, r)`.
    Random {
        center: [f64; 2],
        radius: f64,
        seed: u64,
    },
}

impl InitialCondition {
    /// Bump centred at `(5, 5)` with radius 0.8 and the continuous envelope.
    pub fn bump(k: f64, direction: [f64; 2]) -> Self {
        InitialCondition::ModulatedBump {
            center: [5.0, 5.0],
            radius: 0.8,
            k,
            direction,
            envelope: Envelope::Continuous,
        }
    }

    pub fn with_envelope(self, envelope: Envelope) -> Self {
        match self {
            InitialCondition::ModulatedBump {
                center,
                radius,
                k,
                direction,
                ..
            } => InitialCondition::ModulatedBump {
                center,
                radius,
                k,
                direction,
                envelope,
            },
            other => other,
        }
    }

    pub fn gaussian() -> Self {
        InitialCondition::Gaussian {
            center: [5.0, 5.0],
            width: 0.5,
            cutoff: 1e-12,
        }
    }

    pub fn random(seed: u64) -> Self {
        InitialCondition::Random {
            center: [5.0, 5.0],
            radius: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match self {
            InitialCondition::ModulatedBump { radius, k, .. } => {
                if !ok(*radius) {
                    return Err(Error::config(
                        "init.radius",
                        format!("need radius > 0, got {radius}"),
                    ));
                }
                if !k.is_finite() {
                    return Err(Error::config("init.k", "must be finite"));
                }
            }
            InitialCondition::Gaussian { width, cutoff, .. } => {
                if !ok(*width) {
                    return Err(Error::config(
                        "init.width",
                        format!("need width > 0, got {width}"),
                    ));
                }
                if !(*cutoff > 0.0 && *cutoff < 1.0) {
                    return Err(Error::config(
                        "init.cutoff",
                        format!("need 0 < cutoff < 1, got {cutoff}"),
                    ));
                }
            }
            InitialCondition::Random { radius, .. } => {
                if !ok(*radius) {
                    return Err(Error::config(
                        "init.radius",
                        format!("need radius > 0, got {radius}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn center(&self) -> [f64; 2] {
        match self {
            InitialCondition::ModulatedBump { center, .. }
            | InitialCondition::Gaussian { center, .. }
            | InitialCondition::Random { center, .. } => *center,
        }
    }

    /// Radius of a ball containing the support.
    pub fn support_radius(&self) -> f64 {
        match *self {
            InitialCondition::ModulatedBump { radius, .. }
            | InitialCondition::Random { radius, .. } => radius,
            InitialCondition::Gaussian { width, cutoff, .. } => width * (-2.0 * cutoff.ln()).sqrt(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            InitialCondition::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// `Hz⁰` at the point `(x, y)`.
    pub fn hz(&self, x: f64, y: f64) -> f64 {
        let c = self.center();
        let (dx, dy) = (x - c[0], y - c[1]);
        let dist = dx.hypot(dy);
        match *self {
            InitialCondition::ModulatedBump {
                radius,
                k,
                direction,
                envelope,
                ..
            } => {
                if dist > radius {
                    return 0.0;
                }
                let arg = match envelope {
                    Envelope::Continuous => 0.5 * PI * dist / radius,
                    Envelope::Printed => PI * dist / radius,
                };
                let envelope = arg.cos().powi(2);
                let phase = k * PI * (direction[0] * dx + direction[1] * dy) / radius;
                envelope * phase.cos()
            }
            InitialCondition::Gaussian { width, cutoff, .. } => {
                let v = (-(dist * dist) / (2.0 * width * width)).exp();
                if v < cutoff {
                    0.0
                } else {
                    v
                }
            }
            InitialCondition::Random { radius, seed, .. } => {
                if dist > radius {
                    return 0.0;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, x, y));
                rng.gen_range(-1.0..=1.0)
            }
        }
    }
}

/// Free-function form of [`InitialCondition::hz`].
pub fn initial_hz(init: &InitialCondition, x: f64, y: f64) -> f64 {
    init.hz(x, y)
}

// The random field is a pure function of (seed, node position), so it does not
// depend on traversal order. Coordinates are quantized to 1e-9 first so that
// a node computed as x_min + (i + 1/2) dx on differently offset grids maps to
// the same stream.
fn point_seed(seed: u64, x: f64, y: f64) -> u64 {
    let qx = (x * 1e9).round() as i64 as u64;
    let qy = (y * 1e9).round() as i64 as u64;
    splitmix(splitmix(seed ^ splitmix(qx)) ^ qy.rotate_left(29))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_bump_center_and_zeros() {
        let b = InitialCondition::bump(10.0, [1.0, 0.0]).with_envelope(Envelope::Printed);
        assert_eq!(initial_hz(&b, 5.0, 5.0), 1.0);
        // |x - xc| = r/2 along y, so v·(x - xc) = 0
        assert!(initial_hz(&b, 5.0, 5.4).abs() < 1e-15);
        // the printed envelope jumps from 1 to 0 across the ball boundary
        assert!((initial_hz(&b, 5.0, 5.8 - 1e-12) - 1.0).abs() < 1e-9);
        assert_eq!(initial_hz(&b, 6.6, 5.0), 0.0);
    }

    #[test]
    fn continuous_bump_vanishes_on_the_boundary() {
        let b = InitialCondition::bump(10.0, [1.0, 0.0]);
        assert_eq!(initial_hz(&b, 5.0, 5.0), 1.0);
        assert!((initial_hz(&b, 5.0, 5.4) - 0.5).abs() < 1e-15);
        assert!(initial_hz(&b, 5.0, 5.8 - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn every_kind_vanishes_at_twice_the_radius() {
        for init in [
            InitialCondition::bump(1.0, [1.0, 1.0]),
            InitialCondition::random(7),
        ] {
            let r = init.support_radius();
            for a in 0..16 {
                let th = a as f64 * PI / 8.0;
                assert_eq!(
                    init.hz(5.0 + 2.0 * r * th.cos(), 5.0 + 2.0 * r * th.sin()),
                    0.0
                );
            }
        }
        let g = InitialCondition::gaussian();
        let r = g.support_radius();
        assert_eq!(g.hz(5.0 + 2.0 * r, 5.0), 0.0);
    }

    #[test]
    fn random_field_is_reproducible_and_bounded() {
        let a = InitialCondition::random(42);
        let b = InitialCondition::random(42);
        let c = InitialCondition::random(43);
        let mut differs = false;
        for n in 0..200 {
            let (x, y) = (4.3 + 0.007 * n as f64, 5.1 - 0.003 * n as f64);
            let v = a.hz(x, y);
            assert_eq!(v, b.hz(x, y));
            assert!((-1.0..=1.0).contains(&v));
            differs |= v != c.hz(x, y);
        }
        assert!(differs);
    }
}
