//! Quadratic dispersion relations `τ² = q(ξ)`, their group velocities and
//! the transport rate that decides whether a layer amplifies a wave.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// `β` values this close to zero are reported as tangential, not amplified.
pub const BETA_TOLERANCE: f64 = 1e-12;

/// One sheet `τ(ξ) = √(ξᵀQξ)` of a quadratic dispersion relation.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionModel {
    q: DMatrix<f64>,
}

impl DispersionModel {
    /// `q` must be symmetric positive definite.
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        let d = q.nrows();
        if d == 0 || d > 3 || q.ncols() != d {
            return Err(Error::Domain(format!(
                "form must be square of size 1 to 3, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let scale = q.amax().max(f64::MIN_POSITIVE);
        if (&q - q.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Domain("form must be symmetric".into()));
        }
        if q.clone().cholesky().is_none() {
            return Err(Error::Domain("form must be positive definite".into()));
        }
        Ok(DispersionModel { q })
    }

    /// `q(ξ) = |ξ|²`.
    pub fn isotropic(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    /// Planar form with eigenvalues `l1`, `l2` along axes rotated by `angle`
    /// radians from the coordinate axes.
    pub fn rotated(angle: f64, l1: f64, l2: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[l1, l2]));
        let q = &r * d * r.transpose();
        // symmetrize away rounding
        Self::new((&q + q.transpose()) * 0.5)
    }

    pub fn dimension(&self) -> usize {
        self.q.nrows()
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.q
    }

    fn vector(&self, xi: &[f64]) -> Result<DVector<f64>> {
        if xi.len() != self.dimension() {
            return Err(Error::Domain(format!(
                "xi has {} components, the model has {}",
                xi.len(),
                self.dimension()
            )));
        }
        if xi.iter().all(|&x| x == 0.0) {
            return Err(Error::Domain("xi must be nonzero".into()));
        }
        Ok(DVector::from_column_slice(xi))
    }

    pub fn q(&self, xi: &[f64]) -> Result<f64> {
        let v = self.vector(xi)?;
        Ok(v.dot(&(&self.q * &v)))
    }

    pub fn tau(&self, xi: &[f64]) -> Result<f64> {
        Ok(self.q(xi)?.sqrt())
    }

    /// `v = −∇τ = −Qξ/τ`.
    pub fn group_velocity(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let v = self.vector(xi)?;
        let qv = &self.q * &v;
        let tau = v.dot(&qv).sqrt();
        Ok(qv.iter().map(|&g| -g / tau).collect())
    }

    /// Transport rate `β = Σ_l σ_l ξ_l (∂τ/∂ξ_l) / τ`; negative values grow.
    pub fn beta(&self, sigma: &[f64], xi: &[f64]) -> Result<f64> {
        if sigma.len() != self.dimension() {
            return Err(Error::Domain(format!(
                "sigma has {} components, the model has {}",
                sigma.len(),
                self.dimension()
            )));
        }
        let v = self.vector(xi)?;
        let qv = &self.q * &v;
        let tau2 = v.dot(&qv);
        Ok(sigma
            .iter()
            .zip(v.iter().zip(qv.iter()))
            .map(|(s, (x, g))| s * x * g)
            .sum::<f64>()
            / tau2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionLabel {
    /// Travels away from the layer (`v₁ ≤ 0`).
    Incoming,
    /// Enters the layer and decays there.
    Outgoing,
    /// Enters the layer with `|β|` within [`BETA_TOLERANCE`].
    Boundary,
    /// Enters the layer and grows there.
    Amplified,
}

/// Classification of one sampled unit direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionSample {
    /// Angle of `ξ` in radians, in `[0, 2π)`.
    pub angle: f64,
    pub xi: [f64; 2],
    pub v1: f64,
    pub beta: f64,
    pub label: DirectionLabel,
}

/// Classifies `n` equispaced unit wave vectors for a layer at `x₁ > 0`
/// with absorption `sigma`. A direction is outgoing when `v₁ > 0` and
/// amplified when, in addition, `β < 0`.
pub fn amplification_map(
    model: &DispersionModel,
    sigma: &[f64],
    n: usize,
) -> Result<Vec<DirectionSample>> {
    if model.dimension() != 2 {
        return Err(Error::Domain("direction sampling needs a planar model".into()));
    }
    if n < 360 {
        return Err(Error::Domain(format!("need at least 360 directions, got {n}")));
    }
    (0..n)
        .map(|i| {
            let angle = 2.0 * PI * i as f64 / n as f64;
            let xi = [angle.cos(), angle.sin()];
            let v1 = model.group_velocity(&xi)?[0];
            let beta = model.beta(sigma, &xi)?;
            let label = if v1 <= 0.0 {
                DirectionLabel::Incoming
            } else if beta.abs() <= BETA_TOLERANCE {
                DirectionLabel::Boundary
            } else if beta < 0.0 {
                DirectionLabel::Amplified
            } else {
                DirectionLabel::Outgoing
            };
            Ok(DirectionSample {
                angle,
                xi,
                v1,
                beta,
                label,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_velocity() {
        let m = DispersionModel::isotropic(2).unwrap();
        let v = m.group_velocity(&[3.0, 4.0]).unwrap();
        assert!((v[0] + 0.6).abs() < 1e-15 && (v[1] + 0.8).abs() < 1e-15);
    }

    #[test]
    fn velocity_matches_finite_differences() {
        let m = DispersionModel::diagonal(&[1.0, 4.0]).unwrap();
        let xi = [1.0, 1.0];
        let v = m.group_velocity(&xi).unwrap();
        let h = 1e-6;
        for l in 0..2 {
            let (mut p, mut q) = (xi, xi);
            p[l] += h;
            q[l] -= h;
            let fd = -(m.tau(&p).unwrap() - m.tau(&q).unwrap()) / (2.0 * h);
            assert!((fd - v[l]).abs() < 1e-6);
        }
    }

    #[test]
    fn tau_is_one_homogeneous() {
        let m = DispersionModel::rotated(0.4, 1.0, 3.0).unwrap();
        let t1 = m.tau(&[0.3, -0.9]).unwrap();
        let t2 = m.tau(&[0.6, -1.8]).unwrap();
        assert!((t2 - 2.0 * t1).abs() <= 1e-12 * t2);
    }

    #[test]
    fn isotropic_beta_closed_form() {
        let m = DispersionModel::isotropic(2).unwrap();
        assert!((m.beta(&[2.0, 0.0], &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(m.beta(&[0.0, 0.0], &[0.2, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn zero_and_malformed_inputs_are_rejected() {
        let m = DispersionModel::isotropic(2).unwrap();
        assert!(m.group_velocity(&[0.0, 0.0]).is_err());
        assert!(m.beta(&[1.0], &[1.0, 0.0]).is_err());
        assert!(DispersionModel::diagonal(&[1.0, -1.0]).is_err());
        assert!(DispersionModel::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])).is_err());
        assert!(amplification_map(&m, &[1.0, 0.0], 100).is_err());
    }

    #[test]
    fn rotated_model_has_a_growing_direction() {
        let m = DispersionModel::rotated(PI / 6.0, 1.0, 4.0).unwrap();
        let map = amplification_map(&m, &[1.0, 0.0], 720).unwrap();
        assert!(map.iter().any(|s| s.label == DirectionLabel::Amplified));
        let aligned = DispersionModel::diagonal(&[1.0, 4.0]).unwrap();
        let map = amplification_map(&aligned, &[1.0, 0.0], 720).unwrap();
        assert!(map.iter().all(|s| s.label != DirectionLabel::Amplified));
    }
}
