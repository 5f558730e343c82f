//! Leading-order reflection coefficient of a smart layer.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `R = iμ(1+ν)(ξ₁² − τ²) / (8τξ₁²)` for `(τ, ξ)` on the light cone.
///
/// `R` is the reflected amplitude per unit wavelength and per unit jump of
/// the absorption at the layer interface; it vanishes at normal incidence.
pub fn smart_reflection_coefficient(tau: f64, xi: &[f64], mu: f64, nu: f64) -> Result<C64> {
    if xi.is_empty() || xi.len() > 3 {
        return Err(Error::Domain(format!("xi must have 1 to 3 components, got {}", xi.len())));
    }
    let xi1 = xi[0];
    if xi1 == 0.0 || tau == 0.0 {
        return Err(Error::Domain("tau and xi_1 must be nonzero".into()));
    }
    let k2: f64 = xi.iter().map(|x| x * x).sum();
    if (tau * tau - k2).abs() > 1e-9 * k2.max(tau * tau) {
        return Err(Error::Domain(format!(
            "(tau, xi) is off the light cone: tau^2 = {}, |xi|^2 = {k2}",
            tau * tau
        )));
    }
    let value = mu * (1.0 + nu) * (xi1 * xi1 - tau * tau) / (8.0 * tau * xi1 * xi1);
    Ok(C64::new(0.0, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_normal_incidence() {
        let r = smart_reflection_coefficient(3.0, &[3.0, 0.0], 1.0, 0.0).unwrap();
        assert_eq!(r.norm(), 0.0);
    }

    #[test]
    fn oblique_value() {
        let r = smart_reflection_coefficient(2f64.sqrt(), &[1.0, 1.0], 1.0, 0.0).unwrap();
        assert!(r.re == 0.0 && (r.im + 1.0 / (8.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn degree_minus_one_and_odd_in_tau() {
        let xi = [0.8, -0.6, 0.0];
        let r1 = smart_reflection_coefficient(1.0, &xi, 0.7, 0.3).unwrap();
        let r2 = smart_reflection_coefficient(2.0, &[1.6, -1.2, 0.0], 0.7, 0.3).unwrap();
        assert!((r2 - r1 / 2.0).norm() < 1e-12);
        let rm = smart_reflection_coefficient(-1.0, &xi, 0.7, 0.3).unwrap();
        assert!((rm + r1).norm() < 1e-15);
    }

    #[test]
    fn off_cone_and_grazing_inputs_are_rejected() {
        assert!(smart_reflection_coefficient(1.0, &[1.0, 1.0], 1.0, 0.0).is_err());
        assert!(smart_reflection_coefficient(1.0, &[0.0, 1.0], 1.0, 0.0).is_err());
    }
}
