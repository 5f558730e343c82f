//! Symbols of constant-coefficient first-order systems and of their
//! split (doubled) absorbing-layer versions.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `∂t + Σ A_l ∂_l` with constant `N×N` coefficients in `d` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSystem {
    a: Vec<DMatrix<C64>>,
}

impl HyperbolicSystem {
    pub fn new(a: Vec<DMatrix<C64>>) -> Result<Self> {
        if !(1..=3).contains(&a.len()) {
            return Err(Error::Domain(format!(
                "dimension must be 1, 2 or 3, got {}",
                a.len()
            )));
        }
        let n = a[0].nrows();
        if n == 0 || a.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::Domain(
                "coefficient matrices must all be square of the same size".into(),
            ));
        }
        Ok(HyperbolicSystem { a })
    }

    fn real(rows: &[&[f64]]) -> DMatrix<C64> {
        let n = rows.len();
        DMatrix::from_fn(n, n, |i, j| C64::from(rows[i][j]))
    }

    /// Transverse-electric Maxwell system in the unknowns `(Ex, Ey, Hz)`.
    pub fn maxwell_te() -> Self {
        let a1 = Self::real(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]);
        let a2 = Self::real(&[&[0.0, 0.0, -1.0], &[0.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
        HyperbolicSystem { a: vec![a1, a2] }
    }

    /// The scalar operator `∂t + ∂₁ + ∂₂`.
    pub fn scalar_transport() -> Self {
        let one = Self::real(&[&[1.0]]);
        HyperbolicSystem {
            a: vec![one.clone(), one],
        }
    }

    pub fn dimension(&self) -> usize {
        self.a.len()
    }

    pub fn size(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn coefficients(&self) -> &[DMatrix<C64>] {
        &self.a
    }

    fn check_len(&self, what: &str, v: usize) -> Result<()> {
        if v != self.dimension() {
            return Err(Error::Domain(format!(
                "{what} has {v} components, the system has {}",
                self.dimension()
            )));
        }
        Ok(())
    }

    /// `τI + Σ ξ_l A_l`.
    pub fn symbol(&self, tau: C64, xi: &[C64]) -> Result<DMatrix<C64>> {
        self.check_len("xi", xi.len())?;
        let n = self.size();
        let mut m = DMatrix::identity(n, n) * tau;
        for (a, &x) in self.a.iter().zip(xi) {
            m += a * x;
        }
        Ok(m)
    }

    pub fn det(&self, tau: C64, xi: &[C64]) -> Result<C64> {
        Ok(self.symbol(tau, xi)?.lu().determinant())
    }

    /// Symbol of the split system `(∂t + σ_l) u^l + A_l ∂_l Σ_m u^m = 0`:
    /// block `(l, m)` is `(τ + σ_l) δ_lm I + ξ_l A_l`.
    pub fn doubled_symbol(&self, tau: C64, xi: &[f64], sigma: &[f64]) -> Result<DMatrix<C64>> {
        self.check_len("xi", xi.len())?;
        self.check_len("sigma", sigma.len())?;
        let (d, n) = (self.dimension(), self.size());
        let mut m = DMatrix::zeros(d * n, d * n);
        for l in 0..d {
            let block = &self.a[l] * C64::from(xi[l]);
            for mm in 0..d {
                let mut view = m.view_mut((l * n, mm * n), (n, n));
                view += &block;
                if l == mm {
                    for i in 0..n {
                        view[(i, i)] += tau + sigma[l];
                    }
                }
            }
        }
        Ok(m)
    }
}

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn relative_residual(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn check_prefactors(tau: C64, sigma: &[f64]) -> Result<()> {
    let tiny = 1e-14 * tau.norm().max(1.0);
    if tau.norm() <= tiny {
        return Err(Error::Domain("tau must be nonzero".into()));
    }
    if let Some(s) = sigma.iter().find(|&&s| (tau + s).norm() <= tiny) {
        return Err(Error::Domain(format!("tau + sigma vanishes for sigma = {s}")));
    }
    Ok(())
}

/// Compares the determinant of the doubled symbol, computed by LU, with the
/// factored form `det L(P, ξ_1 Π_{j≠1}(τ+σ_j), …)` where `P = Π_j (τ+σ_j)`.
/// When `σ = 0` the factored form `τ^{N(d−1)} det L(τ, ξ)` is checked too.
/// Returns the largest relative residual.
pub fn berenger_symbol_identity(
    sys: &HyperbolicSystem,
    tau: C64,
    xi: &[f64],
    sigma: &[f64],
) -> Result<f64> {
    check_prefactors(tau, sigma)?;
    let direct = sys.doubled_symbol(tau, xi, sigma)?.lu().determinant();
    let shifted: Vec<C64> = sigma.iter().map(|&s| tau + s).collect();
    let p: C64 = shifted.iter().product();
    let scaled: Vec<C64> = xi.iter().zip(&shifted).map(|(&x, &t)| p / t * x).collect();
    let mut worst = relative_residual(direct, sys.det(p, &scaled)?);
    if sigma.iter().all(|&s| s == 0.0) {
        let xi_c: Vec<C64> = xi.iter().map(|&x| C64::from(x)).collect();
        let k = (sys.size() * (sys.dimension() - 1)) as i32;
        let undoubled = tau.powi(k) * sys.det(tau, &xi_c)?;
        worst = worst.max(relative_residual(direct, undoubled));
    }
    Ok(worst)
}

/// `τ² − Σ_j ξ_j² τ² / (τ + σ_j)²`, the symbol determinant of the unsplit layer.
pub fn spml_symbol_det(tau: C64, xi: &[f64], sigma: &[f64]) -> Result<C64> {
    if xi.len() != sigma.len() {
        return Err(Error::Domain("xi and sigma lengths differ".into()));
    }
    check_prefactors(tau, sigma)?;
    let t2 = tau * tau;
    Ok(xi
        .iter()
        .zip(sigma)
        .fold(t2, |acc, (&x, &s)| acc - x * x * t2 / ((tau + s) * (tau + s))))
}

/// For the TE Maxwell system the doubled determinant factors as
/// `P³/τ² · det R`. Returns the relative residual of that factorization.
pub fn spml_factorization_residual(tau: C64, xi: &[f64], sigma: &[f64]) -> Result<f64> {
    let sys = HyperbolicSystem::maxwell_te();
    check_prefactors(tau, sigma)?;
    let direct = sys.doubled_symbol(tau, xi, sigma)?.lu().determinant();
    let p: C64 = sigma.iter().map(|&s| tau + s).product();
    let factored = p.powi(3) / (tau * tau) * spml_symbol_det(tau, xi, sigma)?;
    Ok(relative_residual(direct, factored))
}

/// Nonzero roots of `det R(·, ξ)`: the zeros of
/// `Π_j (τ+σ_j)² − Σ_j ξ_j² Π_{k≠j} (τ+σ_k)²`, found as companion-matrix
/// eigenvalues and polished by Newton's method.
pub fn spml_roots(xi: &[f64], sigma: &[f64]) -> Result<Vec<C64>> {
    if xi.len() != sigma.len() || xi.is_empty() {
        return Err(Error::Domain("xi and sigma must be nonempty and of equal length".into()));
    }
    // real coefficients, lowest degree first
    let mul = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let sq = |s: f64| [s * s, 2.0 * s, 1.0];
    let mut poly = sigma.iter().fold(vec![1.0], |acc, &s| mul(&acc, &sq(s)));
    for (j, &x) in xi.iter().enumerate() {
        let others = sigma
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .fold(vec![1.0], |acc, (_, &s)| mul(&acc, &sq(s)));
        for (c, o) in poly.iter_mut().zip(&others) {
            *c -= x * x * o;
        }
    }
    let deg = poly.len() - 1;
    let lead = poly[deg];
    let companion = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -poly[deg - 1 - j] / lead
        } else if j + 1 == i {
            1.0
        } else {
            0.0
        }
    });
    let eval = |t: C64| {
        let (mut v, mut dv) = (C64::from(0.0), C64::from(0.0));
        for &c in poly.iter().rev() {
            dv = dv * t + v;
            v = v * t + c;
        }
        (v, dv)
    };
    Ok(companion
        .complex_eigenvalues()
        .iter()
        .map(|&t0| {
            let mut t = t0;
            for _ in 0..8 {
                let (v, dv) = eval(t);
                if dv.norm() == 0.0 {
                    break;
                }
                t -= v / dv;
            }
            t
        })
        .collect())
}

/// Roots in `τ` of the doubled scalar-transport symbol at `(ξ, −ξ)` with
/// `σ = (1, 0)`: `τ² + τ − ξ = 0`.
pub fn scalar_transport_roots(xi: f64) -> [C64; 2] {
    let s = C64::from(1.0 + 4.0 * xi).sqrt();
    [(s - 1.0) / 2.0, (-s - 1.0) / 2.0]
}
