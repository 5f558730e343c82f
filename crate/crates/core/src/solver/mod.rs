//! One leapfrog step of each absorbing-layer scheme on the Yee grid.
//!
//! A step takes `(Eⁿ⁻¹, Hzⁿ⁻½)` to `(Eⁿ, Hzⁿ⁺½)`: the electric fields are
//! advanced first, boundary conditions are imposed on them, then the magnetic
//! field is advanced from the new electric field. Every `σ·u` term is treated
//! semi-implicitly as `σ(uⁿ⁺¹ + uⁿ)/2`, and the solvers use `μσ` wherever the
//! profile's `σ` appears.

mod berenger;
mod maxwell;
mod smart;
mod spml;

pub use berenger::step_berenger;
pub use maxwell::step_maxwell;
pub(crate) use smart::east_slope;
pub use smart::{smart_ey, smart_hz, step_smart};
pub use spml::step_spml;

use crate::config::{EastBoundary, Method, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{Field2, FieldState};
use crate::grid::YeeGrid;
use crate::profile::AbsorptionProfile;

/// Wall conditions of the computational rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundaries {
    /// `n∧E = 0` on the west, north and south walls; east per [`EastBoundary`].
    Walls(EastBoundary),
    /// Doubly periodic. Seam rows are updated without absorption, so this is
    /// meant for absorption-free test problems.
    Periodic,
}

/// Everything a stepper needs besides the state.
#[derive(Clone, Debug)]
pub struct StepContext {
    pub grid: YeeGrid,
    /// `σ(x_i)` at the `nx + 1` integer columns (where `ey` lives).
    pub sigma_at_int: Vec<f64>,
    /// `σ(x_{i+½})` at the `nx` half columns (where `hz` and `ex` live).
    pub sigma_at_half: Vec<f64>,
    pub nu: f64,
    pub mu: f64,
    pub boundaries: Boundaries,
    pub exec: Exec,
}

impl StepContext {
    pub fn new(grid: &YeeGrid, layer: &AbsorptionProfile, nu: f64, mu: f64) -> Self {
        StepContext {
            grid: grid.clone(),
            sigma_at_int: (0..=grid.nx).map(|i| layer.sample(grid.x_int(i))).collect(),
            sigma_at_half: (0..grid.nx).map(|i| layer.sample(grid.x_half(i))).collect(),
            nu,
            mu,
            boundaries: Boundaries::Walls(EastBoundary::Transparent),
            exec: Exec::default(),
        }
    }

    /// Context for the effective grid of `cfg`.
    pub fn from_config(cfg: &SimConfig) -> Self {
        StepContext::new(&cfg.grid(), &cfg.layer, cfg.nu, cfg.mu)
            .with_boundaries(Boundaries::Walls(cfg.east))
    }

    /// Absorption-free context.
    pub fn free(grid: &YeeGrid) -> Self {
        StepContext::new(
            grid,
            &AbsorptionProfile::zero(grid.x_min, grid.x_max),
            0.0,
            1.0,
        )
    }

    pub fn with_boundaries(mut self, boundaries: Boundaries) -> Self {
        self.boundaries = boundaries;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// `μσ_i` scaled by `factor`.
    #[inline]
    pub(crate) fn s_int(&self, i: usize, factor: f64) -> f64 {
        factor * self.mu * self.sigma_at_int[i]
    }

    #[inline]
    pub(crate) fn s_half(&self, i: usize, factor: f64) -> f64 {
        factor * self.mu * self.sigma_at_half[i]
    }

    pub fn is_absorption_free(&self) -> bool {
        self.mu == 0.0
            || (self.sigma_at_int.iter().all(|&s| s == 0.0)
                && self.sigma_at_half.iter().all(|&s| s == 0.0))
    }
}

/// Builds the initial state of `method` for the configured experiment.
pub fn initial_state(cfg: &SimConfig, grid: &YeeGrid) -> FieldState {
    let interest = cfg.interest;
    let init = &cfg.init;
    // Initial data are restricted to the interest region; this only bites for
    // data whose support reaches the layer.
    let state = FieldState::with_hz(grid, |x, y| {
        if interest.contains(x, y) {
            init.hz(x, y)
        } else {
            0.0
        }
    });
    prepare_state(state, cfg.method)
}

/// Attaches the auxiliary arrays `method` needs.
pub fn prepare_state(state: FieldState, method: Method) -> FieldState {
    match method {
        Method::Berenger => state.into_split(),
        Method::Spml => state.into_spml(),
        _ => state,
    }
}

/// Advances one step with a single-state scheme. HML methods live in
/// [`crate::hml`] and are rejected here.
pub fn step(method: Method, state: &mut FieldState, ctx: &StepContext) -> Result<()> {
    match method {
        Method::Maxwell => step_maxwell(state, ctx),
        Method::Berenger => step_berenger(state, ctx),
        Method::Smart => step_smart(state, ctx),
        Method::Spml => step_spml(state, ctx),
        m => Err(Error::config(
            "method",
            format!("{m} is not a single-state scheme"),
        )),
    }
}

/// `Ex ← Ex + Δt ∂_y Hz` on interior rows (`0 < j < ny`).
pub(crate) fn update_ex(ex: &mut Field2, hz: &Field2, ctx: &StepContext) {
    let ny = ctx.grid.ny;
    let cy = ctx.grid.dt / ctx.grid.dy;
    ctx.exec.for_each_row(ex.as_mut_slice(), ny + 1, |i, row| {
        let h = hz.row(i);
        for j in 1..ny {
            row[j] += cy * (h[j] - h[j - 1]);
        }
    });
}

/// Imposes wall conditions on freshly advanced electric fields.
///
/// Must run after the interior `E` update and before the `Hz` update of the
/// same step. The transparent east condition stores `Hzⁿ⁻½` of the adjacent
/// column in `Ey_{nx}`; [`close_east`] then replaces it by the time-centred
/// value once `Hzⁿ⁺½` is known. Periodic seams are advanced here from their
/// previous values.
pub fn apply_boundaries(ex: &mut Field2, ey: &mut Field2, hz: &Field2, ctx: &StepContext) {
    apply_ex_boundaries(ex, hz, ctx);
    apply_ey_boundaries(ey, hz, ctx);
}

pub(crate) fn apply_ex_boundaries(ex: &mut Field2, hz: &Field2, ctx: &StepContext) {
    let (nx, ny) = (ctx.grid.nx, ctx.grid.ny);
    match ctx.boundaries {
        Boundaries::Walls(_) => {
            for i in 0..nx {
                ex.set(i, 0, 0.0);
                ex.set(i, ny, 0.0);
            }
        }
        Boundaries::Periodic => {
            let cy = ctx.grid.dt / ctx.grid.dy;
            for i in 0..nx {
                let v = ex.get(i, 0) + cy * (hz.get(i, 0) - hz.get(i, ny - 1));
                ex.set(i, 0, v);
                ex.set(i, ny, v);
            }
        }
    }
}

pub(crate) fn apply_ey_boundaries(ey: &mut Field2, hz: &Field2, ctx: &StepContext) {
    let (nx, ny) = (ctx.grid.nx, ctx.grid.ny);
    match ctx.boundaries {
        Boundaries::Walls(east) => {
            ey.row_mut(0).fill(0.0);
            match east {
                EastBoundary::Transparent => ey.row_mut(nx).copy_from_slice(hz.row(nx - 1)),
                EastBoundary::Pec => ey.row_mut(nx).fill(0.0),
            }
        }
        Boundaries::Periodic => {
            let cx = ctx.grid.dt / ctx.grid.dx;
            for j in 0..ny {
                let v = ey.get(0, j) - cx * (hz.get(0, j) - hz.get(nx - 1, j));
                ey.set(0, j, v);
                ey.set(nx, j, v);
            }
        }
    }
}

/// Completes the transparent east condition `Ey = (Hzⁿ⁻½ + Hzⁿ⁺½)/2` after the
/// magnetic update of the last column.
///
/// The last-column update is affine in `Ey_{nx}` with slope `−kappa`; it was
/// evaluated with the provisional `Ey_{nx} = Hzⁿ⁻½`, so the centred value
/// follows from one scalar solve per row.
pub(crate) fn close_east(hz: &mut Field2, ey: &mut Field2, ctx: &StepContext, kappa: f64) {
    if ctx.boundaries != Boundaries::Walls(EastBoundary::Transparent) {
        return;
    }
    let nx = ctx.grid.nx;
    let h_new = hz.row_mut(nx - 1);
    let e = ey.row_mut(nx);
    for (hp, em) in h_new.iter_mut().zip(e.iter_mut()) {
        let h_old = *em;
        *hp = (*hp + 0.5 * kappa * h_old) / (1.0 + 0.5 * kappa);
        *em = 0.5 * (h_old + *hp);
    }
}

/// Boundary application on a whole state; see [`apply_boundaries`].
pub fn apply_state_boundaries(state: &mut FieldState, ctx: &StepContext) {
    let FieldState { ex, ey, hz, .. } = state;
    apply_boundaries(ex, ey, hz, ctx);
}

/// Discrete Yee energy `½Σ|Eⁿ|² + ½Σ Hzⁿ⁻½ Hzⁿ⁺½` (times the cell area).
///
/// Exactly conserved by the absorption-free scheme with perfectly conducting
/// walls. `hz_before` is the magnetic field entering the step that produced
/// `state`.
pub fn discrete_energy(state: &FieldState, hz_before: &Field2, grid: &YeeGrid) -> f64 {
    let sq = |f: &Field2| f.as_slice().iter().map(|v| v * v).sum::<f64>();
    let cross: f64 = hz_before
        .as_slice()
        .iter()
        .zip(state.hz.as_slice())
        .map(|(a, b)| a * b)
        .sum();
    0.5 * grid.dx * grid.dy * (sq(&state.ex) + sq(&state.ey) + cross)
}

#[cfg(test)]
mod tests;
