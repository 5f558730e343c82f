//! Time loop shared by every method, single-state and extrapolated alike.

use std::time::Instant;

use crate::config::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::FieldState;
use crate::grid::YeeGrid;
use crate::hml::{step_hml_v1, step_hml_v2, step_hml_v3, HmlPair};
use crate::solver::{initial_state, step, StepContext};

/// Summary of one completed simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    /// Largest sup-norm over all observed levels divided by the initial one.
    pub growth: f64,
    /// Wall-clock seconds spent in the loop, observer included.
    pub runtime: f64,
}

/// A method's evolving state, whatever its internal layout.
#[derive(Clone, Debug)]
pub enum Stepper {
    Single(Method, FieldState),
    Hml(Method, Box<HmlPair>),
}

impl Stepper {
    pub fn new(method: Method, state: FieldState) -> Self {
        if method.is_hml() {
            Stepper::Hml(method, Box::new(HmlPair::new(state)))
        } else {
            Stepper::Single(method, state)
        }
    }

    pub fn advance(&mut self, ctx: &StepContext) -> Result<()> {
        match self {
            Stepper::Single(m, s) => step(*m, s, ctx),
            Stepper::Hml(Method::HmlV1, p) => step_hml_v1(p, ctx),
            Stepper::Hml(Method::HmlV2, p) => step_hml_v2(p, ctx),
            Stepper::Hml(_, p) => step_hml_v3(p, ctx),
        }
    }

    /// The physical fields: the state itself, or the extrapolated one.
    pub fn state(&self) -> &FieldState {
        match self {
            Stepper::Single(_, s) => s,
            Stepper::Hml(_, p) => &p.combined,
        }
    }
}

/// Runs `cfg` on its effective grid. `observe` sees the state before the
/// first step and after each of the `n_steps` steps.
pub fn simulate(
    cfg: &SimConfig,
    exec: Exec,
    observe: impl FnMut(usize, &FieldState) -> Result<()>,
) -> Result<RunStats> {
    cfg.validate()?;
    let grid = cfg.grid();
    let ctx = StepContext::from_config(cfg).with_exec(exec);
    simulate_on(cfg.method, initial_state(cfg, &grid), &grid, &ctx, observe)
}

/// Lower-level loop for callers that build their own grid and context.
pub fn simulate_on(
    method: Method,
    state: FieldState,
    grid: &YeeGrid,
    ctx: &StepContext,
    mut observe: impl FnMut(usize, &FieldState) -> Result<()>,
) -> Result<RunStats> {
    let start = Instant::now();
    let mut stepper = Stepper::new(method, state);
    let initial = stepper.state().max_abs();
    let mut peak = initial;
    observe(0, stepper.state())?;
    for n in 1..=grid.n_steps {
        stepper.advance(ctx)?;
        let s = stepper.state();
        if !s.all_finite() {
            return Err(Error::NonFinite { step: n });
        }
        peak = peak.max(s.max_abs());
        observe(n, s)?;
    }
    Ok(RunStats {
        steps: grid.n_steps,
        growth: if initial > 0.0 { peak / initial } else { 1.0 },
        runtime: start.elapsed().as_secs_f64(),
    })
}

/// Final state of `cfg` without observation.
pub fn final_state(cfg: &SimConfig, exec: Exec) -> Result<FieldState> {
    cfg.validate()?;
    let grid = cfg.grid();
    let ctx = StepContext::from_config(cfg).with_exec(exec);
    let mut stepper = Stepper::new(cfg.method, initial_state(cfg, &grid));
    for n in 1..=grid.n_steps {
        stepper.advance(&ctx)?;
        if !stepper.state().all_finite() {
            return Err(Error::NonFinite { step: n });
        }
    }
    Ok(match stepper {
        Stepper::Single(_, s) => s,
        Stepper::Hml(_, p) => p.combined,
    })
}
