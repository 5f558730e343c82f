//! Harmoniously matched layers: the extrapolation `2·U(σ) − U(2σ)` of two
//! smart-layer solutions, which cancels the reflection that is linear in the
//! absorption strength.
//!
//! Three realizations are provided. Version 1 runs the two smart layers
//! independently and combines their outputs. Versions 2 and 3 combine after
//! every step and restart both branches from the combined state; version 3
//! additionally combines `Ey` before the magnetic update.

use crate::config::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{Field2, FieldState};
use crate::reference::{record_history, History};
use crate::solver::{
    apply_ex_boundaries, apply_ey_boundaries, close_east, east_slope, smart_ey, smart_hz,
    step_smart, update_ex, StepContext,
};

/// Two smart-layer branches and their extrapolation.
#[derive(Clone, Debug, PartialEq)]
pub struct HmlPair {
    /// Evolved with absorption `μσ`.
    pub branch_1: FieldState,
    /// Evolved with absorption `2μσ`.
    pub branch_2: FieldState,
    /// `2·branch_1 − branch_2`.
    pub combined: FieldState,
}

impl HmlPair {
    /// All three members start from the same plain state.
    pub fn new(state: FieldState) -> Self {
        let state = state.plain();
        HmlPair {
            branch_1: state.clone(),
            branch_2: state.clone(),
            combined: state,
        }
    }

    /// Recomputes `combined` from the branches.
    pub fn recombine(&mut self) {
        let (a, b) = (&self.branch_1, &self.branch_2);
        let c = &mut self.combined;
        c.ex.extrapolate_from(&a.ex, &b.ex);
        c.ey.extrapolate_from(&a.ey, &b.ey);
        c.hz.extrapolate_from(&a.hz, &b.hz);
    }

    /// Restarts both branches from `combined`.
    fn reseed(&mut self) {
        let c = &self.combined;
        for b in [&mut self.branch_1, &mut self.branch_2] {
            b.ex.clone_from(&c.ex);
            b.ey.clone_from(&c.ey);
            b.hz.clone_from(&c.hz);
        }
    }
}

/// Context whose absorption is doubled.
fn doubled(ctx: &StepContext) -> StepContext {
    ctx.clone().with_mu(2.0 * ctx.mu)
}

/// Global extrapolation: both branches advance independently by one smart
/// step, then `combined` is refreshed. Branches never see the combination.
pub fn step_hml_v1(pair: &mut HmlPair, ctx: &StepContext) -> Result<()> {
    let ctx2 = doubled(ctx);
    let (a, b) = (&mut pair.branch_1, &mut pair.branch_2);
    let (r1, r2) = ctx
        .exec
        .join(|| step_smart(a, ctx), || step_smart(b, &ctx2));
    r1?;
    r2?;
    pair.recombine();
    Ok(())
}

/// Runs global extrapolation for `n_steps`, calling `observe` with the
/// combined magnetic field before the first step and after each step.
///
/// Only the current time level of each branch is stored.
pub fn run_global(
    state: FieldState,
    ctx: &StepContext,
    n_steps: usize,
    mut observe: impl FnMut(usize, &FieldState) -> Result<()>,
) -> Result<FieldState> {
    let mut pair = HmlPair::new(state);
    observe(0, &pair.combined)?;
    for n in 1..=n_steps {
        step_hml_v1(&mut pair, ctx)?;
        observe(n, &pair.combined)?;
    }
    Ok(pair.combined)
}

/// Interest-region history of a global extrapolation run.
pub fn run_hml_v1(cfg: &SimConfig, exec: Exec) -> Result<History> {
    if cfg.method != Method::HmlV1 {
        return Err(Error::config(
            "method",
            format!("expected hml_v1, got {}", cfg.method),
        ));
    }
    record_history(cfg, exec)
}

/// Shared first half of the local variants: reseed, one `Ex` update on the
/// combined fields, then the two branch `Ey` updates with their walls.
fn advance_electric(pair: &mut HmlPair, ctx: &StepContext) -> Result<()> {
    pair.combined.check_shapes(&ctx.grid)?;
    {
        let c = &mut pair.combined;
        update_ex(&mut c.ex, &c.hz, ctx);
        apply_ex_boundaries(&mut c.ex, &c.hz, ctx);
    }
    pair.reseed();
    let hz = &pair.combined.hz;
    let (e1, e2) = (&mut pair.branch_1.ey, &mut pair.branch_2.ey);
    ctx.exec.join(
        || {
            smart_ey(e1, hz, ctx, 1.0);
            apply_ey_boundaries(e1, hz, ctx);
        },
        || {
            smart_ey(e2, hz, ctx, 2.0);
            apply_ey_boundaries(e2, hz, ctx);
        },
    );
    Ok(())
}

fn advance_magnetic(hz: &mut Field2, ex: &Field2, ey: &mut Field2, ctx: &StepContext, f: f64) {
    smart_hz(hz, ex, ey, ctx, f);
    close_east(hz, ey, ctx, east_slope(ctx, f));
}

/// Local extrapolation: each branch computes `Hz` from its own `Ey`, and the
/// combination happens at the end of the step.
pub fn step_hml_v2(pair: &mut HmlPair, ctx: &StepContext) -> Result<()> {
    advance_electric(pair, ctx)?;
    let ex = &pair.combined.ex;
    let (b1, b2) = (&mut pair.branch_1, &mut pair.branch_2);
    ctx.exec.join(
        || advance_magnetic(&mut b1.hz, ex, &mut b1.ey, ctx, 1.0),
        || advance_magnetic(&mut b2.hz, ex, &mut b2.ey, ctx, 2.0),
    );
    pair.combined.ey.extrapolate_from(&b1.ey, &b2.ey);
    pair.combined.hz.extrapolate_from(&b1.hz, &b2.hz);
    Ok(())
}

/// Split-field local extrapolation: `Ey` is combined before both `Hz`
/// branches are computed from it.
pub fn step_hml_v3(pair: &mut HmlPair, ctx: &StepContext) -> Result<()> {
    advance_electric(pair, ctx)?;
    {
        let (b1, b2) = (&pair.branch_1, &pair.branch_2);
        pair.combined.ey.extrapolate_from(&b1.ey, &b2.ey);
    }
    pair.branch_1.ey.clone_from(&pair.combined.ey);
    pair.branch_2.ey.clone_from(&pair.combined.ey);
    let ex = &pair.combined.ex;
    let (b1, b2) = (&mut pair.branch_1, &mut pair.branch_2);
    ctx.exec.join(
        || advance_magnetic(&mut b1.hz, ex, &mut b1.ey, ctx, 1.0),
        || advance_magnetic(&mut b2.hz, ex, &mut b2.ey, ctx, 2.0),
    );
    // the east closure touched only the last Ey column of each branch
    pair.combined.ey.extrapolate_from(&b1.ey, &b2.ey);
    pair.combined.hz.extrapolate_from(&b1.hz, &b2.hz);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EastBoundary;
    use crate::grid::YeeGrid;
    use crate::profile::AbsorptionProfile;
    use crate::solver::{step_maxwell, Boundaries};

    fn grid() -> YeeGrid {
        YeeGrid::new(0.0, 3.0, 0.0, 2.0, 30, 20, 0.07, 60).unwrap()
    }

    fn bump(g: &YeeGrid) -> FieldState {
        FieldState::with_hz(g, |x, y| {
            let r2 = (x - 1.6).powi(2) + (y - 1.0).powi(2);
            (-r2 / 0.08).exp() * (12.0 * x).cos()
        })
    }

    fn layered(g: &YeeGrid) -> StepContext {
        StepContext::new(g, &AbsorptionProfile::constant(2.0, 2.0, 3.0), 0.0, 1.0)
    }

    type Stepper = fn(&mut HmlPair, &StepContext) -> Result<()>;
    const VARIANTS: [Stepper; 3] = [step_hml_v1, step_hml_v2, step_hml_v3];

    #[test]
    fn without_absorption_every_variant_is_maxwell() {
        let g = grid();
        let ctx = StepContext::free(&g);
        for step in VARIANTS {
            let mut reference = bump(&g);
            let mut pair = HmlPair::new(bump(&g));
            for _ in 0..50 {
                step_maxwell(&mut reference, &ctx).unwrap();
                step(&mut pair, &ctx).unwrap();
            }
            assert!(pair.combined.max_abs_diff(&reference) <= 1e-13);
            assert!(pair.branch_1.max_abs_diff(&pair.branch_2) <= 1e-13);
        }
    }

    #[test]
    fn combined_is_the_extrapolation_of_the_branches() {
        let g = grid();
        let ctx = layered(&g);
        for step in VARIANTS {
            let mut pair = HmlPair::new(bump(&g));
            for _ in 0..40 {
                step(&mut pair, &ctx).unwrap();
            }
            let mut expect = pair.branch_1.clone();
            expect.axpby(2.0, -1.0, &pair.branch_2);
            assert!(pair.combined.max_abs_diff(&expect) <= 1e-14);
        }
    }

    #[test]
    fn global_extrapolation_matches_two_smart_runs() {
        let g = grid();
        let ctx = layered(&g);
        let mut s1 = bump(&g);
        let mut s2 = bump(&g);
        let ctx2 = ctx.clone().with_mu(2.0);
        for _ in 0..40 {
            step_smart(&mut s1, &ctx).unwrap();
            step_smart(&mut s2, &ctx2).unwrap();
        }
        let mut expect = s1;
        expect.axpby(2.0, -1.0, &s2);
        let out = run_global(bump(&g), &ctx, 40, |_, _| Ok(())).unwrap();
        assert!(out.max_abs_diff(&expect) <= 1e-14);
    }

    #[test]
    fn variants_differ_once_the_layer_is_reached() {
        let g = grid();
        let ctx = layered(&g);
        let mut pairs: Vec<HmlPair> = (0..3).map(|_| HmlPair::new(bump(&g))).collect();
        for _ in 0..40 {
            for (p, step) in pairs.iter_mut().zip(VARIANTS) {
                step(p, &ctx).unwrap();
            }
        }
        assert!(pairs[0].combined.max_abs_diff(&pairs[1].combined) > 1e-8);
        assert!(pairs[1].combined.max_abs_diff(&pairs[2].combined) > 1e-8);
    }

    #[test]
    fn pec_east_wall_is_honoured() {
        let g = grid();
        let ctx = layered(&g).with_boundaries(Boundaries::Walls(EastBoundary::Pec));
        for step in VARIANTS {
            let mut pair = HmlPair::new(bump(&g));
            for _ in 0..30 {
                step(&mut pair, &ctx).unwrap();
            }
            assert!(pair.combined.ey.row(g.nx).iter().all(|&v| v == 0.0));
        }
    }
}
