use super::{apply_boundaries, close_east, update_ex, StepContext};
use crate::error::Result;
use crate::field::{Field2, FieldState};

/// Smart-layer step: absorption `σ(π₊(A₁) + νπ₋(A₁))`, which in TE variables
/// damps `Ey` and `Hz` with weight `(1+ν)σ/2` and couples them with weight
/// `(1−ν)σ/2`.
pub fn step_smart(state: &mut FieldState, ctx: &StepContext) -> Result<()> {
    state.check_field_shapes(&ctx.grid)?;
    let FieldState { ex, ey, hz, .. } = state;
    update_ex(ex, hz, ctx);
    smart_ey(ey, hz, ctx, 1.0);
    apply_boundaries(ex, ey, hz, ctx);
    smart_hz(hz, ex, ey, ctx, 1.0);
    close_east(hz, ey, ctx, east_slope(ctx, 1.0));
    Ok(())
}

/// Sensitivity of the last-column `Hz` update to `Ey_{nx}`.
pub(crate) fn east_slope(ctx: &StepContext, factor: f64) -> f64 {
    let g = &ctx.grid;
    let nx = g.nx;
    let b = 0.25 * g.dt * (1.0 + ctx.nu) * ctx.s_half(nx - 1, factor);
    let w = 0.25 * g.dt * (1.0 - ctx.nu) * ctx.s_int(nx, factor);
    (g.dt / g.dx + w) / (1.0 + b)
}

/// Interior `Ey` update of the smart scheme with absorption `factor·μσ`.
///
/// The coupling term averages the σ-weighted neighbours,
/// `(σ_{i+½}Hz_{i+½} + σ_{i−½}Hz_{i−½})/2`.
pub fn smart_ey(ey: &mut Field2, hz: &Field2, ctx: &StepContext, factor: f64) {
    let g = &ctx.grid;
    let (nx, dt) = (g.nx, g.dt);
    let cx = dt / g.dx;
    let (plus, minus) = ((1.0 + ctx.nu) / 2.0, (1.0 - ctx.nu) / 2.0);
    ctx.exec.for_each_row(ey.as_mut_slice(), g.ny, |i, row| {
        if i == 0 || i == nx {
            return;
        }
        let a = 0.5 * dt * plus * ctx.s_int(i, factor);
        let (keep, inv) = (1.0 - a, 1.0 / (1.0 + a));
        let wr = 0.5 * dt * minus * ctx.s_half(i, factor);
        let wl = 0.5 * dt * minus * ctx.s_half(i - 1, factor);
        let (hr, hl) = (hz.row(i), hz.row(i - 1));
        for (j, e) in row.iter_mut().enumerate() {
            *e = (keep * *e - cx * (hr[j] - hl[j]) - (wr * hr[j] + wl * hl[j])) * inv;
        }
    });
}

/// `Hz` update of the smart scheme with absorption `factor·μσ`; the coupling
/// term is `(σ_{i+1}Ey_{i+1} + σ_iEy_i)/2`.
pub fn smart_hz(hz: &mut Field2, ex: &Field2, ey: &Field2, ctx: &StepContext, factor: f64) {
    let g = &ctx.grid;
    let dt = g.dt;
    let (cx, cy) = (dt / g.dx, dt / g.dy);
    let (plus, minus) = ((1.0 + ctx.nu) / 2.0, (1.0 - ctx.nu) / 2.0);
    ctx.exec.for_each_row(hz.as_mut_slice(), g.ny, |i, row| {
        let b = 0.5 * dt * plus * ctx.s_half(i, factor);
        let (keep, inv) = (1.0 - b, 1.0 / (1.0 + b));
        let wr = 0.5 * dt * minus * ctx.s_int(i + 1, factor);
        let wl = 0.5 * dt * minus * ctx.s_int(i, factor);
        let (el, er, exr) = (ey.row(i), ey.row(i + 1), ex.row(i));
        for (j, h) in row.iter_mut().enumerate() {
            let curl = cx * (er[j] - el[j]) - cy * (exr[j + 1] - exr[j]);
            *h = (keep * *h - curl - (wr * er[j] + wl * el[j])) * inv;
        }
    });
}
