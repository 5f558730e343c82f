use super::{apply_boundaries, close_east, update_ex, StepContext};
use crate::error::Result;
use crate::field::{Field2, FieldState};

/// Plain Yee leapfrog step for the TE system
/// `∂tEx − ∂yHz = 0`, `∂tEy + ∂xHz = 0`, `∂tHz + ∂xEy − ∂yEx = 0`.
///
/// Auxiliary arrays, if any, are ignored.
pub fn step_maxwell(state: &mut FieldState, ctx: &StepContext) -> Result<()> {
    state.check_field_shapes(&ctx.grid)?;
    let FieldState { ex, ey, hz, .. } = state;
    update_ex(ex, hz, ctx);
    update_ey(ey, hz, ctx);
    apply_boundaries(ex, ey, hz, ctx);
    update_hz(hz, ex, ey, ctx);
    close_east(hz, ey, ctx, ctx.grid.dt / ctx.grid.dx);
    Ok(())
}

/// `Ey ← Ey − Δt ∂xHz` on interior columns `0 < i < nx`.
pub(crate) fn update_ey(ey: &mut Field2, hz: &Field2, ctx: &StepContext) {
    let nx = ctx.grid.nx;
    let cx = ctx.grid.dt / ctx.grid.dx;
    ctx.exec
        .for_each_row(ey.as_mut_slice(), ctx.grid.ny, |i, row| {
            if i == 0 || i == nx {
                return;
            }
            let (hr, hl) = (hz.row(i), hz.row(i - 1));
            for (j, e) in row.iter_mut().enumerate() {
                *e -= cx * (hr[j] - hl[j]);
            }
        });
}

/// `Hz ← Hz − Δt (∂xEy − ∂yEx)`.
pub(crate) fn update_hz(hz: &mut Field2, ex: &Field2, ey: &Field2, ctx: &StepContext) {
    let cx = ctx.grid.dt / ctx.grid.dx;
    let cy = ctx.grid.dt / ctx.grid.dy;
    ctx.exec
        .for_each_row(hz.as_mut_slice(), ctx.grid.ny, |i, row| {
            let (el, er, exr) = (ey.row(i), ey.row(i + 1), ex.row(i));
            for (j, h) in row.iter_mut().enumerate() {
                *h -= cx * (er[j] - el[j]) - cy * (exr[j + 1] - exr[j]);
            }
        });
}
