use super::{apply_boundaries, close_east, update_ex, StepContext};
use crate::error::{Error, Result};
use crate::field::{Aux, FieldState};

/// Bérenger split-field step: `Hz = Hzx + Hzy`, with absorption on `Ey` and
/// on the x-derivative part `Hzx` only.
pub fn step_berenger(state: &mut FieldState, ctx: &StepContext) -> Result<()> {
    state.check_shapes(&ctx.grid)?;
    let FieldState { ex, ey, hz, aux } = state;
    let Aux::Split { hzx, hzy } = aux else {
        return Err(Error::MissingAux("hzx/hzy"));
    };
    let g = &ctx.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (cx, cy) = (g.dt / g.dx, g.dt / g.dy);
    let half_dt = 0.5 * g.dt;

    update_ex(ex, hz, ctx);
    {
        let hz = &*hz;
        ctx.exec.for_each_row(ey.as_mut_slice(), ny, |i, row| {
            if i == 0 || i == nx {
                return;
            }
            let a = half_dt * ctx.s_int(i, 1.0);
            let (keep, inv) = (1.0 - a, 1.0 / (1.0 + a));
            let (hr, hl) = (hz.row(i), hz.row(i - 1));
            for (j, e) in row.iter_mut().enumerate() {
                *e = (keep * *e - cx * (hr[j] - hl[j])) * inv;
            }
        });
    }
    apply_boundaries(ex, ey, hz, ctx);

    {
        let (ex, ey) = (&*ex, &*ey);
        ctx.exec
            .for_each_row_pair(hzx.as_mut_slice(), hzy.as_mut_slice(), ny, |i, rx, ry| {
                let b = half_dt * ctx.s_half(i, 1.0);
                let (keep, inv) = (1.0 - b, 1.0 / (1.0 + b));
                let (el, er, exr) = (ey.row(i), ey.row(i + 1), ex.row(i));
                for j in 0..ny {
                    rx[j] = (keep * rx[j] - cx * (er[j] - el[j])) * inv;
                    ry[j] += cy * (exr[j + 1] - exr[j]);
                }
            });
    }
    for ((h, x), y) in hz
        .as_mut_slice()
        .iter_mut()
        .zip(hzx.as_slice())
        .zip(hzy.as_slice())
    {
        *h = x + y;
    }
    let b = half_dt * ctx.s_half(nx - 1, 1.0);
    close_east(hz, ey, ctx, cx / (1.0 + b));
    // only Hzx depends on Ey, so it absorbs the correction
    let (last_hz, last_hzy) = (hz.row(nx - 1), hzy.row(nx - 1));
    for (j, x) in hzx.row_mut(nx - 1).iter_mut().enumerate() {
        *x = last_hz[j] - last_hzy[j];
    }
    Ok(())
}
