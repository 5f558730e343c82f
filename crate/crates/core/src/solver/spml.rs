use super::{apply_boundaries, close_east, StepContext};
use crate::error::{Error, Result};
use crate::field::{Aux, FieldState};
use crate::solver::Boundaries;

/// Unsplit SPML step for a single layer in x (`σ₁ = σ`, `σ₂ = σ₃ = 0`):
///
/// ```text
/// ∂tEx − ∂yHz − σEx + σ²W = 0      ∂tW + σW − Ex = 0
/// ∂tEy + ∂xHz + σEy = 0            ∂tHz + ∂xEy − ∂yEx + σHz = 0
/// ```
///
/// `W` lives with `Ex`; the `(Ex, W)` pair is advanced by the trapezoidal
/// rule, whose 2×2 system has unit determinant.
pub fn step_spml(state: &mut FieldState, ctx: &StepContext) -> Result<()> {
    state.check_shapes(&ctx.grid)?;
    let FieldState { ex, ey, hz, aux } = state;
    let Aux::Spml { w } = aux else {
        return Err(Error::MissingAux("w"));
    };
    let g = &ctx.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (cx, cy) = (g.dt / g.dx, g.dt / g.dy);
    let h = 0.5 * g.dt;
    let walls = matches!(ctx.boundaries, Boundaries::Walls(_));

    {
        let hz = &*hz;
        ctx.exec
            .for_each_row_pair(ex.as_mut_slice(), w.as_mut_slice(), ny + 1, |i, re, rw| {
                let s = ctx.s_half(i, 1.0);
                let (hs, hs2) = (h * s, h * s * s);
                let hr = hz.row(i);
                for j in 0..=ny {
                    let (x, y) = (re[j], rw[j]);
                    let on_wall = j == 0 || j == ny;
                    if on_wall && walls {
                        // Ex is pinned to zero; W relaxes with the remaining terms.
                        re[j] = 0.0;
                        rw[j] = (y * (1.0 - hs) + h * x) / (1.0 + hs);
                        continue;
                    }
                    if on_wall {
                        // periodic seam, advanced in apply_boundaries
                        continue;
                    }
                    let r1 = x * (1.0 + hs) - hs2 * y + cy * (hr[j] - hr[j - 1]);
                    let r2 = y * (1.0 - hs) + h * x;
                    re[j] = (1.0 + hs) * r1 - hs2 * r2;
                    rw[j] = h * r1 + (1.0 - hs) * r2;
                }
            });
        ctx.exec.for_each_row(ey.as_mut_slice(), ny, |i, row| {
            if i == 0 || i == nx {
                return;
            }
            let a = h * ctx.s_int(i, 1.0);
            let (keep, inv) = (1.0 - a, 1.0 / (1.0 + a));
            let (hr, hl) = (hz.row(i), hz.row(i - 1));
            for (j, e) in row.iter_mut().enumerate() {
                *e = (keep * *e - cx * (hr[j] - hl[j])) * inv;
            }
        });
    }
    let seam_before: Vec<f64> = if walls {
        Vec::new()
    } else {
        (0..nx).map(|i| ex.get(i, 0)).collect()
    };
    apply_boundaries(ex, ey, hz, ctx);
    for (i, old) in seam_before.into_iter().enumerate() {
        // Seam rows of W follow the absorption-free relation ∂tW = Ex.
        let v = w.get(i, 0) + h * (old + ex.get(i, 0));
        w.set(i, 0, v);
        w.set(i, ny, v);
    }

    {
        let (ex, ey) = (&*ex, &*ey);
        ctx.exec.for_each_row(hz.as_mut_slice(), ny, |i, row| {
            let b = h * ctx.s_half(i, 1.0);
            let (keep, inv) = (1.0 - b, 1.0 / (1.0 + b));
            let (el, er, exr) = (ey.row(i), ey.row(i + 1), ex.row(i));
            for (j, v) in row.iter_mut().enumerate() {
                let curl = cx * (er[j] - el[j]) - cy * (exr[j + 1] - exr[j]);
                *v = (keep * *v - curl) * inv;
            }
        });
    }
    let b = h * ctx.s_half(nx - 1, 1.0);
    close_east(hz, ey, ctx, cx / (1.0 + b));
    Ok(())
}
