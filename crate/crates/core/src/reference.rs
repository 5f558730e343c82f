//! Reflection-free reference solutions and layer-reflection errors.
//!
//! The reference is plain Maxwell on a domain grown far enough that nothing
//! reflected from its added walls can reach the interest region before the
//! final time. It is grown either on every side, or only past the east edge
//! so that it keeps the test domain's other walls. Its magnetic field is recorded on the interest region at
//! every time level; test runs are then compared against that history,
//! either after the fact ([`linf_error`]) or while they run ([`ErrorTracker`]).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{EastBoundary, Method, Region, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{Field2, FieldState};
use crate::grid::{Node, YeeGrid};
use crate::init::InitialCondition;
use crate::profile::AbsorptionProfile;
use crate::run::{simulate, simulate_on, RunStats};
use crate::solver::{initial_state, Boundaries, StepContext};

/// Space-time sampling lattice of `Hz` over a rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    /// Coordinates of the first sampled node.
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub ni: usize,
    pub nj: usize,
    pub frames: usize,
}

impl Lattice {
    pub fn check_same(&self, other: &Lattice) -> Result<()> {
        let tol = 1e-9 * self.dx.min(self.dy);
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        if (self.ni, self.nj, self.frames) != (other.ni, other.nj, other.frames) {
            return Err(Error::LatticeMismatch(format!(
                "{}x{} nodes x {} levels vs {}x{} nodes x {} levels",
                self.ni, self.nj, self.frames, other.ni, other.nj, other.frames
            )));
        }
        if !(close(self.x0, other.x0)
            && close(self.y0, other.y0)
            && close(self.dx, other.dx)
            && close(self.dy, other.dy)
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt)
        {
            return Err(Error::LatticeMismatch(format!(
                "origin/spacing ({}, {}, {}, {}, {}) vs ({}, {}, {}, {}, {})",
                self.x0,
                self.y0,
                self.dx,
                self.dy,
                self.dt,
                other.x0,
                other.y0,
                other.dx,
                other.dy,
                other.dt
            )));
        }
        Ok(())
    }
}

/// The block of `Hz` nodes of one grid whose centres lie inside a region.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub i0: usize,
    pub j0: usize,
    pub ni: usize,
    pub nj: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    dt: f64,
}

impl Window {
    pub fn new(grid: &YeeGrid, region: &Region) -> Result<Self> {
        let xs: Vec<usize> = (0..grid.nx)
            .filter(|&i| {
                let x = grid.x_half(i);
                x > region.x_min && x < region.x_max
            })
            .collect();
        let ys: Vec<usize> = (0..grid.ny)
            .filter(|&j| {
                let y = grid.coord(Node::Hz, 0, j).1;
                y > region.y_min && y < region.y_max
            })
            .collect();
        let (Some(&i0), Some(&j0)) = (xs.first(), ys.first()) else {
            return Err(Error::config("interest", "region contains no Hz nodes"));
        };
        let (x0, y0) = grid.coord(Node::Hz, i0, j0);
        Ok(Window {
            i0,
            j0,
            ni: xs.len(),
            nj: ys.len(),
            x0,
            y0,
            dx: grid.dx,
            dy: grid.dy,
            dt: grid.dt,
        })
    }

    pub fn lattice(&self, frames: usize) -> Lattice {
        Lattice {
            x0: self.x0,
            y0: self.y0,
            dx: self.dx,
            dy: self.dy,
            dt: self.dt,
            ni: self.ni,
            nj: self.nj,
            frames,
        }
    }

    /// Rows of `hz` restricted to the window.
    fn rows<'a>(&'a self, hz: &'a Field2) -> impl Iterator<Item = &'a [f64]> + 'a {
        (self.i0..self.i0 + self.ni).map(move |i| &hz.row(i)[self.j0..self.j0 + self.nj])
    }

    pub fn extract(&self, hz: &Field2) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ni * self.nj);
        for r in self.rows(hz) {
            out.extend_from_slice(r);
        }
        out
    }

    /// `max |hz − frame|` over the window.
    pub fn max_diff(&self, hz: &Field2, frame: &[f64]) -> f64 {
        self.rows(hz)
            .zip(frame.chunks(self.nj))
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `Hz` on a lattice, one frame per time level.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    lattice: Lattice,
    frames: Vec<Vec<f64>>,
}

impl History {
    /// Builds a history from explicit frames of `ni·nj` values each.
    pub fn from_frames(mut lattice: Lattice, frames: Vec<Vec<f64>>) -> Result<Self> {
        let size = lattice.ni * lattice.nj;
        if let Some(bad) = frames.iter().position(|f| f.len() != size) {
            return Err(Error::LatticeMismatch(format!(
                "frame {bad} has {} values, lattice needs {size}",
                frames[bad].len()
            )));
        }
        lattice.frames = frames.len();
        Ok(History { lattice, frames })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn frame(&self, n: usize) -> Option<&[f64]> {
        self.frames.get(n).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Largest absolute value over all frames.
    pub fn max_abs(&self) -> f64 {
        self.frames
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Max over all levels and nodes of `|test − reference|`.
pub fn linf_error(test: &History, reference: &History) -> Result<f64> {
    test.lattice.check_same(&reference.lattice)?;
    Ok(test
        .frames
        .iter()
        .zip(&reference.frames)
        .flat_map(|(a, b)| a.iter().zip(b))
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Records the interest-region history of any configured run.
pub fn record_history(cfg: &SimConfig, exec: Exec) -> Result<History> {
    let grid = cfg.grid();
    let window = Window::new(&grid, &cfg.interest)?;
    let mut frames = Vec::with_capacity(grid.n_steps + 1);
    simulate(cfg, exec, |_, s| {
        frames.push(window.extract(&s.hz));
        Ok(())
    })?;
    History::from_frames(window.lattice(frames.len()), frames)
}

/// Which walls of the test domain the reference keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceWalls {
    /// Grown on all four sides: free space everywhere.
    #[default]
    AllSides,
    /// Grown eastward only. West, south and north walls coincide with the
    /// test domain's, so the error contains nothing but the layer's effect.
    Shared,
}

impl ReferenceWalls {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceWalls::AllSides => "all_sides",
            ReferenceWalls::Shared => "shared",
        }
    }
}

/// Knobs of the reference computation.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceOptions {
    /// Multiplies the minimal margin `t_final + 2r`.
    pub margin_scale: f64,
    pub walls: ReferenceWalls,
    /// Upper bound on bytes for the enlarged state plus the stored history.
    pub memory_budget: usize,
    pub exec: Exec,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions {
            margin_scale: 1.0,
            walls: ReferenceWalls::AllSides,
            memory_budget: 4 << 30,
            exec: Exec::default(),
        }
    }
}

/// Key identifying configurations that share a reference: everything except
/// the method and the layer.
pub fn reference_key(cfg: &SimConfig) -> String {
    let mut c = cfg.clone();
    c.method = Method::Maxwell;
    c.layer = AbsorptionProfile::zero(c.layer.start, c.layer.end);
    c.nu = 0.0;
    c.mu = 1.0;
    c.east = EastBoundary::Pec;
    c.to_toml()
}

/// Cells added on each side: `ceil(scale·(t_final + 2r)/Δ)`.
pub fn margin_cells(cfg: &SimConfig, scale: f64) -> (usize, usize) {
    let g = cfg.grid();
    let reach = scale * (cfg.t_final + 2.0 * cfg.init.support_radius());
    (
        (reach / g.dx - 1e-9).ceil() as usize,
        (reach / g.dy - 1e-9).ceil() as usize,
    )
}

/// Plain Maxwell on the enlarged domain, recorded on the interest region.
pub fn reference_run(cfg: &SimConfig) -> Result<History> {
    reference_run_with(cfg, &ReferenceOptions::default())
}

pub fn reference_run_with(cfg: &SimConfig, opts: &ReferenceOptions) -> Result<History> {
    cfg.validate()?;
    if !(opts.margin_scale >= 1.0) {
        return Err(Error::config(
            "margin_scale",
            format!("margin must not shrink below the minimum, got {}", opts.margin_scale),
        ));
    }
    let (mx, my) = margin_cells(cfg, opts.margin_scale);
    let big = match opts.walls {
        ReferenceWalls::AllSides => cfg.grid().enlarged(mx, my),
        ReferenceWalls::Shared => cfg.grid().extended_east(mx),
    };
    let window = Window::new(&big, &cfg.interest)?;
    let frames = big.n_steps + 1;
    let state_bytes = 8 * 3 * (big.nx + 1) * (big.ny + 1);
    let history_bytes = 8 * frames * window.ni * window.nj;
    let need = state_bytes + history_bytes;
    if need > opts.memory_budget {
        return Err(Error::config(
            "reference",
            format!(
                "enlarged {}x{} grid with {} stored levels needs {} MiB, budget is {} MiB",
                big.nx,
                big.ny,
                frames,
                need >> 20,
                opts.memory_budget >> 20
            ),
        ));
    }
    let plain = cfg.with_method(Method::Maxwell);
    let ctx = StepContext::free(&big)
        .with_boundaries(Boundaries::Walls(EastBoundary::Pec))
        .with_exec(opts.exec);
    let mut out = Vec::with_capacity(frames);
    simulate_on(
        Method::Maxwell,
        initial_state(&plain, &big),
        &big,
        &ctx,
        |_, s| {
            out.push(window.extract(&s.hz));
            Ok(())
        },
    )?;
    History::from_frames(window.lattice(out.len()), out)
}

/// Both error readings of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    /// Max over all time levels.
    pub max_in_time: f64,
    /// At the last level only.
    pub final_time: f64,
}

/// Streams a run against a stored reference without keeping its history.
#[derive(Debug)]
pub struct ErrorTracker<'a> {
    reference: &'a History,
    window: Window,
    max: f64,
    last: f64,
    seen: usize,
    snapshot_at: Option<usize>,
    snapshot: Option<Field2>,
}

impl<'a> ErrorTracker<'a> {
    pub fn new(grid: &YeeGrid, region: &Region, reference: &'a History) -> Result<Self> {
        let window = Window::new(grid, region)?;
        window
            .lattice(grid.n_steps + 1)
            .check_same(reference.lattice())?;
        Ok(ErrorTracker {
            reference,
            window,
            max: 0.0,
            last: 0.0,
            seen: 0,
            snapshot_at: None,
            snapshot: None,
        })
    }

    /// Keeps `|Hz − Hz_ref|` at level `n` for later inspection.
    pub fn with_snapshot(mut self, n: usize) -> Self {
        self.snapshot_at = Some(n);
        self
    }

    pub fn observe(&mut self, n: usize, state: &FieldState) -> Result<()> {
        let frame = self.reference.frame(n).ok_or_else(|| {
            Error::LatticeMismatch(format!("reference has no level {n}"))
        })?;
        if n != self.seen {
            return Err(Error::LatticeMismatch(format!(
                "levels out of order: got {n}, expected {}",
                self.seen
            )));
        }
        let d = self.window.max_diff(&state.hz, frame);
        self.max = self.max.max(d);
        self.last = d;
        self.seen += 1;
        if self.snapshot_at == Some(n) {
            let w = &self.window;
            self.snapshot = Some(Field2::from_fn(w.ni, w.nj, |i, j| {
                (state.hz.get(w.i0 + i, w.j0 + j) - frame[i * w.nj + j]).abs()
            }));
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(ErrorSummary, Option<Field2>)> {
        if self.seen != self.reference.len() {
            return Err(Error::LatticeMismatch(format!(
                "run produced {} levels, reference has {}",
                self.seen,
                self.reference.len()
            )));
        }
        Ok((
            ErrorSummary {
                max_in_time: self.max,
                final_time: self.last,
            },
            self.snapshot,
        ))
    }
}

/// One measured cell of an error table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub method: Method,
    pub refinement: u32,
    /// Degrees; absent for data without a propagation direction.
    pub incidence: Option<f64>,
    /// Modulation wavenumber `k`; absent for unmodulated data.
    pub frequency: Option<f64>,
    pub linf_error: f64,
    /// Seconds.
    pub runtime: f64,
    pub metadata: BTreeMap<String, String>,
}

/// Incidence angle of the initial packet in degrees.
pub fn incidence_of(init: &InitialCondition) -> Option<f64> {
    match init {
        InitialCondition::ModulatedBump { direction, .. } => {
            Some(direction[1].atan2(direction[0]).to_degrees())
        }
        _ => None,
    }
}

pub fn frequency_of(init: &InitialCondition) -> Option<f64> {
    match init {
        InitialCondition::ModulatedBump { k, .. } => Some(*k),
        _ => None,
    }
}

/// A measured run: the report plus the numbers that do not fit its columns.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub report: ErrorReport,
    pub errors: ErrorSummary,
    pub stats: RunStats,
    pub snapshot: Option<Field2>,
}

/// Runs `cfg` and compares it with `reference` while it runs.
pub fn measure(
    cfg: &SimConfig,
    reference: &History,
    exec: Exec,
    snapshot_at: Option<usize>,
) -> Result<Measurement> {
    let grid = cfg.grid();
    let mut tracker = ErrorTracker::new(&grid, &cfg.interest, reference)?;
    if let Some(n) = snapshot_at {
        tracker = tracker.with_snapshot(n);
    }
    let stats = simulate(cfg, exec, |n, s| tracker.observe(n, s))?;
    let (errors, snapshot) = tracker.finish()?;
    let mut metadata = BTreeMap::new();
    metadata.insert("final_time_error".into(), format!("{:.5e}", errors.final_time));
    metadata.insert("growth".into(), format!("{:.5e}", stats.growth));
    metadata.insert("steps".into(), stats.steps.to_string());
    metadata.insert("mu".into(), cfg.mu.to_string());
    metadata.insert("nu".into(), cfg.nu.to_string());
    if let Some(seed) = cfg.init.seed() {
        metadata.insert("seed".into(), seed.to_string());
    }
    Ok(Measurement {
        report: ErrorReport {
            method: cfg.method,
            refinement: cfg.refinement,
            incidence: incidence_of(&cfg.init),
            frequency: frequency_of(&cfg.init),
            linf_error: errors.max_in_time,
            runtime: stats.runtime,
            metadata,
        },
        errors,
        stats,
        snapshot,
    })
}
