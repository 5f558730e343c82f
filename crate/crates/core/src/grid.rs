//! Staggered Yee grid geometry.
//!
//! Node families, with `i` the x index and `j` the y index:
//!
//! | field | position            | shape          |
//! |-------|---------------------|----------------|
//! | `ex`  | `(i + 1/2, j)`      | `nx × (ny+1)`  |
//! | `ey`  | `(i, j + 1/2)`      | `(nx+1) × ny`  |
//! | `hz`  | `(i + 1/2, j + 1/2)`| `nx × ny`      |
//!
//! Electric fields live at integer time levels, `hz` at half levels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which staggered family a node index belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Ex,
    Ey,
    Hz,
}

impl Node {
    /// Offsets of the node family, in cells, from the integer lattice.
    fn offsets(self) -> (f64, f64) {
        match self {
            Node::Ex => (0.5, 0.0),
            Node::Ey => (0.0, 0.5),
            Node::Hz => (0.5, 0.5),
        }
    }
}

/// Plain description of a grid as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct YeeGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl YeeGrid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
        dt: f64,
        n_steps: usize,
    ) -> Result<Self> {
        if nx < 2 {
            return Err(Error::config("grid.nx", format!("need nx >= 2, got {nx}")));
        }
        if ny < 2 {
            return Err(Error::config("grid.ny", format!("need ny >= 2, got {ny}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::config(
                "grid.x_max",
                format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        if !(y_max > y_min) || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::config(
                "grid.y_max",
                format!("need finite y_min < y_max, got [{y_min}, {y_max}]"),
            ));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::config("grid.dt", format!("need dt > 0, got {dt}")));
        }
        let dx = (x_max - x_min) / nx as f64;
        let dy = (y_max - y_min) / ny as f64;
        let grid = YeeGrid {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            dx,
            dy,
            dt,
            n_steps,
        };
        let cfl = grid.cfl();
        if !(cfl < 1.0) {
            return Err(Error::config(
                "grid.dt",
                format!("CFL number dt*sqrt(1/dx^2 + 1/dy^2) = {cfl:.6} must be < 1"),
            ));
        }
        Ok(grid)
    }

    /// Baseline grid of the layer experiments: `(0,10)²`, `Δx = Δy = 0.1`,
    /// `Δt = 0.0702`, enough steps to reach `t_final`.
    pub fn baseline(t_final: f64) -> Self {
        let dt = 0.0702;
        YeeGrid::new(0.0, 10.0, 0.0, 10.0, 100, 100, dt, steps_for(t_final, dt))
            .expect("baseline grid is valid")
    }

    pub fn cfl(&self) -> f64 {
        self.dt * (1.0 / (self.dx * self.dx) + 1.0 / (self.dy * self.dy)).sqrt()
    }

    /// One refinement level: halves `dx`, `dy`, `dt`; doubles cell and step counts.
    pub fn refine(&self) -> Self {
        YeeGrid {
            nx: 2 * self.nx,
            ny: 2 * self.ny,
            dx: self.dx / 2.0,
            dy: self.dy / 2.0,
            dt: self.dt / 2.0,
            n_steps: 2 * self.n_steps,
            ..self.clone()
        }
    }

    pub fn refined(&self, levels: u32) -> Self {
        (0..levels).fold(self.clone(), |g, _| g.refine())
    }

    /// Grows the domain by whole cells on every side, keeping spacings and
    /// time step so that node coordinates of the two grids coincide.
    pub fn enlarged(&self, cells_x: usize, cells_y: usize) -> Self {
        YeeGrid {
            x_min: self.x_min - cells_x as f64 * self.dx,
            x_max: self.x_max + cells_x as f64 * self.dx,
            y_min: self.y_min - cells_y as f64 * self.dy,
            y_max: self.y_max + cells_y as f64 * self.dy,
            nx: self.nx + 2 * cells_x,
            ny: self.ny + 2 * cells_y,
            ..self.clone()
        }
    }

    /// Same grid with `cells` extra columns past the east edge.
    pub fn extended_east(&self, cells: usize) -> Self {
        YeeGrid {
            x_max: self.x_max + cells as f64 * self.dx,
            nx: self.nx + cells,
            ..self.clone()
        }
    }

    pub fn t_final(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn shape(&self, node: Node) -> (usize, usize) {
        match node {
            Node::Ex => (self.nx, self.ny + 1),
            Node::Ey => (self.nx + 1, self.ny),
            Node::Hz => (self.nx, self.ny),
        }
    }

    /// x coordinate of integer column `i` (`x_i`).
    pub fn x_int(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// x coordinate of half column `i + 1/2`.
    pub fn x_half(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn coord(&self, node: Node, i: usize, j: usize) -> (f64, f64) {
        let (ox, oy) = node.offsets();
        (
            self.x_min + (i as f64 + ox) * self.dx,
            self.y_min + (j as f64 + oy) * self.dy,
        )
    }

    /// Inverse of [`YeeGrid::coord`]; `None` when the point is not within
    /// a quarter cell of a node of that family.
    pub fn index(&self, node: Node, x: f64, y: f64) -> Option<(usize, usize)> {
        let (ox, oy) = node.offsets();
        let fi = (x - self.x_min) / self.dx - ox;
        let fj = (y - self.y_min) / self.dy - oy;
        let (i, j) = (fi.round(), fj.round());
        if (fi - i).abs() > 0.25 || (fj - j).abs() > 0.25 || i < 0.0 || j < 0.0 {
            return None;
        }
        let (i, j) = (i as usize, j as usize);
        let (ni, nj) = self.shape(node);
        (i < ni && j < nj).then_some((i, j))
    }
}

/// Number of whole leapfrog steps that fit in `[0, t_final]`.
///
/// Rounding down keeps the run from overshooting `t_final`; on the baseline
/// grid one extra step would let the outgoing packet touch the west wall.
pub fn steps_for(t_final: f64, dt: f64) -> usize {
    (t_final / dt + 1e-9).floor() as usize
}

impl TryFrom<GridSpec> for YeeGrid {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        YeeGrid::new(
            s.x_min, s.x_max, s.y_min, s.y_max, s.nx, s.ny, s.dt, s.n_steps,
        )
    }
}

impl From<YeeGrid> for GridSpec {
    fn from(g: YeeGrid) -> Self {
        GridSpec {
            x_min: g.x_min,
            x_max: g.x_max,
            y_min: g.y_min,
            y_max: g.y_max,
            nx: g.nx,
            ny: g.ny,
            dt: g.dt,
            n_steps: g.n_steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_cfl_is_just_below_one() {
        let g = YeeGrid::baseline(4.0);
        assert!((g.cfl() - 0.0702 * 200f64.sqrt()).abs() < 1e-15);
        assert!(g.cfl() > 0.99 && g.cfl() < 1.0);
        assert_eq!(g.n_steps, 56);
    }

    #[test]
    fn rejects_cfl_violation() {
        let err = YeeGrid::new(0.0, 10.0, 0.0, 10.0, 100, 100, 0.08, 10).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grid.dt") && msg.contains("1.131"), "{msg}");
    }

    #[test]
    fn rejects_degenerate_counts() {
        assert!(YeeGrid::new(0.0, 1.0, 0.0, 1.0, 1, 4, 0.01, 1).is_err());
        assert!(YeeGrid::new(0.0, 1.0, 0.0, 1.0, 4, 1, 0.01, 1).is_err());
        assert!(YeeGrid::new(0.0, 1.0, 0.0, 1.0, 4, 4, -0.01, 1).is_err());
    }

    #[test]
    fn double_refinement_is_exact() {
        let g = YeeGrid::baseline(4.0);
        let r = g.refined(2);
        assert_eq!((r.nx, r.ny, r.n_steps), (4 * g.nx, 4 * g.ny, 4 * g.n_steps));
        assert_eq!(r.dt, g.dt / 4.0);
        assert_eq!(r.dx, g.dx / 4.0);
        assert_eq!(r.cfl(), g.cfl());
    }

    #[test]
    fn index_coordinate_round_trip() {
        let g = YeeGrid::baseline(4.0).refine();
        for node in [Node::Ex, Node::Ey, Node::Hz] {
            let (ni, nj) = g.shape(node);
            for i in (0..ni).step_by(7) {
                for j in (0..nj).step_by(11) {
                    let (x, y) = g.coord(node, i, j);
                    assert_eq!(g.index(node, x, y), Some((i, j)));
                }
            }
        }
    }

    #[test]
    fn enlarged_grid_shares_node_coordinates() {
        let g = YeeGrid::baseline(4.0);
        let big = g.enlarged(13, 9);
        let (x, y) = g.coord(Node::Hz, 3, 4);
        let (bx, by) = big.coord(Node::Hz, 16, 13);
        assert!((x - bx).abs() < 1e-12 && (y - by).abs() < 1e-12);
    }
}
