use crate::error::{Error, Result};
use crate::grid::{Node, YeeGrid};

/// Dense row-major 2-D array; row `i` is the x index, contiguous along y.
#[derive(Debug, PartialEq)]
pub struct Field2 {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Clone for Field2 {
    fn clone(&self) -> Self {
        Field2 {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }

    // reuses the buffer; the extrapolated layers copy whole fields every step
    fn clone_from(&mut self, source: &Self) {
        self.rows = source.rows;
        self.cols = source.cols;
        self.data.clone_from(&source.data);
    }
}

impl Field2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Field2 {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Field2 { rows, cols, data }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    /// Largest magnitude; NaN if any entry is NaN.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| {
            let a = v.abs();
            if a <= m {
                m
            } else {
                a
            }
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self ← a·self + b·other`
    pub fn axpby(&mut self, a: f64, b: f64, other: &Field2) {
        debug_assert_eq!(self.shape(), other.shape());
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s = a * *s + b * o;
        }
    }

    /// `self ← 2·first − second`, the harmonious extrapolation.
    pub fn extrapolate_from(&mut self, first: &Field2, second: &Field2) {
        debug_assert_eq!(first.shape(), second.shape());
        self.rows = first.rows;
        self.cols = first.cols;
        self.data.clear();
        self.data.extend(
            first
                .data
                .iter()
                .zip(&second.data)
                .map(|(a, b)| 2.0 * a - b),
        );
    }

    pub fn max_abs_diff(&self, other: &Field2) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Method-specific auxiliary unknowns.
#[derive(Clone, Debug, PartialEq)]
pub enum Aux {
    None,
    /// Bérenger split magnetic field, colocated with `hz`.
    Split {
        hzx: Field2,
        hzy: Field2,
    },
    /// SPML auxiliary `W`, colocated with `ex`.
    Spml {
        w: Field2,
    },
}

/// Staggered fields at one time level: `ex`, `ey` at `tⁿ`, `hz` at `tⁿ⁺½`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub ex: Field2,
    pub ey: Field2,
    pub hz: Field2,
    pub aux: Aux,
}

fn check_shape(field: &'static str, f: &Field2, grid: &YeeGrid, node: Node) -> Result<()> {
    let expected = grid.shape(node);
    if f.shape() != expected {
        return Err(Error::Shape {
            field,
            expected,
            found: f.shape(),
        });
    }
    Ok(())
}

impl FieldState {
    pub fn zeros(grid: &YeeGrid) -> Self {
        let f = |n: Node| {
            let (r, c) = grid.shape(n);
            Field2::zeros(r, c)
        };
        FieldState {
            ex: f(Node::Ex),
            ey: f(Node::Ey),
            hz: f(Node::Hz),
            aux: Aux::None,
        }
    }

    /// Zero electric field and `hz` sampled from `f(x, y)`.
    pub fn with_hz(grid: &YeeGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut s = FieldState::zeros(grid);
        s.hz = Field2::from_fn(grid.nx, grid.ny, |i, j| {
            let (x, y) = grid.coord(Node::Hz, i, j);
            f(x, y)
        });
        s
    }

    /// Adds Bérenger split arrays, sharing `hz` evenly between the two parts.
    pub fn into_split(mut self) -> Self {
        let mut half = self.hz.clone();
        half.as_mut_slice().iter_mut().for_each(|v| *v *= 0.5);
        let mut hzy = self.hz.clone();
        hzy.axpby(1.0, -1.0, &half);
        self.aux = Aux::Split { hzx: half, hzy };
        self
    }

    /// Adds a zero SPML auxiliary array.
    pub fn into_spml(mut self) -> Self {
        let (r, c) = self.ex.shape();
        self.aux = Aux::Spml {
            w: Field2::zeros(r, c),
        };
        self
    }

    /// Drops auxiliary arrays, keeping `(ex, ey, hz)`.
    pub fn plain(&self) -> Self {
        FieldState {
            ex: self.ex.clone(),
            ey: self.ey.clone(),
            hz: self.hz.clone(),
            aux: Aux::None,
        }
    }

    /// Shapes of `(ex, ey, hz)` only; auxiliary arrays are not inspected.
    pub fn check_field_shapes(&self, grid: &YeeGrid) -> Result<()> {
        let check = |field: &'static str, f: &Field2, node: Node| check_shape(field, f, grid, node);
        check("ex", &self.ex, Node::Ex)?;
        check("ey", &self.ey, Node::Ey)?;
        check("hz", &self.hz, Node::Hz)
    }

    pub fn check_shapes(&self, grid: &YeeGrid) -> Result<()> {
        self.check_field_shapes(grid)?;
        let check = |field: &'static str, f: &Field2, node: Node| check_shape(field, f, grid, node);
        match &self.aux {
            Aux::None => Ok(()),
            Aux::Split { hzx, hzy } => {
                check("hzx", hzx, Node::Hz)?;
                check("hzy", hzy, Node::Hz)
            }
            Aux::Spml { w } => check("w", w, Node::Ex),
        }
    }

    pub fn all_finite(&self) -> bool {
        let aux = match &self.aux {
            Aux::None => true,
            Aux::Split { hzx, hzy } => hzx.all_finite() && hzy.all_finite(),
            Aux::Spml { w } => w.all_finite(),
        };
        aux && self.ex.all_finite() && self.ey.all_finite() && self.hz.all_finite()
    }

    pub fn max_abs(&self) -> f64 {
        self.ex
            .max_abs()
            .max(self.ey.max_abs())
            .max(self.hz.max_abs())
    }

    /// Sup-norm distance over `(ex, ey, hz)`.
    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.ex
            .max_abs_diff(&other.ex)
            .max(self.ey.max_abs_diff(&other.ey))
            .max(self.hz.max_abs_diff(&other.hz))
    }

    /// `self ← a·self + b·other` on every array, auxiliaries included.
    pub fn axpby(&mut self, a: f64, b: f64, other: &FieldState) {
        self.ex.axpby(a, b, &other.ex);
        self.ey.axpby(a, b, &other.ey);
        self.hz.axpby(a, b, &other.hz);
        match (&mut self.aux, &other.aux) {
            (Aux::Split { hzx, hzy }, Aux::Split { hzx: ox, hzy: oy }) => {
                hzx.axpby(a, b, ox);
                hzy.axpby(a, b, oy);
            }
            (Aux::Spml { w }, Aux::Spml { w: ow }) => w.axpby(a, b, ow),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_has_staggered_shapes() {
        let g = YeeGrid::baseline(4.0);
        let s = FieldState::zeros(&g);
        assert_eq!(s.ex.shape(), (100, 101));
        assert_eq!(s.ey.shape(), (101, 100));
        assert_eq!(s.hz.shape(), (100, 100));
        s.check_shapes(&g).unwrap();
        let bad = FieldState::zeros(&g.refine());
        assert!(matches!(
            bad.check_shapes(&g),
            Err(Error::Shape { field: "ex", .. })
        ));
    }

    #[test]
    fn split_parts_sum_to_hz() {
        let g = YeeGrid::baseline(4.0);
        let s = FieldState::with_hz(&g, |x, y| (x * 1.3).sin() * (y * 0.7).cos()).into_split();
        let Aux::Split { hzx, hzy } = &s.aux else {
            panic!()
        };
        for i in 0..g.nx {
            for j in 0..g.ny {
                assert!((hzx.get(i, j) + hzy.get(i, j) - s.hz.get(i, j)).abs() <= 1e-15);
            }
        }
    }
}
