//! Staggered (Yee) storage for TMz fields.
//!
//! `E_z` lives at integer nodes `(i dx, j dy)` and integer time levels,
//! `H_x` at `(i dx, (j + 1/2) dy)` and `H_y` at `((i + 1/2) dx, j dy)`, both
//! at half-integer time levels. Every array carries [`GHOST`] layers on each
//! side so that the widest stencil can read without bounds checks.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::ReferenceSolution;
use crate::{Error, Result, Side};

pub const GHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldKind {
    Hx,
    Hy,
    Ez,
}

impl FieldKind {
    pub const ALL: [FieldKind; 3] = [FieldKind::Hx, FieldKind::Hy, FieldKind::Ez];

    pub fn index(self) -> usize {
        match self {
            FieldKind::Hx => 0,
            FieldKind::Hy => 1,
            FieldKind::Ez => 2,
        }
    }

    pub fn is_magnetic(self) -> bool {
        !matches!(self, FieldKind::Ez)
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Hx => "hx",
            FieldKind::Hy => "hy",
            FieldKind::Ez => "ez",
        }
    }

    /// Offsets of the node lattice in units of the cell size.
    pub fn offset(self) -> [f64; 2] {
        match self {
            FieldKind::Hx => [0.0, 0.5],
            FieldKind::Hy => [0.5, 0.0],
            FieldKind::Ez => [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Wrap-around indexing on all four sides.
    Periodic,
    /// Boundary and ghost nodes are overwritten from a known solution.
    Prescribed,
}

/// A node of one staggered lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIndex {
    pub field: FieldKind,
    pub i: isize,
    pub j: isize,
}

impl NodeIndex {
    pub fn new(field: FieldKind, i: isize, j: isize) -> Self {
        Self { field, i, j }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredGrid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub boundary: BoundaryKind,
}

impl StaggeredGrid2D {
    pub fn new(bounds: [f64; 4], nx: usize, ny: usize, dt: f64, boundary: BoundaryKind) -> Result<Self> {
        let [x_min, x_max, y_min, y_max] = bounds;
        if !(x_max > x_min && y_max > y_min) || nx == 0 || ny == 0 || !(dt > 0.0) {
            return Err(Error::Config(format!("degenerate grid {bounds:?} {nx}x{ny} dt={dt}")));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
            dt,
            boundary,
        })
    }

    /// Square cells of size `h` covering `bounds`; `dt = dt_factor * h`.
    pub fn uniform(bounds: [f64; 4], h: f64, dt_factor: f64, boundary: BoundaryKind) -> Result<Self> {
        let nx = ((bounds[1] - bounds[0]) / h).round() as usize;
        let ny = ((bounds[3] - bounds[2]) / h).round() as usize;
        Self::new(bounds, nx, ny, dt_factor * h, boundary)
    }

    pub fn h(&self) -> f64 {
        self.dx.max(self.dy)
    }

    /// Number of owned nodes of `field` in each direction.
    pub fn extent(&self, field: FieldKind) -> (usize, usize) {
        match self.boundary {
            BoundaryKind::Periodic => (self.nx, self.ny),
            BoundaryKind::Prescribed => match field {
                FieldKind::Ez => (self.nx + 1, self.ny + 1),
                FieldKind::Hx => (self.nx + 1, self.ny),
                FieldKind::Hy => (self.nx, self.ny + 1),
            },
        }
    }

    /// Physical position of any lattice index, ghosts included.
    pub fn position(&self, field: FieldKind, i: isize, j: isize) -> [f64; 2] {
        let o = field.offset();
        [self.x_min + (i as f64 + o[0]) * self.dx, self.y_min + (j as f64 + o[1]) * self.dy]
    }

    /// Position of an owned node.
    pub fn node_position(&self, field: FieldKind, i: isize, j: isize) -> Result<[f64; 2]> {
        let (ni, nj) = self.extent(field);
        if i < 0 || j < 0 || i >= ni as isize || j >= nj as isize {
            return Err(Error::OutOfRange { field, i, j });
        }
        Ok(self.position(field, i, j))
    }

    /// Owned index that stores the value of lattice index `(i, j)`.
    pub fn wrap(&self, i: isize, j: isize) -> (isize, isize) {
        match self.boundary {
            BoundaryKind::Periodic => (i.rem_euclid(self.nx as isize), j.rem_euclid(self.ny as isize)),
            BoundaryKind::Prescribed => (i, j),
        }
    }

    /// Whether the node is advanced by the scheme (as opposed to prescribed).
    pub fn is_active(&self, field: FieldKind, i: isize, j: isize) -> bool {
        let (ni, nj) = self.extent(field);
        if i < 0 || j < 0 || i >= ni as isize || j >= nj as isize {
            return false;
        }
        match self.boundary {
            BoundaryKind::Periodic => true,
            BoundaryKind::Prescribed => {
                let [x, y] = self.position(field, i, j);
                let tol = 1e-9 * self.h();
                x > self.x_min + tol && x < self.x_max - tol && y > self.y_min + tol && y < self.y_max - tol
            }
        }
    }

    pub fn new_array(&self, field: FieldKind) -> FieldArray {
        let (ni, nj) = self.extent(field);
        FieldArray::zeros(ni, nj)
    }
}

/// Node values of one field, with ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldArray {
    ni: usize,
    nj: usize,
    stride: usize,
    data: Vec<f64>,
}

impl FieldArray {
    pub fn zeros(ni: usize, nj: usize) -> Self {
        let stride = nj + 2 * GHOST;
        Self { ni, nj, stride, data: vec![0.0; (ni + 2 * GHOST) * stride] }
    }

    pub fn extent(&self) -> (usize, usize) {
        (self.ni, self.nj)
    }

    #[inline]
    fn offset(&self, i: isize, j: isize) -> usize {
        let g = GHOST as isize;
        debug_assert!(i >= -g && i < self.ni as isize + g && j >= -g && j < self.nj as isize + g);
        ((i + g) as usize) * self.stride + (j + g) as usize
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        self.data[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, v: f64) {
        let o = self.offset(i, j);
        self.data[o] = v;
    }

    #[inline]
    pub fn add(&mut self, i: isize, j: isize, v: f64) {
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    /// Index ranges including ghosts.
    pub fn full_range(&self) -> (std::ops::Range<isize>, std::ops::Range<isize>) {
        let g = GHOST as isize;
        (-g..self.ni as isize + g, -g..self.nj as isize + g)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copies owned values into ghost layers with periodic wrap.
    pub fn fill_periodic_ghosts(&mut self) {
        let (ri, rj) = self.full_range();
        let (ni, nj) = (self.ni as isize, self.nj as isize);
        for i in ri {
            for j in rj.clone() {
                if i < 0 || j < 0 || i >= ni || j >= nj {
                    let v = self.get(i.rem_euclid(ni), j.rem_euclid(nj));
                    self.set(i, j, v);
                }
            }
        }
    }
}

/// Field values at one pair of staggered time levels: `E_z` at `t_e`, the
/// magnetic field at `t_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub hx: FieldArray,
    pub hy: FieldArray,
    pub ez: FieldArray,
    pub t_e: f64,
    pub t_h: f64,
}

impl FieldState {
    pub fn zeros(grid: &StaggeredGrid2D) -> Self {
        Self {
            hx: grid.new_array(FieldKind::Hx),
            hy: grid.new_array(FieldKind::Hy),
            ez: grid.new_array(FieldKind::Ez),
            t_e: 0.0,
            t_h: -0.5 * grid.dt,
        }
    }

    pub fn field(&self, f: FieldKind) -> &FieldArray {
        match f {
            FieldKind::Hx => &self.hx,
            FieldKind::Hy => &self.hy,
            FieldKind::Ez => &self.ez,
        }
    }

    pub fn field_mut(&mut self, f: FieldKind) -> &mut FieldArray {
        match f {
            FieldKind::Hx => &mut self.hx,
            FieldKind::Hy => &mut self.hy,
            FieldKind::Ez => &mut self.ez,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.hx.all_finite() && self.hy.all_finite() && self.ez.all_finite()
    }

    /// Samples a reference solution on every node (ghosts included), each
    /// node on its own side of the interface; E at `t`, H at `t - dt/2`.
    pub fn sample(grid: &StaggeredGrid2D, reference: &dyn ReferenceSolution, t: f64) -> Self {
        let mut s = Self::zeros(grid);
        s.t_e = t;
        s.t_h = t - 0.5 * grid.dt;
        for f in FieldKind::ALL {
            let time = if f.is_magnetic() { s.t_h } else { s.t_e };
            let arr = s.field_mut(f);
            let (ri, rj) = arr.full_range();
            for i in ri {
                for j in rj.clone() {
                    let p = grid.position(f, i, j);
                    let side = reference.interface().classify(p);
                    arr.set(i, j, reference.fields(side, p[0], p[1], time)[f.index()]);
                }
            }
        }
        s
    }
}

/// Discrete L2 errors of the three fields and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub hx: f64,
    pub hy: f64,
    pub ez: f64,
    pub combined: f64,
}

impl ErrorNorms {
    pub fn from_fields(hx: f64, hy: f64, ez: f64) -> Self {
        Self { hx, hy, ez, combined: (hx * hx + hy * hy + ez * ez).sqrt() }
    }
}

/// `sqrt(sum (numeric - exact)^2 dx dy)` over all owned nodes of each field,
/// E compared at `t` and H at `t - dt/2`.
pub fn l2_error(
    grid: &StaggeredGrid2D,
    state: &FieldState,
    reference: &dyn ReferenceSolution,
    t: f64,
) -> ErrorNorms {
    let mut norms = [0.0; 3];
    for f in FieldKind::ALL {
        let time = if f.is_magnetic() { t - 0.5 * grid.dt } else { t };
        let (ni, nj) = grid.extent(f);
        let arr = state.field(f);
        let mut sum = 0.0;
        for i in 0..ni as isize {
            for j in 0..nj as isize {
                let p = grid.position(f, i, j);
                let side = reference.interface().classify(p);
                let exact = reference.fields(side, p[0], p[1], time)[f.index()];
                let d = arr.get(i, j) - exact;
                sum += d * d;
            }
        }
        norms[f.index()] = (sum * grid.dx * grid.dy).sqrt();
    }
    ErrorNorms::from_fields(norms[0], norms[1], norms[2])
}

/// Writes `x,y,value` rows for the owned nodes of one field.
pub fn write_snapshot(path: &Path, grid: &StaggeredGrid2D, state: &FieldState, field: FieldKind, header: &str) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for line in header.lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "x,y,{}", field.name())?;
    let (ni, nj) = grid.extent(field);
    let arr = state.field(field);
    for i in 0..ni as isize {
        for j in 0..nj as isize {
            let [x, y] = grid.position(field, i, j);
            writeln!(out, "{x:.12e},{y:.12e},{:.12e}", arr.get(i, j))?;
        }
    }
    Ok(())
}

/// Side of a node with respect to the reference interface.
pub fn node_side(grid: &StaggeredGrid2D, reference: &dyn ReferenceSolution, n: NodeIndex) -> Side {
    reference.interface().classify(grid.position(n.field, n.i, n.j))
}
