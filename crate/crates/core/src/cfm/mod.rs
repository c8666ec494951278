//! Correction functions: divergence-free space-time polynomials fitted on
//! small patches around the interface.

pub mod assemble;
pub mod basis;
pub mod corrector;
pub mod interp;
pub mod linalg;
pub mod poly;
pub mod quadrature;

use serde::{Deserialize, Serialize};

pub use assemble::{CfmContext, DataItem, DataLayout, LocalFrame};
pub use basis::{Component, DivFreePolyBasis};
pub use corrector::CfmCorrector;
pub use interp::FdInterpolant;

use crate::geometry::PatchOptions;
use crate::grid::{FieldKind, StaggeredGrid2D};
use crate::{Error, Result, Side};
use linalg::{Cholesky, DenseMatrix};
use poly::MonomialSpace;

/// Parameters of the correction-function functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfmConfig {
    /// Polynomial degree of the expansions.
    pub degree: usize,
    /// Interface penalty.
    pub c_p: f64,
    /// Fictitious-interface penalty per unit time step.
    pub alpha: f64,
    /// Patch side in cells.
    pub beta: f64,
    /// Spatial degree of the finite-difference interpolants.
    pub interp_degree: usize,
    #[serde(default)]
    pub volume_points: Option<usize>,
    #[serde(default)]
    pub time_points: Option<usize>,
    #[serde(default)]
    pub segment_points: Option<usize>,
}

impl CfmConfig {
    /// Second-degree functions for the Yee scheme.
    pub fn yee() -> Self {
        Self {
            degree: 2,
            c_p: 1.0,
            alpha: 1.0,
            beta: 7.0,
            interp_degree: 2,
            volume_points: None,
            time_points: None,
            segment_points: None,
        }
    }

    /// Third-degree functions for the fourth-order scheme.
    pub fn staggered4() -> Self {
        Self { degree: 3, alpha: 0.25, interp_degree: 3, ..Self::yee() }
    }

    pub fn c_f(&self, dt: f64) -> f64 {
        self.alpha * dt
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        if !(1..=4).contains(&self.degree) {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        let c_f = self.c_f(dt);
        if !(c_f > 0.0 && self.c_p > c_f) {
            return Err(Error::Config(format!("penalties must satisfy c_p > c_f > 0 (c_p = {}, c_f = {c_f})", self.c_p)));
        }
        if self.interp_degree < 2 {
            return Err(Error::Config(format!("interpolant degree must be at least 2, got {}", self.interp_degree)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::Config(format!("patch side factor must be positive, got {}", self.beta)));
        }
        if [self.volume_points, self.time_points, self.segment_points].contains(&Some(0)) {
            return Err(Error::Config("quadrature orders must be positive".into()));
        }
        Ok(())
    }

    /// Patch geometry on `grid`: side `beta h`, time window `2 dt`.
    pub fn patch_options(&self, grid: &StaggeredGrid2D) -> PatchOptions {
        let h = grid.h();
        PatchOptions {
            side_length: self.beta * h,
            time_length: 2.0 * grid.dt,
            segment_nodes: self.interp_degree + 1,
            max_arc: h,
        }
    }
}

/// Relative Tikhonov shift applied to every patch matrix.
pub const TIKHONOV: f64 = 1e-12;

/// Cholesky factor of `M + lambda I`.
#[derive(Debug)]
pub struct RegularizedSolver {
    factor: Cholesky,
    pub lambda: f64,
}

impl RegularizedSolver {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        let n = m.size();
        let lambda = TIKHONOV * m.trace() / n as f64;
        if !lambda.is_finite() {
            return Err(Error::SolverBreakdown("matrix has a non-finite trace".into()));
        }
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += lambda;
        }
        let factor = Cholesky::factor(&shifted)?;
        Ok(Self { factor, lambda })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.factor.solve(b)
    }

    pub fn condition_estimate(&self) -> f64 {
        self.factor.condition_estimate()
    }
}

/// Result of a patch minimization.
#[derive(Debug, Clone)]
pub struct Minimizer {
    pub coefficients: Vec<f64>,
    /// `|M c - b| / |b|`.
    pub relative_residual: f64,
    pub warning: Option<String>,
}

pub(crate) fn finish_solve(m: &DenseMatrix, b: &[f64], coefficients: Vec<f64>) -> Minimizer {
    let mc = m.mul_vec(&coefficients);
    let r = mc.iter().zip(b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let relative_residual = if nb > 0.0 { r / nb } else { r };
    let warning = (relative_residual > 1e-10).then(|| format!("ill-conditioned patch solve, relative residual {relative_residual:e}"));
    Minimizer { coefficients, relative_residual, warning }
}

/// Solves `(M + lambda I) c = b`.
pub fn minimize(m: &DenseMatrix, b: &[f64]) -> Result<Minimizer> {
    let solver = RegularizedSolver::new(m)?;
    Ok(finish_solve(m, b, solver.solve(b)))
}

/// Both one-sided expansions on one patch, in monomials of the local
/// coordinates.
#[derive(Debug, Clone)]
pub struct CorrectionFunction {
    pub patch: usize,
    pub frame: LocalFrame,
    /// Absolute time at the end of the window.
    pub t_end: f64,
    pub coefficients: Vec<f64>,
    pub warning: Option<String>,
    space: MonomialSpace,
    expansions: [[Vec<f64>; 3]; 2],
}

impl CorrectionFunction {
    pub fn new(ctx: &CfmContext, patch: usize, frame: LocalFrame, t_end: f64, coefficients: Vec<f64>) -> Self {
        let space = ctx.basis.space().clone();
        let nm = space.len();
        let ns = ctx.side_len();
        let mut expansions: [[Vec<f64>; 3]; 2] = Default::default();
        for side in Side::BOTH {
            let c = &coefficients[side.index() * ns..(side.index() + 1) * ns];
            for comp in Component::ALL {
                let op = ctx.basis.operator(comp, [0, 0, 0]);
                let mut mono = vec![0.0; nm];
                for (ci, row) in c.iter().zip(op.chunks_exact(nm)) {
                    for (m, r) in mono.iter_mut().zip(row) {
                        *m += ci * r;
                    }
                }
                expansions[side.index()][comp.index()] = mono;
            }
        }
        Self { patch, frame, t_end, coefficients, warning: None, space, expansions }
    }

    fn local(&self, x: f64, y: f64, t: f64) -> Result<[f64; 3]> {
        let p = self.frame.to_local(x, y, t - self.t_end);
        let tol = 1e-9;
        if p.iter().any(|v| v.abs() > 1.0 + tol) {
            return Err(Error::OutOfPatch { x, y, t });
        }
        Ok(p)
    }

    /// Space-time derivative `orders = [d_x, d_y, d_t]` of one expansion.
    pub fn derivative(&self, side: Side, field: FieldKind, orders: [usize; 3], x: f64, y: f64, t: f64) -> Result<f64> {
        let p = self.local(x, y, t)?;
        let c = &self.expansions[side.index()][assemble::component(field).index()];
        let d = self.space.mixed_derivative(c, orders);
        let s = self.frame.scales();
        let scale: f64 = (0..3).map(|a| s[a].powi(orders[a] as i32)).product();
        Ok(scale * self.space.eval(&d, p))
    }

    pub fn value(&self, side: Side, field: FieldKind, x: f64, y: f64, t: f64) -> Result<f64> {
        self.derivative(side, field, [0, 0, 0], x, y, t)
    }

    /// `F^+ - F^-` at a point of the patch box and window.
    pub fn jump_at(&self, field: FieldKind, point: [f64; 2], t: f64) -> Result<f64> {
        let [x, y] = point;
        Ok(self.value(Side::Plus, field, x, y, t)? - self.value(Side::Minus, field, x, y, t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_minimum_is_zero() {
        let mut m = DenseMatrix::identity(4);
        m[(0, 1)] = 0.3;
        m[(1, 0)] = 0.3;
        let r = minimize(&m, &[0.0; 4]).unwrap();
        assert!(r.coefficients.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn diagonal_system() {
        let m = DenseMatrix::identity(5);
        let r = minimize(&m, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let lambda = TIKHONOV;
        assert!((r.coefficients[0] - 1.0 / (1.0 + lambda)).abs() < 1e-16);
        assert!(r.coefficients[1..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn config_rejects_bad_penalties() {
        let mut c = CfmConfig::yee();
        assert!(c.validate(0.01).is_ok());
        c.c_p = 0.001;
        assert!(c.validate(0.01).is_err());
        c = CfmConfig::yee();
        c.interp_degree = 1;
        assert!(c.validate(0.01).is_err());
    }
}
