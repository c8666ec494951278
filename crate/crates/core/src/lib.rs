//! Finite-difference time-domain solver for two-dimensional TMz Maxwell
//! interface problems with discontinuous coefficients.
//!
//! Stencils that straddle the material interface are corrected with
//! correction functions: on a small space-time patch around the interface,
//! both one-sided solutions are approximated by divergence-free polynomials
//! that minimize a quadratic functional built from Maxwell's equations, the
//! interface conditions, and penalties toward the finite-difference solution
//! on grid-aligned fictitious interfaces. The difference of the two
//! expansions supplies the jump that is added to cross-interface reads.
//!
//! Module map:
//!
//! * [`geometry`]: level-set interfaces, side classification, patches.
//! * [`grid`]: staggered Yee storage, node positions, error norms.
//! * [`fdtd`]: Yee and fourth-order staggered schemes, stencil plans.
//! * [`cfm`]: polynomial basis, functional assembly, patch solves.
//! * [`analytic`]: Bessel functions, cylinder scattering and manufactured
//!   reference solutions.
//! * [`jumpcheck`]: explicit high-order jump conditions for verification.
//! * [`harness`]: run configuration, convergence ladders, CSV output.

pub mod analytic;
pub mod cfm;
pub mod error;
pub mod fdtd;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod jumpcheck;

pub use error::{Error, Result};

/// Which subdomain a point belongs to. `Minus` is the region where the level
/// set is non-positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];

    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// +1 for `Plus`, -1 for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Plus => 0,
            Side::Minus => 1,
        }
    }
}
