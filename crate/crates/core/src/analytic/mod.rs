//! Closed-form reference solutions: cylinder scattering series, the
//! manufactured solution with varying coefficients, and a plane wave in a
//! homogeneous medium.

pub mod bessel;
mod manufactured;
mod plane_wave;
mod scattering;

pub use manufactured::ManufacturedSolution;
pub use plane_wave::PlaneWave;
pub use scattering::{polar_to_cartesian, ScatteringSolution};

use num_complex::Complex64;

use crate::geometry::Interface;
use crate::Side;

/// Material coefficients at a point, with their spatial gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub mu: f64,
    pub eps: f64,
    pub grad_mu: [f64; 2],
    pub grad_eps: [f64; 2],
}

impl Material {
    pub fn constant(mu: f64, eps: f64) -> Self {
        Self { mu, eps, grad_mu: [0.0; 2], grad_eps: [0.0; 2] }
    }

    pub fn wave_speed(&self) -> f64 {
        1.0 / (self.mu * self.eps).sqrt()
    }
}

/// A problem with known two-sided solution. Both sides are defined on the
/// whole plane (smooth extensions), which the tests and the startup levels
/// rely on.
///
/// The system solved on each side is
///
/// ```text
/// mu dHx/dt + dEz/dy = f1x
/// mu dHy/dt - dEz/dx = f1y
/// eps dEz/dt - dHy/dx + dHx/dy = f2
/// ```
pub trait ReferenceSolution: Send + Sync {
    fn interface(&self) -> &Interface;

    /// `[Hx, Hy, Ez]` of the given side's solution.
    fn fields(&self, side: Side, x: f64, y: f64, t: f64) -> [f64; 3];

    fn material(&self, side: Side, x: f64, y: f64) -> Material;

    /// `[f1x, f1y, f2]`.
    fn sources(&self, _side: Side, _x: f64, _y: f64, _t: f64) -> [f64; 3] {
        [0.0; 3]
    }

    fn has_sources(&self, _side: Side) -> bool {
        false
    }

    /// Whether the interface conditions have nonzero right-hand sides.
    fn has_interface_data(&self) -> bool {
        false
    }

    /// Right-hand sides `[[Ez], [nx Hy - ny Hx], [mu (n . H)]]` of the
    /// interface conditions at `p` with normal `n`. The normal component of
    /// `eps E` is identically zero in TMz and is omitted.
    fn interface_data(&self, p: [f64; 2], n: [f64; 2], t: f64) -> [f64; 3] {
        let [x, y] = p;
        let up = self.fields(Side::Plus, x, y, t);
        let um = self.fields(Side::Minus, x, y, t);
        let mp = self.material(Side::Plus, x, y).mu;
        let mm = self.material(Side::Minus, x, y).mu;
        [
            up[2] - um[2],
            (n[0] * up[1] - n[1] * up[0]) - (n[0] * um[1] - n[1] * um[0]),
            mp * (n[0] * up[0] + n[1] * up[1]) - mm * (n[0] * um[0] + n[1] * um[1]),
        ]
    }

    /// For time-harmonic solutions `Re(U e^{i omega t})`: the angular
    /// frequency.
    fn angular_frequency(&self) -> Option<f64> {
        None
    }

    /// Complex amplitude `U` of `[Hx, Hy, Ez]` when
    /// [`angular_frequency`](Self::angular_frequency) is `Some`.
    fn phasor(&self, _side: Side, _x: f64, _y: f64) -> Option<[Complex64; 3]> {
        None
    }
}
