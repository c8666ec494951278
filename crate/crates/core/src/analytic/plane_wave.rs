use crate::geometry::Interface;
use crate::Side;

use super::{Material, ReferenceSolution};

/// `E_z = sin(k . x - omega t)` in a homogeneous medium. The interface only
/// labels the sides; both sides carry the same field and coefficients.
#[derive(Debug, Clone)]
pub struct PlaneWave {
    pub interface: Interface,
    pub wave_vector: [f64; 2],
    pub mu: f64,
    pub eps: f64,
}

impl PlaneWave {
    pub fn new(interface: Interface, wave_vector: [f64; 2], mu: f64, eps: f64) -> Self {
        Self { interface, wave_vector, mu, eps }
    }

    fn omega(&self) -> f64 {
        let [kx, ky] = self.wave_vector;
        (kx * kx + ky * ky).sqrt() / (self.mu * self.eps).sqrt()
    }
}

impl ReferenceSolution for PlaneWave {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn fields(&self, _side: Side, x: f64, y: f64, t: f64) -> [f64; 3] {
        let [kx, ky] = self.wave_vector;
        let w = self.omega();
        let s = (kx * x + ky * y - w * t).sin();
        [ky / (self.mu * w) * s, -kx / (self.mu * w) * s, s]
    }

    fn material(&self, _side: Side, _x: f64, _y: f64) -> Material {
        Material::constant(self.mu, self.eps)
    }
}
