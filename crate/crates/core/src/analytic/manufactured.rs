use std::f64::consts::PI;

use super::{Material, ReferenceSolution};
use crate::geometry::Interface;
use crate::Side;

/// Manufactured two-sided solution on the unit square with smooth varying
/// coefficients inside the interface and sources on the minus side only.
/// The plus-side fields are 1-periodic in `x` and `y`.
#[derive(Debug, Clone)]
pub struct ManufacturedSolution {
    interface: Interface,
}

const TWO_PI: f64 = 2.0 * PI;

impl ManufacturedSolution {
    pub fn new(interface: Interface) -> Self {
        Self { interface }
    }
}

impl ReferenceSolution for ManufacturedSolution {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn fields(&self, side: Side, x: f64, y: f64, t: f64) -> [f64; 3] {
        let (st, ct) = (TWO_PI * t).sin_cos();
        match side {
            Side::Plus => {
                let (sx, cx) = (TWO_PI * x).sin_cos();
                let (sy, cy) = (TWO_PI * y).sin_cos();
                [0.5 * sx * sy * st, 0.5 * cx * cy * st, sx * cy * ct]
            }
            Side::Minus => {
                let e = (-x * y).exp();
                [-x * e * st, y * e * st, (TWO_PI * x * y).sin() * ct]
            }
        }
    }

    fn material(&self, side: Side, x: f64, y: f64) -> Material {
        match side {
            Side::Plus => Material::constant(2.0, 1.0),
            Side::Minus => {
                let xy = x * y;
                let (s, c) = (5.0 * PI * xy).sin_cos();
                let e = 2.0 * xy.exp();
                Material {
                    mu: s + 2.0,
                    eps: e,
                    grad_mu: [5.0 * PI * c * y, 5.0 * PI * c * x],
                    grad_eps: [e * y, e * x],
                }
            }
        }
    }

    fn sources(&self, side: Side, x: f64, y: f64, t: f64) -> [f64; 3] {
        match side {
            Side::Plus => [0.0; 3],
            Side::Minus => {
                let xy = x * y;
                let mu = (5.0 * PI * xy).sin() + 2.0;
                let em = (-xy).exp();
                let (s2, c2) = (TWO_PI * xy).sin_cos();
                let (st, ct) = (TWO_PI * t).sin_cos();
                [
                    TWO_PI * x * (c2 - mu * em) * ct,
                    TWO_PI * y * (mu * em - c2) * ct,
                    ((x * x + y * y) * em - 4.0 * PI * xy.exp() * s2) * st,
                ]
            }
        }
    }

    fn has_sources(&self, side: Side) -> bool {
        side == Side::Minus
    }

    fn has_interface_data(&self) -> bool {
        true
    }
}
