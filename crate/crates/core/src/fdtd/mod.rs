//! Yee and fourth-order staggered FDTD schemes with interface corrections.

mod plan;
mod stepper;

pub use plan::{classify_stencils, CorrectionEntry, StencilPlan};
pub use stepper::{CorrectionProvider, ExactCorrections, FieldHistory, NoCorrections, Phase, Simulation};

use serde::{Deserialize, Serialize};


/// Spatial/temporal discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Second-order leapfrog on the staggered grid.
    Yee2,
    /// Fourth-order staggered stencil with a fourth-order staggered
    /// multistep integrator.
    Staggered4,
}

/// Free parameter of the fourth-order staggered multistep family (the
/// coefficient of the oldest level). This value maximizes the
/// imaginary-axis stability interval.
pub const STAGGERED4_FREE_COEFFICIENT: f64 = -1.0 / 48.0;

/// Largest `|lambda dt|` on the imaginary axis for which the multistep
/// method is stable (12/7 for the member above, 2 for leapfrog).
pub const STAGGERED4_STABILITY_LIMIT: f64 = 12.0 / 7.0;
pub const LEAPFROG_STABILITY_LIMIT: f64 = 2.0;

impl SchemeKind {
    /// Staggered first-derivative weights (times `1/h`) at offsets
    /// `-w/2 + 1/2, ..., w/2 - 1/2` cells.
    pub fn stencil(self) -> &'static [f64] {
        match self {
            SchemeKind::Yee2 => &[-1.0, 1.0],
            SchemeKind::Staggered4 => &[1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0],
        }
    }

    /// Half width of the stencil in nodes.
    pub fn half_width(self) -> isize {
        self.stencil().len() as isize / 2
    }

    /// Coefficients `b_j` of `u^{n+1} = u^n + dt sum_j b_j f^{n+1/2-j}`.
    pub fn time_coefficients(self) -> Vec<f64> {
        match self {
            SchemeKind::Yee2 => vec![1.0],
            SchemeKind::Staggered4 => derive_staggered4_time_coefficients(STAGGERED4_FREE_COEFFICIENT),
        }
    }

    /// Temporal degree of the fictitious-interface interpolants.
    pub fn interpolant_time_degree(self) -> usize {
        match self {
            SchemeKind::Yee2 => 1,
            SchemeKind::Staggered4 => 3,
        }
    }

    /// Spatial degree of the fictitious-interface interpolants.
    pub fn interpolant_space_degree(self) -> usize {
        match self {
            SchemeKind::Yee2 => 2,
            SchemeKind::Staggered4 => 3,
        }
    }

    /// Spectral radius of the discrete curl times `h / c`.
    pub fn curl_radius(self) -> f64 {
        let w = self.stencil();
        let hw = w.len() / 2;
        // symbol at the highest wavenumber: |sum_m w_m e^{i pi (m - hw + 1/2)}|
        let s: f64 = w.iter().enumerate().map(|(m, wm)| wm * (std::f64::consts::PI * (m as f64 - hw as f64 + 0.5)).sin()).sum();
        s.abs() * std::f64::consts::SQRT_2
    }

    pub fn stability_limit(self) -> f64 {
        match self {
            SchemeKind::Yee2 => LEAPFROG_STABILITY_LIMIT,
            SchemeKind::Staggered4 => STAGGERED4_STABILITY_LIMIT,
        }
    }

    /// Largest stable time step for wave speed `c_max` on cells of size `h`.
    pub fn max_time_step(self, h: f64, c_max: f64) -> f64 {
        self.stability_limit() * h / (self.curl_radius() * c_max)
    }
}

/// Solves the order conditions of the staggered five-level family
/// `u^{n+1} - u^n = dt sum_{j=0}^{4} b_j f(t^{n+1/2-j})` for `b_0..b_3`
/// given `b_4`: exactness for `u = t^m`, `m = 1..4`.
pub fn derive_staggered4_time_coefficients(b4: f64) -> Vec<f64> {
    let a = nalgebra::Matrix4::from_fn(|m, j| (m + 1) as f64 * (0.5 - j as f64).powi(m as i32));
    let rhs = nalgebra::Vector4::from_fn(|m, _| 1.0 - b4 * (m + 1) as f64 * (0.5 - 4.0f64).powi(m as i32));
    let b = a.lu().solve(&rhs).expect("order-condition matrix is nonsingular");
    let mut out: Vec<f64> = b.iter().copied().collect();
    out.push(b4);
    out
}

/// Residual of the order condition for `u = t^m`.
pub fn order_condition_residual(b: &[f64], m: usize) -> f64 {
    let s: f64 = b.iter().enumerate().map(|(j, bj)| bj * m as f64 * (0.5 - j as f64).powi(m as i32 - 1)).sum();
    s - 1.0
}
