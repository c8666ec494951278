use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::{bessel_j_with_derivatives, hankel2_with_derivatives};
use super::{Material, ReferenceSolution};
use crate::geometry::Interface;
use crate::Side;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Plane wave scattered by a dielectric cylinder of radius `r0` centered at
/// the origin, as a truncated series in cylindrical harmonics. Fields are
/// the real part of `U(r, theta) e^{i omega t}`.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub omega: f64,
    pub r0: f64,
    pub n_max: usize,
    interface: Interface,
    /// Interior coefficients for `n = 0..=n_max` without the `i^{-n}` factor.
    tot: Vec<Complex64>,
    scat: Vec<Complex64>,
}

/// `i^m` for any integer `m`.
fn i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

impl ScatteringSolution {
    pub fn new(mu_plus: f64, mu_minus: f64, eps_plus: f64, eps_minus: f64, r0: f64, n_max: usize) -> Self {
        let omega = 2.0 * PI;
        let kp = omega * (mu_plus * eps_plus).sqrt();
        let km = omega * (mu_minus * eps_minus).sqrt();
        let (jp, djp) = bessel_j_with_derivatives(n_max, kp * r0);
        let (jm, djm) = bessel_j_with_derivatives(n_max, km * r0);
        let (hp, dhp) = hankel2_with_derivatives(n_max, kp * r0).expect("r0 > 0");
        let (ap, am) = (kp / mu_plus, km / mu_minus);
        let mut tot = Vec::with_capacity(n_max + 1);
        let mut scat = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let den = am * djm[n] * hp[n] - ap * dhp[n] * jm[n];
            tot.push(ap * (djp[n] * hp[n] - dhp[n] * jp[n]) / den);
            scat.push((ap * djp[n] * jm[n] - am * djm[n] * jp[n]) / den);
        }
        Self {
            mu_plus,
            mu_minus,
            eps_plus,
            eps_minus,
            omega,
            r0,
            n_max,
            interface: Interface::circle([0.0, 0.0], r0),
            tot,
            scat,
        }
    }

    /// The paper's non-magnetic cylinder: `mu = 1` on both sides,
    /// `eps^- = 2.25`, `r0 = 0.6`.
    pub fn non_magnetic() -> Self {
        Self::new(1.0, 1.0, 1.0, 2.25, 0.6, 40)
    }

    /// The magnetic cylinder: `mu^- = 2`, `eps^- = 2.25`.
    pub fn magnetic() -> Self {
        Self::new(1.0, 2.0, 1.0, 2.25, 0.6, 40)
    }

    pub fn with_truncation(&self, n_max: usize) -> Self {
        Self::new(self.mu_plus, self.mu_minus, self.eps_plus, self.eps_minus, self.r0, n_max)
    }

    fn wavenumber(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.omega * (self.mu_plus * self.eps_plus).sqrt(),
            Side::Minus => self.omega * (self.mu_minus * self.eps_minus).sqrt(),
        }
    }

    fn mu(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.mu_plus,
            Side::Minus => self.mu_minus,
        }
    }

    /// Coefficients `(C_n^tot, C_n^scat)` for any integer `n`.
    pub fn coefficients(&self, n: i64) -> (Complex64, Complex64) {
        let m = n.unsigned_abs() as usize;
        // the ratio is even in n, only the i^{-n} prefactor changes sign pattern
        let f = i_pow(-n);
        (f * self.tot[m], f * self.scat[m])
    }

    /// Complex amplitudes `(H_r, H_theta, E_z)` of one side's expansion.
    pub fn polar_phasor(&self, side: Side, r: f64, theta: f64) -> [Complex64; 3] {
        let r = r.max(1e-8);
        let k = self.wavenumber(side);
        let mu = self.mu(side);
        let n_max = self.n_max;
        // radial functions Z_n(kr) and Z_n'(kr) for n >= 0
        let (z, dz): (Vec<Complex64>, Vec<Complex64>) = match side {
            Side::Minus => {
                let (j, dj) = bessel_j_with_derivatives(n_max, k * r);
                (
                    (0..=n_max).map(|n| self.tot[n] * j[n]).collect(),
                    (0..=n_max).map(|n| self.tot[n] * dj[n]).collect(),
                )
            }
            Side::Plus => {
                let (j, dj) = bessel_j_with_derivatives(n_max, k * r);
                let (h, dh) = hankel2_with_derivatives(n_max, k * r).expect("r clamped positive");
                (
                    (0..=n_max).map(|n| j[n] + self.scat[n] * h[n]).collect(),
                    (0..=n_max).map(|n| dj[n] + self.scat[n] * dh[n]).collect(),
                )
            }
        };
        // Z_{-n} = (-1)^n Z_n, and the i^{-n} prefactor applies to every term.
        let mut ez = Complex64::new(0.0, 0.0);
        let mut ht = Complex64::new(0.0, 0.0);
        let mut hr = Complex64::new(0.0, 0.0);
        for n in -(n_max as i64)..=(n_max as i64) {
            let m = n.unsigned_abs() as usize;
            let parity = if n < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
            let phase = i_pow(-n) * Complex64::from_polar(1.0, n as f64 * theta) * parity;
            ez += phase * z[m];
            ht += phase * dz[m];
            hr += phase * z[m] * n as f64;
        }
        let ht = -I * k / (self.omega * mu) * ht;
        let hr = -hr / (self.omega * mu * r);
        [hr, ht, ez]
    }

    /// Real `(H_r, H_theta, E_z)` at time `t`.
    pub fn polar_fields(&self, side: Side, r: f64, theta: f64, t: f64) -> [f64; 3] {
        let e = Complex64::from_polar(1.0, self.omega * t);
        self.polar_phasor(side, r, theta).map(|v| (v * e).re)
    }
}

/// Cartesian components from polar ones.
pub fn polar_to_cartesian(hr: f64, ht: f64, theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [hr * c - ht * s, hr * s + ht * c]
}

impl ReferenceSolution for ScatteringSolution {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn fields(&self, side: Side, x: f64, y: f64, t: f64) -> [f64; 3] {
        let e = Complex64::from_polar(1.0, self.omega * t);
        self.phasor(side, x, y).expect("time harmonic").map(|v| (v * e).re)
    }

    fn material(&self, side: Side, _x: f64, _y: f64) -> Material {
        match side {
            Side::Plus => Material::constant(self.mu_plus, self.eps_plus),
            Side::Minus => Material::constant(self.mu_minus, self.eps_minus),
        }
    }

    fn angular_frequency(&self) -> Option<f64> {
        Some(self.omega)
    }

    fn phasor(&self, side: Side, x: f64, y: f64) -> Option<[Complex64; 3]> {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        let [hr, ht, ez] = self.polar_phasor(side, r, theta);
        let (s, c) = theta.sin_cos();
        Some([hr * c - ht * s, hr * s + ht * c, ez])
    }
}
