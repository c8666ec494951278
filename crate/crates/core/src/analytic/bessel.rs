//! Integer-order Bessel and Hankel functions of real argument.
//!
//! `J_n` comes from Miller's downward recurrence normalized with
//! `J_0 + 2 sum J_2k = 1`. `Y_0` and `Y_1` are Neumann series over the same
//! `J` values and `Y_n` follows by upward recurrence, which is stable for the
//! second kind.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `J_0(x) .. J_{n_max}(x)`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let (mut values, scale) = miller(n_max.max(1), x.abs());
    values.truncate(n_max + 1);
    for (o, v) in out.iter_mut().zip(values) {
        *o = v * scale;
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Unnormalized downward recurrence from well above `max(n, x)`; returns the
/// raw sequence for `0..=start` and the normalization factor.
fn miller(n_max: usize, x: f64) -> (Vec<f64>, f64) {
    let top = n_max.max(x.ceil() as usize);
    let mut start = top + 30 + (10.0 * x.sqrt()) as usize;
    start += start % 2;
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300_f64.sqrt();
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in j.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * j[k];
    }
    j.truncate(start + 1);
    (j, 1.0 / norm)
}

pub fn bessel_j(n: i32, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_all(m, x)[m];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `Y_0(x) .. Y_{n_max}(x)` for `x > 0`, together with the matching `J`.
pub fn bessel_jy_all(n_max: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Bessel Y needs x > 0, got {x}")));
    }
    let (raw, scale) = miller(n_max.max(1), x);
    let j: Vec<f64> = raw.iter().map(|v| v * scale).collect();
    let log_term = (0.5 * x).ln() + EULER_GAMMA;

    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / PI * log_term * j[0] - 4.0 / PI * s0;
    let y1 = -2.0 / PI * (j[0] / x - log_term * j[1]) + 2.0 / PI * s1;

    let mut y = vec![0.0; n_max + 1];
    y[0] = y0;
    if n_max >= 1 {
        y[1] = y1;
    }
    for n in 1..n_max {
        y[n + 1] = 2.0 * n as f64 / x * y[n] - y[n - 1];
    }
    let mut jn = j;
    jn.truncate(n_max + 1);
    jn.resize(n_max + 1, 0.0);
    Ok((jn, y))
}

pub fn bessel_y(n: i32, x: f64) -> Result<f64> {
    let m = n.unsigned_abs() as usize;
    let v = bessel_jy_all(m, x)?.1[m];
    Ok(if n < 0 && m % 2 == 1 { -v } else { v })
}

/// Hankel function of the second kind, `J_n - i Y_n`.
pub fn hankel2(n: i32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(bessel_j(n, x), -bessel_y(n, x)?))
}

/// Values and first derivatives of `J_n`, `n = 0..=n_max`, using
/// `J_n' = (J_{n-1} - J_{n+1}) / 2` and `J_{-1} = -J_1`.
pub fn bessel_j_with_derivatives(n_max: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let j = bessel_j_all(n_max + 1, x);
    let d = (0..=n_max).map(|n| derivative_from(&j, n)).collect();
    (j[..=n_max].to_vec(), d)
}

/// Values and first derivatives of `H^(2)_n`, `n = 0..=n_max`.
pub fn hankel2_with_derivatives(n_max: usize, x: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let (j, y) = bessel_jy_all(n_max + 1, x)?;
    let h: Vec<Complex64> = j.iter().zip(&y).map(|(a, b)| Complex64::new(*a, -*b)).collect();
    let d = (0..=n_max)
        .map(|n| {
            let lower = if n == 0 { -h[1] } else { h[n - 1] };
            0.5 * (lower - h[n + 1])
        })
        .collect();
    Ok((h[..=n_max].to_vec(), d))
}

fn derivative_from(j: &[f64], n: usize) -> f64 {
    let lower = if n == 0 { -j[1] } else { j[n - 1] };
    0.5 * (lower - j[n + 1])
}
