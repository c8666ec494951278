//! Level-set interfaces, side classification, and interface sampling.

mod patch;

pub use patch::{build_patch, FictitiousSegment, Patch, PatchOptions};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cfm::quadrature::gauss_legendre;
use crate::{Error, Result, Side};

/// A static interface given by a level set `phi`, with `phi < 0` inside
/// (the minus side) and the unit normal `grad phi / |grad phi|` pointing
/// toward the plus side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Interface {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// `r(theta) = base_radius (1 + amplitude cos(lobes theta + phase))`.
    Star {
        center: [f64; 2],
        base_radius: f64,
        amplitude: f64,
        lobes: u32,
        #[serde(default)]
        phase: f64,
    },
    /// Straight line through `point`; the minus side is where
    /// `(p - point) . normal <= 0`.
    Line {
        point: [f64; 2],
        normal: [f64; 2],
    },
}

/// A quadrature point on the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSample {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    /// Arc-length quadrature weight.
    pub weight: f64,
}

impl Interface {
    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Interface::Circle { center, radius }
    }

    pub fn star(center: [f64; 2], base_radius: f64, amplitude: f64, lobes: u32) -> Self {
        Interface::Star { center, base_radius, amplitude, lobes, phase: 0.0 }
    }

    pub fn five_star() -> Self {
        Self::star([0.5, 0.5], 0.25, 0.05, 5)
    }

    pub fn three_star() -> Self {
        Self::star([0.5, 0.5], 0.25, 0.05, 3)
    }

    pub fn line(point: [f64; 2], normal: [f64; 2]) -> Self {
        let n = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
        Interface::Line { point, normal: [normal[0] / n, normal[1] / n] }
    }

    pub fn level_set(&self, p: [f64; 2]) -> f64 {
        match *self {
            Interface::Circle { center, radius } => norm(sub(p, center)) - radius,
            Interface::Star { center, .. } => {
                let d = sub(p, center);
                let theta = d[1].atan2(d[0]);
                norm(d) - self.star_radius(theta).0
            }
            Interface::Line { point, normal } => dot(sub(p, point), unit(normal)),
        }
    }

    /// Analytic gradient of the level set.
    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Interface::Circle { center, .. } => {
                let d = sub(p, center);
                let r = norm(d);
                if r == 0.0 {
                    [0.0, 0.0]
                } else {
                    [d[0] / r, d[1] / r]
                }
            }
            Interface::Star { center, .. } => {
                let d = sub(p, center);
                let r = norm(d);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let theta = d[1].atan2(d[0]);
                let (_, dr) = self.star_radius(theta);
                let er = [d[0] / r, d[1] / r];
                let et = [-er[1], er[0]];
                // phi = r - R(theta): grad = e_r - R'(theta) e_theta / r
                [er[0] - dr * et[0] / r, er[1] - dr * et[1] / r]
            }
            Interface::Line { normal, .. } => unit(normal),
        }
    }

    /// Minus iff `phi(p) <= 0`.
    pub fn classify(&self, p: [f64; 2]) -> Side {
        if self.level_set(p) <= 0.0 {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    /// Unit normal pointing toward the plus side.
    pub fn normal(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let g = self.gradient(p);
        let n = norm(g);
        if n < 1e-12 {
            return Err(Error::DegenerateGradient(p[0], p[1]));
        }
        Ok([g[0] / n, g[1] / n])
    }

    fn star_radius(&self, theta: f64) -> (f64, f64) {
        match *self {
            Interface::Star { base_radius, amplitude, lobes, phase, .. } => {
                let m = lobes as f64;
                let arg = m * theta + phase;
                (base_radius * (1.0 + amplitude * arg.cos()), -base_radius * amplitude * m * arg.sin())
            }
            _ => unreachable!("star_radius on non-star interface"),
        }
    }

    /// Point on the curve for parameter `s` (angle for closed curves, arc
    /// length for lines) and the parametric speed `|c'(s)|`.
    pub fn curve_point(&self, s: f64) -> ([f64; 2], f64) {
        match *self {
            Interface::Circle { center, radius } => {
                ([center[0] + radius * s.cos(), center[1] + radius * s.sin()], radius)
            }
            Interface::Star { center, .. } => {
                let (r, dr) = self.star_radius(s);
                ([center[0] + r * s.cos(), center[1] + r * s.sin()], (r * r + dr * dr).sqrt())
            }
            Interface::Line { point, normal } => {
                let t = [-normal[1], normal[0]];
                ([point[0] + s * t[0], point[1] + s * t[1]], 1.0)
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, Interface::Line { .. })
    }

    /// Euclidean distance from `p` to the interface.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            Interface::Circle { .. } | Interface::Line { .. } => self.level_set(p).abs(),
            Interface::Star { .. } => {
                let dist = |s: f64| norm(sub(self.curve_point(s).0, p));
                let n = 720;
                let step = 2.0 * PI / n as f64;
                let (mut best, mut best_s) = (f64::INFINITY, 0.0);
                for k in 0..n {
                    let s = k as f64 * step;
                    let d = dist(s);
                    if d < best {
                        best = d;
                        best_s = s;
                    }
                }
                // golden-section refinement within the bracketing samples
                let (mut a, mut b) = (best_s - step, best_s + step);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let mut c = b - g * (b - a);
                let mut d = a + g * (b - a);
                let (mut fc, mut fd) = (dist(c), dist(d));
                for _ in 0..80 {
                    if fc < fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - g * (b - a);
                        fc = dist(c);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + g * (b - a);
                        fd = dist(d);
                    }
                }
                best.min(fc).min(fd)
            }
        }
    }

    /// Quadrature samples of the part of the interface inside the
    /// axis-aligned square with the given center and half side. The curve is
    /// split into arcs no longer than `max_arc`, each carrying a 3-point
    /// Gauss rule in the curve parameter.
    pub fn samples_in_box(&self, center: [f64; 2], half: f64, max_arc: f64) -> Vec<InterfaceSample> {
        let intervals = self.parameter_intervals_in_box(center, half);
        let (gx, gw) = gauss_legendre(3);
        let mut out = Vec::new();
        for (a, b) in intervals {
            let length = self.arc_length(a, b);
            let mut pieces = ((length / max_arc).ceil() as usize).max(1);
            // parameter-uniform splitting; refine until every piece is short enough
            loop {
                let ds = (b - a) / pieces as f64;
                let longest = (0..pieces)
                    .map(|k| self.arc_length(a + k as f64 * ds, a + (k + 1) as f64 * ds))
                    .fold(0.0f64, f64::max);
                if longest <= max_arc * (1.0 + 1e-12) {
                    break;
                }
                pieces *= 2;
            }
            let ds = (b - a) / pieces as f64;
            for k in 0..pieces {
                let s0 = a + k as f64 * ds;
                for (x, w) in gx.iter().zip(&gw) {
                    let s = s0 + 0.5 * ds * (1.0 + x);
                    let (p, speed) = self.curve_point(s);
                    let normal = self.normal(p).unwrap_or([0.0, 0.0]);
                    out.push(InterfaceSample { point: p, normal, weight: 0.5 * ds * w * speed });
                }
            }
        }
        out
    }

    /// Arc length between two curve parameters (composite 8-point Gauss).
    pub fn arc_length(&self, a: f64, b: f64) -> f64 {
        let (x, w) = gauss_legendre(8);
        let pieces = 4;
        let ds = (b - a) / pieces as f64;
        let mut sum = 0.0;
        for k in 0..pieces {
            let s0 = a + k as f64 * ds;
            for (xi, wi) in x.iter().zip(&w) {
                sum += 0.5 * ds * wi * self.curve_point(s0 + 0.5 * ds * (1.0 + xi)).1;
            }
        }
        sum
    }

    /// Parameter intervals on which the curve lies inside the square.
    pub fn parameter_intervals_in_box(&self, center: [f64; 2], half: f64) -> Vec<(f64, f64)> {
        let inside = |s: f64| {
            let (p, _) = self.curve_point(s);
            (p[0] - center[0]).abs().max((p[1] - center[1]).abs()) - half
        };
        match *self {
            Interface::Line { point, normal } => {
                // slab clipping of p(s) = point + s t
                let t = [-normal[1], normal[0]];
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for axis in 0..2 {
                    let a = center[axis] - half - point[axis];
                    let b = center[axis] + half - point[axis];
                    if t[axis].abs() < 1e-300 {
                        if a > 0.0 || b < 0.0 {
                            return Vec::new();
                        }
                    } else {
                        let (s0, s1) = (a / t[axis], b / t[axis]);
                        lo = lo.max(s0.min(s1));
                        hi = hi.min(s0.max(s1));
                    }
                }
                if hi > lo {
                    vec![(lo, hi)]
                } else {
                    Vec::new()
                }
            }
            _ => {
                let perimeter = self.arc_length(0.0, 2.0 * PI);
                let n = ((perimeter / (half / 32.0)).ceil() as usize).max(512);
                let step = 2.0 * PI / n as f64;
                let values: Vec<f64> = (0..n).map(|k| inside(k as f64 * step)).collect();
                let Some(start) = values.iter().position(|v| *v > 0.0) else {
                    return vec![(0.0, 2.0 * PI)];
                };
                let mut out = Vec::new();
                let mut open: Option<f64> = None;
                for m in 0..n {
                    let k0 = (start + m) % n;
                    let s0 = (start + m) as f64 * step;
                    let s1 = s0 + step;
                    let v0 = values[k0];
                    let v1 = values[(k0 + 1) % n];
                    if (v0 > 0.0) != (v1 > 0.0) {
                        let root = bisect(&inside, s0, s1, 1e-15);
                        if v0 > 0.0 {
                            open = Some(root);
                        } else if let Some(a) = open.take() {
                            out.push((a, root));
                        }
                    }
                }
                out
            }
        }
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= tol * (1.0 + m.abs()) {
            return m;
        }
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: [f64; 2]) -> [f64; 2] {
    let n = norm(a);
    [a[0] / n, a[1] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_circle_and_star() {
        let c = Interface::circle([0.0, 0.0], 0.6);
        assert_eq!(c.classify([0.0, 0.0]), Side::Minus);
        assert_eq!(c.classify([1.0, 1.0]), Side::Plus);
        assert_eq!(c.classify([0.6, 0.0]), Side::Minus, "tie goes to the minus side");
        assert_eq!(Interface::five_star().classify([0.5, 0.5]), Side::Minus);
    }

    #[test]
    fn circle_normals_are_radial() {
        let c = Interface::circle([0.0, 0.0], 0.6);
        let n = c.normal([0.6, 0.0]).unwrap();
        assert!((n[0] - 1.0).abs() < 1e-15 && n[1].abs() < 1e-15);
        let n = c.normal([0.0, -0.6]).unwrap();
        assert!(n[0].abs() < 1e-15 && (n[1] + 1.0).abs() < 1e-15);
        assert!(matches!(c.normal([0.0, 0.0]), Err(Error::DegenerateGradient(..))));
    }

    #[test]
    fn star_gradient_matches_central_differences() {
        let s = Interface::five_star();
        for theta in [0.0, 0.3, 1.1, 2.5, 4.0] {
            let (p, _) = s.curve_point(theta);
            let g = s.gradient(p);
            let e = 1e-6;
            let fd = [
                (s.level_set([p[0] + e, p[1]]) - s.level_set([p[0] - e, p[1]])) / (2.0 * e),
                (s.level_set([p[0], p[1] + e]) - s.level_set([p[0], p[1] - e])) / (2.0 * e),
            ];
            assert!((g[0] - fd[0]).abs() < 1e-8 && (g[1] - fd[1]).abs() < 1e-8, "theta={theta}");
            let n = s.normal(p).unwrap();
            assert!((norm(n) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_line_through_box_has_length_sqrt2_l() {
        let l = 0.35;
        let line = Interface::line([0.1, 0.2], [1.0, -1.0]);
        let samples = line.samples_in_box([0.1, 0.2], 0.5 * l, 0.025);
        let total: f64 = samples.iter().map(|s| s.weight).sum();
        assert!((total - 2f64.sqrt() * l).abs() < 1e-10);
    }

    #[test]
    fn circle_arc_weights_sum_to_arc_length() {
        let c = Interface::circle([0.0, 0.0], 0.6);
        // box centered on the curve: chord geometry gives the exact arc length
        let center = [0.6, 0.0];
        let half = 0.175;
        let samples = c.samples_in_box(center, half, 0.025);
        let total: f64 = samples.iter().map(|s| s.weight).sum();
        // the circle leaves the box through the top and bottom edges at y = +-half
        let exact = 2.0 * 0.6 * (half / 0.6).asin();
        assert!((total - exact).abs() < 1e-10, "{total} vs {exact}");
        for s in &samples {
            assert!(c.level_set(s.point).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_to_star_matches_sampled_minimum() {
        let s = Interface::three_star();
        let p = [0.52, 0.31];
        let brute = (0..200_000)
            .map(|k| norm(sub(s.curve_point(k as f64 * 2.0 * PI / 200_000.0).0, p)))
            .fold(f64::INFINITY, f64::min);
        assert!((s.distance(p) - brute).abs() < 1e-8);
    }
}
