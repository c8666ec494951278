//! Dense space-time polynomials in local coordinates `(xi, eta, tau)`.

/// Monomials `xi^a eta^b tau^c` with `a + b + c <= degree`, graded order.
#[derive(Debug, Clone)]
pub struct MonomialSpace {
    degree: usize,
    exps: Vec<[usize; 3]>,
    lookup: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl MonomialSpace {
    pub fn new(degree: usize) -> Self {
        let mut exps = Vec::new();
        for total in 0..=degree {
            for a in (0..=total).rev() {
                for b in (0..=(total - a)).rev() {
                    exps.push([a, b, total - a - b]);
                }
            }
        }
        let d1 = degree + 1;
        let mut lookup = vec![NONE; d1 * d1 * d1];
        for (idx, e) in exps.iter().enumerate() {
            lookup[(e[0] * d1 + e[1]) * d1 + e[2]] = idx;
        }
        Self { degree, exps, lookup }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[[usize; 3]] {
        &self.exps
    }

    /// Index of `xi^a eta^b tau^c`, if it belongs to the space.
    pub fn index(&self, e: [usize; 3]) -> Option<usize> {
        if e[0] + e[1] + e[2] > self.degree {
            return None;
        }
        let d1 = self.degree + 1;
        let idx = self.lookup[(e[0] * d1 + e[1]) * d1 + e[2]];
        (idx != NONE).then_some(idx)
    }

    /// Values of every monomial at a point, in space order.
    pub fn eval_all(&self, p: [f64; 3]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    pub fn eval_into(&self, p: [f64; 3], out: &mut [f64]) {
        let d = self.degree;
        let mut pw = [[1.0f64; 8]; 3];
        for axis in 0..3 {
            for k in 1..=d {
                pw[axis][k] = pw[axis][k - 1] * p[axis];
            }
        }
        for (o, e) in out.iter_mut().zip(&self.exps) {
            *o = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
        }
    }

    /// Coefficients of `d^n/d(axis)^n` of a polynomial in this space.
    pub fn derivative(&self, coeffs: &[f64], axis: usize, order: usize) -> Vec<f64> {
        let mut out = coeffs.to_vec();
        for _ in 0..order {
            let mut next = vec![0.0; self.len()];
            for (idx, e) in self.exps.iter().enumerate() {
                if e[axis] == 0 || out[idx] == 0.0 {
                    continue;
                }
                let mut lower = *e;
                lower[axis] -= 1;
                let j = self.index(lower).expect("lowered monomial stays in space");
                next[j] += out[idx] * e[axis] as f64;
            }
            out = next;
        }
        out
    }

    /// Mixed partial derivative `d^a/dxi^a d^b/deta^b d^c/dtau^c`.
    pub fn mixed_derivative(&self, coeffs: &[f64], orders: [usize; 3]) -> Vec<f64> {
        let mut out = coeffs.to_vec();
        for (axis, &n) in orders.iter().enumerate() {
            if n > 0 {
                out = self.derivative(&out, axis, n);
            }
        }
        out
    }

    pub fn eval(&self, coeffs: &[f64], p: [f64; 3]) -> f64 {
        let m = self.eval_all(p);
        coeffs.iter().zip(&m).map(|(c, v)| c * v).sum()
    }

    /// Re-expresses a polynomial from another (possibly larger) space in this
    /// one. Panics if a nonzero coefficient does not fit.
    pub fn convert_from(&self, other: &MonomialSpace, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (idx, e) in other.exps.iter().enumerate() {
            if coeffs[idx] == 0.0 {
                continue;
            }
            let j = self
                .index(*e)
                .unwrap_or_else(|| panic!("monomial {e:?} does not fit in degree {}", self.degree));
            out[j] += coeffs[idx];
        }
        out
    }
}

/// Monomial coefficients of the Legendre polynomial `P_n`.
pub fn legendre_coefficients(n: usize) -> Vec<f64> {
    let mut p0 = vec![1.0];
    if n == 0 {
        return p0;
    }
    let mut p1 = vec![0.0, 1.0];
    for k in 2..=n {
        let mut p2 = vec![0.0; k + 1];
        for (i, c) in p1.iter().enumerate() {
            p2[i + 1] += (2 * k - 1) as f64 * c / k as f64;
        }
        for (i, c) in p0.iter().enumerate() {
            p2[i] -= (k - 1) as f64 * c / k as f64;
        }
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_a(xi) P_b(eta) P_c(tau)` expanded in `space`.
pub fn legendre_product(space: &MonomialSpace, orders: [usize; 3]) -> Vec<f64> {
    let la = legendre_coefficients(orders[0]);
    let lb = legendre_coefficients(orders[1]);
    let lc = legendre_coefficients(orders[2]);
    let mut out = vec![0.0; space.len()];
    for (a, ca) in la.iter().enumerate() {
        for (b, cb) in lb.iter().enumerate() {
            for (c, cc) in lc.iter().enumerate() {
                let v = ca * cb * cc;
                if v != 0.0 {
                    let j = space.index([a, b, c]).expect("product degree within space");
                    out[j] += v;
                }
            }
        }
    }
    out
}
