//! Divergence-free space-time polynomial basis for the TMz correction
//! functions.
//!
//! `E_z` is expanded in the full space `P^k(xi, eta, tau)`. The in-plane
//! magnetic field is expanded as curls of stream functions,
//! `(H_x, H_y) = (d psi/d eta, -d psi/d xi)`, which makes every basis element
//! exactly divergence-free in space. Stream functions are products of
//! Legendre polynomials `P_a(xi) P_b(eta) P_c(tau)` with `a + b >= 1` and
//! `a + b + c <= k + 1`; their curls are linearly independent and span the
//! divergence-free subspace of `[P^k]^2`.

use super::linalg::matrix_rank;
use super::poly::{legendre_product, MonomialSpace};
use crate::{Error, Result};

/// Field component of a one-sided expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Hx,
    Hy,
    Ez,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Hx, Component::Hy, Component::Ez];

    pub fn index(self) -> usize {
        match self {
            Component::Hx => 0,
            Component::Hy => 1,
            Component::Ez => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DivFreePolyBasis {
    k: usize,
    space: MonomialSpace,
    h_basis: Vec<[Vec<f64>; 2]>,
    e_basis: Vec<Vec<f64>>,
}

/// Dimension of the divergence-free subspace of `[P^k(x, y, t)]^2`.
pub fn divergence_free_dimension(k: usize) -> usize {
    (0..=k).map(|m| (m + 2) * (m + 3) / 2 - 1).sum()
}

impl DivFreePolyBasis {
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::UnsupportedDegree(k));
        }
        let space = MonomialSpace::new(k);
        let stream_space = MonomialSpace::new(k + 1);

        let mut e_basis = Vec::new();
        for e in space.exponents() {
            e_basis.push(legendre_product(&space, *e));
        }

        let mut h_basis = Vec::new();
        for e in stream_space.exponents() {
            if e[0] + e[1] == 0 {
                continue;
            }
            let psi = legendre_product(&stream_space, *e);
            let hx = stream_space.derivative(&psi, 1, 1);
            let hy: Vec<f64> = stream_space.derivative(&psi, 0, 1).iter().map(|v| -v).collect();
            h_basis.push([space.convert_from(&stream_space, &hx), space.convert_from(&stream_space, &hy)]);
        }

        let basis = Self { k, space, h_basis, e_basis };
        let rank = basis.h_gram_rank();
        if rank != basis.h_basis.len() {
            return Err(Error::SolverBreakdown(format!(
                "divergence-free basis is rank deficient ({rank} < {})",
                basis.h_basis.len()
            )));
        }
        Ok(basis)
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn space(&self) -> &MonomialSpace {
        &self.space
    }

    pub fn h_len(&self) -> usize {
        self.h_basis.len()
    }

    pub fn e_len(&self) -> usize {
        self.e_basis.len()
    }

    /// Unknowns of one side: H coefficients first, then E coefficients.
    pub fn side_len(&self) -> usize {
        self.h_len() + self.e_len()
    }

    pub fn h_element(&self, i: usize) -> &[Vec<f64>; 2] {
        &self.h_basis[i]
    }

    pub fn e_element(&self, i: usize) -> &[f64] {
        &self.e_basis[i]
    }

    /// Rank of the Gram matrix of the H-basis coefficient vectors.
    pub fn h_gram_rank(&self) -> usize {
        let n = self.h_basis.len();
        let flat: Vec<Vec<f64>> = self.h_basis.iter().map(|[x, y]| x.iter().chain(y).copied().collect()).collect();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] = flat[i].iter().zip(&flat[j]).map(|(a, b)| a * b).sum();
            }
        }
        matrix_rank(n, n, &gram, 1e-12)
    }

    /// Symbolic divergence `d/dxi H_x + d/deta H_y` of H-basis element `i`.
    pub fn divergence(&self, i: usize) -> Vec<f64> {
        let [hx, hy] = &self.h_basis[i];
        let dx = self.space.derivative(hx, 0, 1);
        let dy = self.space.derivative(hy, 1, 1);
        dx.iter().zip(&dy).map(|(a, b)| a + b).collect()
    }

    /// Operator matrix (`side_len x n_mono`, row-major) mapping monomial values
    /// at a point to the derivative `orders` (local coordinates) of
    /// `component` for every side unknown.
    pub fn operator(&self, component: Component, orders: [usize; 3]) -> Vec<f64> {
        let nm = self.space.len();
        let mut op = vec![0.0; self.side_len() * nm];
        match component {
            Component::Hx | Component::Hy => {
                let c = if component == Component::Hx { 0 } else { 1 };
                for (i, el) in self.h_basis.iter().enumerate() {
                    let d = self.space.mixed_derivative(&el[c], orders);
                    op[i * nm..(i + 1) * nm].copy_from_slice(&d);
                }
            }
            Component::Ez => {
                let off = self.h_len();
                for (i, el) in self.e_basis.iter().enumerate() {
                    let d = self.space.mixed_derivative(el, orders);
                    op[(off + i) * nm..(off + i + 1) * nm].copy_from_slice(&d);
                }
            }
        }
        op
    }
}

/// Applies an operator matrix to monomial values: `out[j] = sum_m op[j][m] mono[m]`.
pub fn apply_operator(op: &[f64], mono: &[f64], out: &mut [f64]) {
    let nm = mono.len();
    for (o, row) in out.iter_mut().zip(op.chunks_exact(nm)) {
        *o = row.iter().zip(mono).map(|(a, b)| a * b).sum();
    }
}
