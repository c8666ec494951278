//! Space-time Lagrange interpolants of finite-difference data on fictitious
//! segments.

use crate::{Error, Result};

/// Lagrange basis weights of `nodes` at `x`.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|a| {
            nodes
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != a)
                .map(|(_, xb)| (x - xb) / (nodes[a] - xb))
                .product()
        })
        .collect()
}

/// Tensor-product interpolant through values at `space x time` nodes,
/// stored space-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FdInterpolant {
    space: Vec<f64>,
    time: Vec<f64>,
    values: Vec<f64>,
}

impl FdInterpolant {
    pub fn new(space: Vec<f64>, time: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if space.len() < 3 {
            return Err(Error::Config(format!("spatial interpolant needs degree >= 2, got {} nodes", space.len())));
        }
        if time.is_empty() || values.len() != space.len() * time.len() {
            return Err(Error::Config("interpolant data does not match its nodes".into()));
        }
        Ok(Self { space, time, values })
    }

    /// Weight of sample `(a, b)` in the value at `(s, t)`, space-major.
    pub fn weights(space: &[f64], time: &[f64], s: f64, t: f64) -> Vec<f64> {
        let ws = lagrange_weights(space, s);
        let wt = lagrange_weights(time, t);
        ws.iter().flat_map(|a| wt.iter().map(move |b| a * b)).collect()
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        Self::weights(&self.space, &self.time, s, t).iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }
}
