//! Quadrature of the correction-function functional.
//!
//! Every term of the functional is a weighted integral of a squared affine
//! expression `row . c - g`. [`for_each_constraint`] enumerates these at the
//! quadrature points once; the matrix, the data operator, the inhomogeneous
//! right-hand side, and the functional value itself are all accumulated from
//! the same enumeration.

use std::collections::HashMap;

use super::basis::{apply_operator, Component, DivFreePolyBasis};
use super::interp::FdInterpolant;
use super::linalg::DenseMatrix;
use super::quadrature::gauss_legendre;
use super::CfmConfig;
use crate::analytic::ReferenceSolution;
use crate::fdtd::{FieldHistory, Phase};
use crate::geometry::Patch;
use crate::grid::{FieldKind, StaggeredGrid2D};
use crate::{Error, Result, Side};

const HX: usize = 0;
const HY: usize = 1;
const EZ: usize = 2;

/// Basis plus the operator matrices used by assembly.
#[derive(Debug)]
pub struct CfmContext {
    pub basis: DivFreePolyBasis,
    value: [Vec<f64>; 3],
    d_xi: [Vec<f64>; 3],
    d_eta: [Vec<f64>; 3],
    d_tau: [Vec<f64>; 3],
}

pub(crate) fn component(field: FieldKind) -> Component {
    match field {
        FieldKind::Hx => Component::Hx,
        FieldKind::Hy => Component::Hy,
        FieldKind::Ez => Component::Ez,
    }
}

impl CfmContext {
    pub fn new(degree: usize) -> Result<Self> {
        let basis = DivFreePolyBasis::new(degree)?;
        let ops = |orders: [usize; 3]| Component::ALL.map(|c| basis.operator(c, orders));
        Ok(Self {
            value: ops([0, 0, 0]),
            d_xi: ops([1, 0, 0]),
            d_eta: ops([0, 1, 0]),
            d_tau: ops([0, 0, 1]),
            basis,
        })
    }

    pub fn side_len(&self) -> usize {
        self.basis.side_len()
    }

    pub fn len(&self) -> usize {
        2 * self.basis.side_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn apply(&self, op: &[f64], mono: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.side_len()];
        apply_operator(op, mono, &mut out);
        out
    }

    /// Values of `field` for every side unknown at a local point.
    pub fn value_row(&self, field: FieldKind, local: [f64; 3]) -> Vec<f64> {
        let mono = self.basis.space().eval_all(local);
        self.apply(&self.value[component(field).index()], &mono)
    }
}

/// Affine map between the patch box times `[t_end - time_length, t_end]`
/// and `[-1, 1]^3`. Times are relative to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub center: [f64; 2],
    pub half_width: f64,
    pub time_length: f64,
}

impl LocalFrame {
    pub fn of(patch: &Patch) -> Self {
        Self { center: patch.center, half_width: patch.half_width, time_length: patch.time_length }
    }

    pub fn to_local(&self, x: f64, y: f64, t_rel: f64) -> [f64; 3] {
        [
            (x - self.center[0]) / self.half_width,
            (y - self.center[1]) / self.half_width,
            2.0 * t_rel / self.time_length + 1.0,
        ]
    }

    pub fn time_of(&self, tau: f64) -> f64 {
        0.5 * self.time_length * (tau - 1.0)
    }

    /// `[d/dx, d/dy, d/dt]` in local units.
    pub fn scales(&self) -> [f64; 3] {
        [1.0 / self.half_width, 1.0 / self.half_width, 2.0 / self.time_length]
    }
}

/// Unknowns covered by a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Block {
    Side(Side),
    Both,
}

impl Block {
    fn offset(self, side_len: usize) -> usize {
        match self {
            Block::Side(Side::Minus) => side_len,
            _ => 0,
        }
    }
}

/// Right-hand side of a constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Target {
    Zero,
    /// Source term `eq` (0: f1x, 1: f1y, 2: f2) of `side`.
    Source { side: Side, eq: usize, x: f64, y: f64, t_rel: f64 },
    /// Interface datum `cond` (0: Ez, 1: tangential H, 2: normal mu H).
    Interface { cond: usize, x: f64, y: f64, normal: [f64; 2], t_rel: f64 },
    /// Interpolated FD value on fictitious segment `segment` at curve
    /// coordinate `s`.
    Fictitious { segment: usize, s: f64, t_rel: f64 },
}

pub(crate) struct Constraint<'a> {
    pub weight: f64,
    pub block: Block,
    pub row: &'a [f64],
    pub target: Target,
}

/// Enumerates every term of the functional at its quadrature points.
pub(crate) fn for_each_constraint(
    ctx: &CfmContext,
    patch: &Patch,
    config: &CfmConfig,
    dt: f64,
    reference: &dyn ReferenceSolution,
    mut f: impl FnMut(&Constraint),
) {
    let frame = LocalFrame::of(patch);
    let [sx, sy, st] = frame.scales();
    let k = ctx.basis.degree();
    let space = ctx.basis.space();
    let mut mono = vec![0.0; space.len()];
    let n_side = ctx.side_len();

    // volume residuals, weight l_h / 2 times the physical measure
    let (gx, gw) = gauss_legendre(config.volume_points.unwrap_or(k + 2));
    let volume_scale = patch.half_width * patch.half_width * patch.half_width * 0.5 * patch.time_length;
    for side in Side::BOTH {
        let sources = reference.has_sources(side);
        for (a, wa) in gx.iter().zip(&gw) {
            for (b, wb) in gx.iter().zip(&gw) {
                let x = patch.center[0] + patch.half_width * a;
                let y = patch.center[1] + patch.half_width * b;
                let m = reference.material(side, x, y);
                for (c, wc) in gx.iter().zip(&gw) {
                    space.eval_into([*a, *b, *c], &mut mono);
                    let weight = volume_scale * wa * wb * wc;
                    let t_rel = frame.time_of(*c);
                    let dt_hx = ctx.apply(&ctx.d_tau[HX], &mono);
                    let dt_hy = ctx.apply(&ctx.d_tau[HY], &mono);
                    let dt_ez = ctx.apply(&ctx.d_tau[EZ], &mono);
                    let dx_ez = ctx.apply(&ctx.d_xi[EZ], &mono);
                    let dy_ez = ctx.apply(&ctx.d_eta[EZ], &mono);
                    let dx_hy = ctx.apply(&ctx.d_xi[HY], &mono);
                    let dy_hx = ctx.apply(&ctx.d_eta[HX], &mono);
                    let mut rows = [vec![0.0; n_side], vec![0.0; n_side], vec![0.0; n_side]];
                    for i in 0..n_side {
                        rows[0][i] = m.mu * st * dt_hx[i] + sy * dy_ez[i];
                        rows[1][i] = m.mu * st * dt_hy[i] - sx * dx_ez[i];
                        rows[2][i] = m.eps * st * dt_ez[i] - sx * dx_hy[i] + sy * dy_hx[i];
                    }
                    for (eq, row) in rows.iter().enumerate() {
                        let target = if sources { Target::Source { side, eq, x, y, t_rel } } else { Target::Zero };
                        f(&Constraint { weight, block: Block::Side(side), row, target });
                    }
                    // div(mu H) = grad(mu) . H for a divergence-free H
                    if m.grad_mu != [0.0, 0.0] {
                        let hx = ctx.apply(&ctx.value[HX], &mono);
                        let hy = ctx.apply(&ctx.value[HY], &mono);
                        let row: Vec<f64> = hx.iter().zip(&hy).map(|(p, q)| m.grad_mu[0] * p + m.grad_mu[1] * q).collect();
                        f(&Constraint { weight, block: Block::Side(side), row: &row, target: Target::Zero });
                    }
                }
            }
        }
    }

    // interface conditions, weight c_p / 2
    let (tx, tw) = gauss_legendre(config.time_points.unwrap_or(k + 1));
    let data = reference.has_interface_data();
    let mut row = vec![0.0; 2 * n_side];
    for sample in &patch.samples {
        let [x, y] = sample.point;
        let [nx, ny] = sample.normal;
        let mu = [reference.material(Side::Plus, x, y).mu, reference.material(Side::Minus, x, y).mu];
        for (c, wc) in tx.iter().zip(&tw) {
            let local = frame.to_local(x, y, frame.time_of(*c));
            space.eval_into(local, &mut mono);
            let weight = 0.5 * config.c_p * sample.weight * 0.5 * patch.time_length * wc;
            let t_rel = frame.time_of(*c);
            let hx = ctx.apply(&ctx.value[HX], &mono);
            let hy = ctx.apply(&ctx.value[HY], &mono);
            let ez = ctx.apply(&ctx.value[EZ], &mono);
            for cond in 0..3 {
                for (s, sign) in [(0, 1.0), (1, -1.0)] {
                    for i in 0..n_side {
                        row[s * n_side + i] = sign
                            * match cond {
                                0 => ez[i],
                                1 => nx * hy[i] - ny * hx[i],
                                _ => mu[s] * (nx * hx[i] + ny * hy[i]),
                            };
                    }
                }
                let target = if data {
                    Target::Interface { cond, x, y, normal: sample.normal, t_rel }
                } else {
                    Target::Zero
                };
                f(&Constraint { weight, block: Block::Both, row: &row, target });
            }
        }
    }

    // fictitious interfaces, weight c_f / (2 N)
    let c_f = config.alpha * dt;
    let (ux, uw) = gauss_legendre(config.segment_points.unwrap_or(k + 2));
    for (sid, seg) in patch.segments.iter().enumerate() {
        let electric = seg.constrains_electric();
        let count = patch.segment_count(seg.side, electric) as f64;
        let half_len = 0.5 * seg.length();
        let op = &ctx.value[component(seg.field).index()];
        let (s0, s1) = (seg.start[seg.axis], seg.end[seg.axis]);
        for (u, wu) in ux.iter().zip(&uw) {
            let s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * u;
            let (x, y) = if seg.axis == 0 { (s, seg.start[1]) } else { (seg.start[0], s) };
            for (c, wc) in tx.iter().zip(&tw) {
                let t_rel = frame.time_of(*c);
                space.eval_into(frame.to_local(x, y, t_rel), &mut mono);
                let row = ctx.apply(op, &mono);
                let weight = 0.5 * c_f / count * half_len * wu * 0.5 * patch.time_length * wc;
                f(&Constraint {
                    weight,
                    block: Block::Side(seg.side),
                    row: &row,
                    target: Target::Fictitious { segment: sid, s, t_rel },
                });
            }
        }
    }
}

/// `M = 2 sum w row row^T` (Hessian of the functional).
pub fn assemble_matrix(ctx: &CfmContext, patch: &Patch, config: &CfmConfig, dt: f64, reference: &dyn ReferenceSolution) -> DenseMatrix {
    let n = ctx.len();
    let ns = ctx.side_len();
    let mut m = DenseMatrix::zeros(n);
    for_each_constraint(ctx, patch, config, dt, reference, |c| {
        let off = c.block.offset(ns);
        let w2 = 2.0 * c.weight;
        let len = c.row.len();
        for a in 0..len {
            let ra = w2 * c.row[a];
            if ra == 0.0 {
                continue;
            }
            for b in a..len {
                m[(off + a, off + b)] += ra * c.row[b];
            }
        }
    });
    m.symmetrize_from_upper();
    m
}

/// A history value read by the fictitious-interface interpolants: lattice
/// index of a node of `field` and how many levels back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DataItem {
    pub field: FieldKind,
    pub i: isize,
    pub j: isize,
    pub level: usize,
}

/// Time of history level `level` of `field` relative to the correction time.
pub fn level_time(field: FieldKind, phase: Phase, level: usize, dt: f64) -> f64 {
    let own = matches!((field, phase), (FieldKind::Ez, Phase::Electric) | (FieldKind::Hx | FieldKind::Hy, Phase::Magnetic));
    -(level as f64 + if own { 0.0 } else { 0.5 }) * dt
}

/// Data items of a patch for one phase and, per segment, the item indices
/// of its `node x level` samples (space-major).
#[derive(Debug, Clone)]
pub struct DataLayout {
    pub items: Vec<DataItem>,
    pub segment_items: Vec<Vec<usize>>,
    pub levels: usize,
    pub phase: Phase,
}

impl DataLayout {
    pub fn new(patch: &Patch, phase: Phase, levels: usize) -> Self {
        let mut index: HashMap<DataItem, usize> = HashMap::new();
        let mut items = Vec::new();
        let mut segment_items = Vec::new();
        for seg in &patch.segments {
            let mut ids = Vec::new();
            for &(i, j) in &seg.nodes {
                for level in 0..levels {
                    let item = DataItem { field: seg.field, i, j, level };
                    let id = *index.entry(item).or_insert_with(|| {
                        items.push(item);
                        items.len() - 1
                    });
                    ids.push(id);
                }
            }
            segment_items.push(ids);
        }
        Self { items, segment_items, levels, phase }
    }

    /// Interpolation weights of segment `sid`'s samples at `(s, t_rel)`.
    pub fn weights(&self, patch: &Patch, grid: &StaggeredGrid2D, sid: usize, s: f64, t_rel: f64) -> Vec<f64> {
        let seg = &patch.segments[sid];
        let space: Vec<f64> = seg.nodes.iter().map(|&(i, j)| grid.position(seg.field, i, j)[seg.axis]).collect();
        let time: Vec<f64> = (0..self.levels).map(|l| level_time(seg.field, self.phase, l, grid.dt)).collect();
        FdInterpolant::weights(&space, &time, s, t_rel)
    }

    /// Reads the item values from the history.
    pub fn gather(&self, grid: &StaggeredGrid2D, history: &FieldHistory, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        for item in &self.items {
            let (_, arr) = history.level(item.field, item.level).ok_or_else(|| {
                Error::SolverBreakdown(format!("history lacks level {} of {:?}", item.level, item.field))
            })?;
            let (i, j) = grid.wrap(item.i, item.j);
            out.push(arr.get(i, j));
        }
        Ok(())
    }
}

/// Value of a known (non-fictitious) target at absolute time `t_end + t_rel`.
pub(crate) fn known_value(reference: &dyn ReferenceSolution, target: &Target, t_end: f64) -> f64 {
    match *target {
        Target::Zero | Target::Fictitious { .. } => 0.0,
        Target::Source { side, eq, x, y, t_rel } => reference.sources(side, x, y, t_end + t_rel)[eq],
        Target::Interface { cond, x, y, normal, t_rel } => reference.interface_data([x, y], normal, t_end + t_rel)[cond],
    }
}

/// Assembled functional of one patch for one phase at one time: `M`, `b`,
/// and the constant term, so that `J(c) = c^T M c / 2 - b^T c + j0`.
pub struct FunctionalSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub constant: f64,
}

/// Assembles `M` and `b` with the FD data currently in `history`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_system(
    ctx: &CfmContext,
    patch: &Patch,
    config: &CfmConfig,
    grid: &StaggeredGrid2D,
    reference: &dyn ReferenceSolution,
    layout: &DataLayout,
    data: &[f64],
    t_end: f64,
) -> FunctionalSystem {
    let n = ctx.len();
    let ns = ctx.side_len();
    let mut m = DenseMatrix::zeros(n);
    let mut b = vec![0.0; n];
    let mut constant = 0.0;
    for_each_constraint(ctx, patch, config, grid.dt, reference, |c| {
        let off = c.block.offset(ns);
        let g = match c.target {
            Target::Fictitious { segment, s, t_rel } => {
                let w = layout.weights(patch, grid, segment, s, t_rel);
                w.iter().zip(&layout.segment_items[segment]).map(|(w, id)| w * data[*id]).sum()
            }
            ref t => known_value(reference, t, t_end),
        };
        let w2 = 2.0 * c.weight;
        for a in 0..c.row.len() {
            let ra = w2 * c.row[a];
            b[off + a] += ra * g;
            for bb in a..c.row.len() {
                m[(off + a, off + bb)] += ra * c.row[bb];
            }
        }
        constant += c.weight * g * g;
    });
    m.symmetrize_from_upper();
    FunctionalSystem { matrix: m, rhs: b, constant }
}

/// Evaluates the functional directly by quadrature (no matrix).
#[allow(clippy::too_many_arguments)]
pub fn evaluate_functional(
    ctx: &CfmContext,
    patch: &Patch,
    config: &CfmConfig,
    grid: &StaggeredGrid2D,
    reference: &dyn ReferenceSolution,
    layout: &DataLayout,
    data: &[f64],
    t_end: f64,
    coeffs: &[f64],
) -> f64 {
    let ns = ctx.side_len();
    let mut j = 0.0;
    for_each_constraint(ctx, patch, config, grid.dt, reference, |c| {
        let off = c.block.offset(ns);
        let g = match c.target {
            Target::Fictitious { segment, s, t_rel } => {
                let w = layout.weights(patch, grid, segment, s, t_rel);
                w.iter().zip(&layout.segment_items[segment]).map(|(w, id)| w * data[*id]).sum()
            }
            ref t => known_value(reference, t, t_end),
        };
        let r: f64 = c.row.iter().zip(&coeffs[off..]).map(|(a, b)| a * b).sum::<f64>() - g;
        j += c.weight * r * r;
    });
    j
}
