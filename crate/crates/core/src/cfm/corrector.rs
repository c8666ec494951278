//! Correction provider backed by per-patch correction functions.
//!
//! Patch matrices do not depend on time, so every patch is factored once.
//! The jumps at a patch's targets are linear in the finite-difference data
//! read by its fictitious interfaces and in the known source and interface
//! data; both maps are precomputed, which reduces a step to small dense
//! products.

use std::sync::Arc;

use rayon::prelude::*;

use super::assemble::{assemble_matrix, assemble_system, for_each_constraint, known_value, Block, CfmContext, DataLayout, LocalFrame, Target};
use super::{finish_solve, CfmConfig, CorrectionFunction, RegularizedSolver};
use crate::analytic::ReferenceSolution;
use crate::fdtd::{CorrectionProvider, FieldHistory, Phase, StencilPlan};
use crate::geometry::{build_patch, Patch};
use crate::grid::{FieldKind, NodeIndex, StaggeredGrid2D};
use crate::{Error, Result, Side};

const PHASES: [Phase; 2] = [Phase::Electric, Phase::Magnetic];

fn phase_index(phase: Phase) -> usize {
    match phase {
        Phase::Electric => 0,
        Phase::Magnetic => 1,
    }
}

/// Precomputed jump map of one patch for one phase.
struct PhaseKernel {
    /// Indices into the plan's target list.
    targets: Vec<usize>,
    layout: DataLayout,
    /// `targets x items`, row-major.
    kernel: Vec<f64>,
    /// Known-data constraints and their effect on the targets' jumps.
    responses: Vec<(Target, Vec<f64>)>,
}

struct PatchSolver {
    patch: Patch,
    solver: RegularizedSolver,
    matrix: super::linalg::DenseMatrix,
    phases: [PhaseKernel; 2],
}

struct Shared {
    reference: Arc<dyn ReferenceSolution>,
    ctx: CfmContext,
    config: CfmConfig,
    grid: StaggeredGrid2D,
    patches: Vec<PatchSolver>,
}

/// Jumps from correction functions, one patch per interface node group.
/// Cloning shares the precomputed patches.
#[derive(Clone)]
pub struct CfmCorrector {
    shared: Arc<Shared>,
    scratch: Vec<f64>,
}

/// Ez nodes with a horizontal or vertical neighbor on the other side.
fn patch_centers(grid: &StaggeredGrid2D, reference: &dyn ReferenceSolution) -> Vec<NodeIndex> {
    let interface = reference.interface();
    let (ni, nj) = grid.extent(FieldKind::Ez);
    let mut out = Vec::new();
    for i in 0..ni as isize {
        for j in 0..nj as isize {
            if !grid.is_active(FieldKind::Ez, i, j) {
                continue;
            }
            let side = interface.classify(grid.position(FieldKind::Ez, i, j));
            let crosses = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|(di, dj)| interface.classify(grid.position(FieldKind::Ez, i + di, j + dj)) != side);
            if crosses {
                out.push(NodeIndex::new(FieldKind::Ez, i, j));
            }
        }
    }
    out
}

impl CfmCorrector {
    /// Builds and factors every patch needed by `plan`.
    pub fn new(reference: Arc<dyn ReferenceSolution>, grid: &StaggeredGrid2D, plan: &StencilPlan, levels: usize, config: CfmConfig) -> Result<Self> {
        config.validate(grid.dt)?;
        let ctx = CfmContext::new(config.degree)?;
        let centers = patch_centers(grid, reference.as_ref());
        let positions: Vec<[f64; 2]> = centers.iter().map(|c| grid.position(c.field, c.i, c.j)).collect();

        let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
        for (k, t) in plan.targets.iter().enumerate() {
            let p = grid.position(t.field, t.i, t.j);
            let nearest = positions
                .iter()
                .enumerate()
                .map(|(c, q)| (c, (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(c, _)| c)
                .ok_or(Error::MissingCorrection(k))?;
            assigned[nearest].push(k);
        }

        let options = config.patch_options(grid);
        let work: Vec<(NodeIndex, Vec<usize>)> = centers.into_iter().zip(assigned).filter(|(_, t)| !t.is_empty()).collect();
        let patches = work
            .into_par_iter()
            .enumerate()
            .map(|(id, (center, targets))| {
                let patch = build_patch(reference.interface(), grid, center, &options, id)?;
                for &k in &targets {
                    let t = plan.targets[k];
                    let p = grid.position(t.field, t.i, t.j);
                    if !patch.contains(p) {
                        return Err(Error::OutOfPatch { x: p[0], y: p[1], t: 0.0 });
                    }
                }
                setup_patch(&ctx, patch, &config, grid, reference.as_ref(), plan, &targets, levels)
            })
            .collect::<Result<Vec<_>>>()?;
        log::debug!("cfm: {} patches for {} targets", patches.len(), plan.targets.len());

        Ok(Self {
            shared: Arc::new(Shared { reference, ctx, config, grid: grid.clone(), patches }),
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> &CfmConfig {
        &self.shared.config
    }

    pub fn context(&self) -> &CfmContext {
        &self.shared.ctx
    }

    pub fn patch_count(&self) -> usize {
        self.shared.patches.len()
    }

    pub fn patches(&self) -> impl Iterator<Item = &Patch> {
        self.shared.patches.iter().map(|p| &p.patch)
    }

    /// Condition estimate of every patch factorization.
    pub fn condition_estimates(&self) -> Vec<f64> {
        self.shared.patches.iter().map(|p| p.solver.condition_estimate()).collect()
    }

    /// Full minimization of every patch for `phase` at time `t` with the
    /// data currently in `history`.
    pub fn correction_functions(&self, phase: Phase, t: f64, history: &FieldHistory) -> Result<Vec<CorrectionFunction>> {
        let s = &self.shared;
        s.patches
            .par_iter()
            .map(|ps| {
                let layout = &ps.phases[phase_index(phase)].layout;
                let mut data = Vec::new();
                layout.gather(&s.grid, history, &mut data)?;
                let sys = assemble_system(&s.ctx, &ps.patch, &s.config, &s.grid, s.reference.as_ref(), layout, &data, t);
                let coeffs = ps.solver.solve(&sys.rhs);
                let m = finish_solve(&ps.matrix, &sys.rhs, coeffs);
                let mut cf = CorrectionFunction::new(&s.ctx, ps.patch.id, LocalFrame::of(&ps.patch), t, m.coefficients);
                cf.warning = m.warning;
                Ok(cf)
            })
            .collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn setup_patch(
    ctx: &CfmContext,
    patch: Patch,
    config: &CfmConfig,
    grid: &StaggeredGrid2D,
    reference: &dyn ReferenceSolution,
    plan: &StencilPlan,
    targets: &[usize],
    levels: usize,
) -> Result<PatchSolver> {
    let matrix = assemble_matrix(ctx, &patch, config, grid.dt, reference);
    let solver = RegularizedSolver::new(&matrix).map_err(|e| Error::SingularPatch { patch: patch.id, reason: e.to_string() })?;
    let frame = LocalFrame::of(&patch);
    let n = ctx.len();
    let ns = ctx.side_len();

    let phases = PHASES.map(|phase| {
        let mine: Vec<usize> = targets.iter().copied().filter(|k| phase.fields().contains(&plan.targets[*k].field)).collect();
        let nt = mine.len();
        // z[a * nt + t] = (M^-1 T^T)[a][t]
        let mut z = vec![0.0; n * nt];
        for (t, &k) in mine.iter().enumerate() {
            let node = plan.targets[k];
            let p = grid.position(node.field, node.i, node.j);
            let row = ctx.value_row(node.field, frame.to_local(p[0], p[1], 0.0));
            let mut col = vec![0.0; n];
            col[..ns].copy_from_slice(&row);
            for (c, r) in col[ns..].iter_mut().zip(&row) {
                *c = -r;
            }
            for (a, v) in solver.solve(&col).into_iter().enumerate() {
                z[a * nt + t] = v;
            }
        }

        let layout = DataLayout::new(&patch, phase, levels);
        let mut kernel = vec![0.0; nt * layout.items.len()];
        let mut responses = Vec::new();
        if nt > 0 {
            for_each_constraint(ctx, &patch, config, grid.dt, reference, |c| {
                if c.target == Target::Zero {
                    return;
                }
                let off = match c.block {
                    Block::Side(Side::Minus) => ns,
                    _ => 0,
                };
                let mut zr = vec![0.0; nt];
                for (a, r) in c.row.iter().enumerate() {
                    let w = 2.0 * c.weight * r;
                    for (o, zv) in zr.iter_mut().zip(&z[(off + a) * nt..(off + a + 1) * nt]) {
                        *o += w * zv;
                    }
                }
                match c.target {
                    Target::Fictitious { segment, s, t_rel } => {
                        let w = layout.weights(&patch, grid, segment, s, t_rel);
                        let ni = layout.items.len();
                        for (wv, &id) in w.iter().zip(&layout.segment_items[segment]) {
                            for (t, zv) in zr.iter().enumerate() {
                                kernel[t * ni + id] += wv * zv;
                            }
                        }
                    }
                    target => responses.push((target, zr)),
                }
            });
        }
        PhaseKernel { targets: mine, layout, kernel, responses }
    });

    Ok(PatchSolver { patch, solver, matrix, phases })
}

impl CorrectionProvider for CfmCorrector {
    fn jumps(&mut self, phase: Phase, t: f64, history: &FieldHistory, grid: &StaggeredGrid2D, out: &mut [f64]) -> Result<()> {
        let s = &self.shared;
        for ps in &s.patches {
            let pk = &ps.phases[phase_index(phase)];
            if pk.targets.is_empty() {
                continue;
            }
            pk.layout.gather(grid, history, &mut self.scratch)?;
            let ni = pk.layout.items.len();
            for (ti, &k) in pk.targets.iter().enumerate() {
                let row = &pk.kernel[ti * ni..(ti + 1) * ni];
                out[k] = row.iter().zip(&self.scratch).map(|(a, b)| a * b).sum();
            }
            for (target, zr) in &pk.responses {
                let g = known_value(s.reference.as_ref(), target, t);
                if g != 0.0 {
                    for (&k, z) in pk.targets.iter().zip(zr) {
                        out[k] += g * z;
                    }
                }
            }
        }
        Ok(())
    }
}
