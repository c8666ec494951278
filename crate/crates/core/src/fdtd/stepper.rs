//! Time marching.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;

use super::plan::{curl_terms, CorrectionEntry};
use super::{classify_stencils, SchemeKind, StencilPlan};
use crate::analytic::ReferenceSolution;
use crate::grid::{BoundaryKind, FieldArray, FieldKind, FieldState, StaggeredGrid2D};
use crate::{Error, Result, Side};

/// Which jumps a correction request asks for: `Electric` for `E_z` jumps at
/// an integer level (read by H updates), `Magnetic` for `H` jumps at a
/// half level (read by E updates).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Electric,
    Magnetic,
}

impl Phase {
    pub fn fields(self) -> &'static [FieldKind] {
        match self {
            Phase::Electric => &[FieldKind::Ez],
            Phase::Magnetic => &[FieldKind::Hx, FieldKind::Hy],
        }
    }
}

/// Most recent time levels of every field, newest first.
#[derive(Debug, Clone)]
pub struct FieldHistory {
    depth: usize,
    levels: [VecDeque<(f64, FieldArray)>; 3],
}

impl FieldHistory {
    pub fn new(depth: usize) -> Self {
        Self { depth: depth.max(1), levels: Default::default() }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn push(&mut self, field: FieldKind, t: f64, values: FieldArray) {
        let q = &mut self.levels[field.index()];
        q.push_front((t, values));
        q.truncate(self.depth);
    }

    /// Level `back` (0 = newest) of `field`.
    pub fn level(&self, field: FieldKind, back: usize) -> Option<(f64, &FieldArray)> {
        self.levels[field.index()].get(back).map(|(t, a)| (*t, a))
    }

    pub fn len(&self, field: FieldKind) -> usize {
        self.levels[field.index()].len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(|q| q.is_empty())
    }
}

/// Supplies the jumps `F^+ - F^-` at the plan's correction targets.
pub trait CorrectionProvider: Send {
    /// Writes the jump of every target of `phase` at time `t` into
    /// `out[target]`. Other entries are left untouched.
    fn jumps(&mut self, phase: Phase, t: f64, history: &FieldHistory, grid: &StaggeredGrid2D, out: &mut [f64]) -> Result<()>;
}

/// Jumps taken from the reference solution; isolates the scheme from the
/// correction-function error.
pub struct ExactCorrections {
    reference: Arc<dyn ReferenceSolution>,
    targets: Vec<(FieldKind, [f64; 2])>,
}

impl ExactCorrections {
    pub fn new(reference: Arc<dyn ReferenceSolution>, grid: &StaggeredGrid2D, plan: &StencilPlan) -> Self {
        let targets = plan.targets.iter().map(|n| (n.field, grid.position(n.field, n.i, n.j))).collect();
        Self { reference, targets }
    }
}

impl CorrectionProvider for ExactCorrections {
    fn jumps(&mut self, phase: Phase, t: f64, _history: &FieldHistory, _grid: &StaggeredGrid2D, out: &mut [f64]) -> Result<()> {
        for (k, (field, p)) in self.targets.iter().enumerate() {
            if phase.fields().contains(field) {
                let plus = self.reference.fields(Side::Plus, p[0], p[1], t)[field.index()];
                let minus = self.reference.fields(Side::Minus, p[0], p[1], t)[field.index()];
                out[k] = plus - minus;
            }
        }
        Ok(())
    }
}

/// Leaves every cross-interface read uncorrected.
pub struct NoCorrections;

impl CorrectionProvider for NoCorrections {
    fn jumps(&mut self, _: Phase, _: f64, _: &FieldHistory, _: &StaggeredGrid2D, _: &mut [f64]) -> Result<()> {
        Ok(())
    }
}

/// Non-active nodes of a prescribed grid with cached data for refilling.
struct PrescribedNodes {
    nodes: [Vec<(isize, isize, Side)>; 3],
    phasors: Option<(f64, [Vec<Complex64>; 3])>,
}

/// A running simulation: fields, history, and the correction source.
pub struct Simulation {
    pub grid: StaggeredGrid2D,
    pub scheme: SchemeKind,
    pub plan: StencilPlan,
    pub state: FieldState,
    reference: Arc<dyn ReferenceSolution>,
    provider: Box<dyn CorrectionProvider>,
    history: FieldHistory,
    time_coefficients: Vec<f64>,
    /// `1/mu` on H nodes and `1/eps` on E nodes, each on its own side.
    inverse_coefficient: [FieldArray; 3],
    sides: [Vec<Side>; 3],
    rhs_magnetic: VecDeque<[FieldArray; 2]>,
    rhs_electric: VecDeque<FieldArray>,
    jumps: Vec<f64>,
    prescribed: Option<PrescribedNodes>,
    step: usize,
}

impl Simulation {
    /// Sets up a run starting at `t = 0` from the reference solution. The
    /// provider is created from the plan once it is known.
    pub fn new<F>(
        grid: StaggeredGrid2D,
        scheme: SchemeKind,
        reference: Arc<dyn ReferenceSolution>,
        history_depth: usize,
        make_provider: F,
    ) -> Result<Self>
    where
        F: FnOnce(&StaggeredGrid2D, &StencilPlan) -> Result<Box<dyn CorrectionProvider>>,
    {
        let interface = reference.interface().clone();
        let plan = classify_stencils(&grid, &interface, scheme);
        let provider = make_provider(&grid, &plan)?;
        let time_coefficients = scheme.time_coefficients();
        let levels = time_coefficients.len();

        let mut inverse_coefficient = [grid.new_array(FieldKind::Hx), grid.new_array(FieldKind::Hy), grid.new_array(FieldKind::Ez)];
        let mut sides: [Vec<Side>; 3] = Default::default();
        for field in FieldKind::ALL {
            let (ni, nj) = grid.extent(field);
            let arr = &mut inverse_coefficient[field.index()];
            for i in 0..ni as isize {
                for j in 0..nj as isize {
                    let p = grid.position(field, i, j);
                    let side = interface.classify(p);
                    let m = reference.material(side, p[0], p[1]);
                    arr.set(i, j, if field.is_magnetic() { 1.0 / m.mu } else { 1.0 / m.eps });
                    sides[field.index()].push(side);
                }
            }
        }

        let dt = grid.dt;
        let prescribed = (grid.boundary == BoundaryKind::Prescribed).then(|| prescribed_nodes(&grid, reference.as_ref()));
        let mut sim = Self {
            state: FieldState::sample(&grid, reference.as_ref(), 0.0),
            grid,
            scheme,
            plan,
            reference,
            provider,
            history: FieldHistory::new(history_depth),
            time_coefficients,
            inverse_coefficient,
            sides,
            rhs_magnetic: VecDeque::new(),
            rhs_electric: VecDeque::new(),
            jumps: Vec::new(),
            prescribed,
            step: 0,
        };
        sim.jumps = vec![0.0; sim.plan.targets.len()];

        // startup levels from the reference solution, oldest first
        let depth = sim.history.depth().max(levels);
        let mut exact = ExactCorrections::new(sim.reference.clone(), &sim.grid, &sim.plan);
        for back in (0..depth).rev() {
            let t = -(back as f64) * dt;
            let s = FieldState::sample(&sim.grid, sim.reference.as_ref(), t);
            if back < sim.history.depth() {
                sim.history.push(FieldKind::Hx, s.t_h, s.hx.clone());
                sim.history.push(FieldKind::Hy, s.t_h, s.hy.clone());
                sim.history.push(FieldKind::Ez, s.t_e, s.ez.clone());
            }
            // right-hand sides strictly before the first update
            if back >= 1 && back <= levels - 1 {
                let mut jumps = vec![0.0; sim.jumps.len()];
                exact.jumps(Phase::Electric, t, &sim.history, &sim.grid, &mut jumps)?;
                let rh = sim.magnetic_rhs(&s.ez, t, &jumps);
                sim.rhs_magnetic.push_front(rh);
            }
            if back >= 1 && back <= levels - 1 {
                // E right-hand side at t + dt/2, from H sampled there
                let th = t + 0.5 * dt;
                let sh = FieldState::sample(&sim.grid, sim.reference.as_ref(), t + dt);
                let mut jumps = vec![0.0; sim.jumps.len()];
                exact.jumps(Phase::Magnetic, th, &sim.history, &sim.grid, &mut jumps)?;
                let re = sim.electric_rhs(&sh.hx, &sh.hy, th, &jumps);
                sim.rhs_electric.push_front(re);
            }
        }
        Ok(sim)
    }

    pub fn reference(&self) -> &Arc<dyn ReferenceSolution> {
        &self.reference
    }

    pub fn history(&self) -> &FieldHistory {
        &self.history
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.state.t_e
    }

    /// Side of an owned node of `field`.
    pub fn node_side(&self, field: FieldKind, i: isize, j: isize) -> Side {
        let (_, nj) = self.grid.extent(field);
        self.sides[field.index()][i as usize * nj + j as usize]
    }

    /// `mu` on H nodes, `eps` on E nodes.
    pub fn coefficient(&self, field: FieldKind, i: isize, j: isize) -> f64 {
        1.0 / self.inverse_coefficient[field.index()].get(i, j)
    }

    fn magnetic_rhs(&self, ez: &FieldArray, t: f64, jumps: &[f64]) -> [FieldArray; 2] {
        let mut out = [self.grid.new_array(FieldKind::Hx), self.grid.new_array(FieldKind::Hy)];
        for (k, field) in [FieldKind::Hx, FieldKind::Hy].into_iter().enumerate() {
            self.curl_into(field, &[ez, ez], t, &mut out[k]);
        }
        apply_corrections(&self.plan.magnetic_updates, jumps, |f| if f == FieldKind::Hx { 0 } else { 1 }, &mut out);
        out
    }

    fn electric_rhs(&self, hx: &FieldArray, hy: &FieldArray, t: f64, jumps: &[f64]) -> FieldArray {
        let mut out = [self.grid.new_array(FieldKind::Ez)];
        self.curl_into(FieldKind::Ez, &[hy, hx], t, &mut out[0]);
        apply_corrections(&self.plan.electric_updates, jumps, |_| 0, &mut out);
        let [o] = out;
        o
    }

    /// Uncorrected curl plus sources on every active node of `field`.
    /// `sources[k]` is the array differenced by the k-th curl term.
    fn curl_into(&self, field: FieldKind, sources: &[&FieldArray], t: f64, out: &mut FieldArray) {
        let weights = self.scheme.stencil();
        let terms = curl_terms(field, self.scheme);
        let inv_h = [1.0 / self.grid.dx, 1.0 / self.grid.dy];
        let (ni, nj) = self.grid.extent(field);
        let with_sources = Side::BOTH.iter().any(|s| self.reference.has_sources(*s));
        for i in 0..ni as isize {
            for j in 0..nj as isize {
                if !self.grid.is_active(field, i, j) {
                    continue;
                }
                let mut acc = 0.0;
                for (term, src) in terms.iter().zip(sources) {
                    let mut d = 0.0;
                    for (m, w) in weights.iter().enumerate() {
                        let s = term.first + m as isize;
                        d += w * if term.axis == 0 { src.get(i + s, j) } else { src.get(i, j + s) };
                    }
                    acc += term.sign * d * inv_h[term.axis];
                }
                if with_sources {
                    let side = self.node_side(field, i, j);
                    if self.reference.has_sources(side) {
                        let p = self.grid.position(field, i, j);
                        acc += self.reference.sources(side, p[0], p[1], t)[field.index()];
                    }
                }
                out.set(i, j, acc);
            }
        }
    }

    /// Advances E by one full step and H by one full step (H first).
    pub fn step(&mut self) -> Result<()> {
        let dt = self.grid.dt;
        let levels = self.time_coefficients.len();

        // magnetic update from E^n
        let tn = self.state.t_e;
        self.provider.jumps(Phase::Electric, tn, &self.history, &self.grid, &mut self.jumps)?;
        let rhs = self.magnetic_rhs(&self.state.ez, tn, &self.jumps);
        self.rhs_magnetic.push_front(rhs);
        self.rhs_magnetic.truncate(levels);
        for (k, field) in [FieldKind::Hx, FieldKind::Hy].into_iter().enumerate() {
            let mut next = self.state.field(field).clone();
            let inv = &self.inverse_coefficient[field.index()];
            let (ni, nj) = self.grid.extent(field);
            for i in 0..ni as isize {
                for j in 0..nj as isize {
                    if !self.grid.is_active(field, i, j) {
                        continue;
                    }
                    let s: f64 = self.time_coefficients.iter().zip(&self.rhs_magnetic).map(|(b, r)| b * r[k].get(i, j)).sum();
                    next.add(i, j, dt * inv.get(i, j) * s);
                }
            }
            *self.state.field_mut(field) = next;
        }
        self.state.t_h = tn + 0.5 * dt;
        self.refresh_boundary(&[FieldKind::Hx, FieldKind::Hy], self.state.t_h);
        self.history.push(FieldKind::Hx, self.state.t_h, self.state.hx.clone());
        self.history.push(FieldKind::Hy, self.state.t_h, self.state.hy.clone());

        // electric update from H^{n+1/2}
        let th = self.state.t_h;
        self.provider.jumps(Phase::Magnetic, th, &self.history, &self.grid, &mut self.jumps)?;
        let rhs = self.electric_rhs(&self.state.hx, &self.state.hy, th, &self.jumps);
        self.rhs_electric.push_front(rhs);
        self.rhs_electric.truncate(levels);
        let inv = &self.inverse_coefficient[FieldKind::Ez.index()];
        let (ni, nj) = self.grid.extent(FieldKind::Ez);
        for i in 0..ni as isize {
            for j in 0..nj as isize {
                if !self.grid.is_active(FieldKind::Ez, i, j) {
                    continue;
                }
                let s: f64 = self.time_coefficients.iter().zip(&self.rhs_electric).map(|(b, r)| b * r.get(i, j)).sum();
                self.state.ez.add(i, j, dt * inv.get(i, j) * s);
            }
        }
        self.step += 1;
        self.state.t_e = self.step as f64 * dt;
        self.refresh_boundary(&[FieldKind::Ez], self.state.t_e);
        self.history.push(FieldKind::Ez, self.state.t_e, self.state.ez.clone());

        if !self.state.all_finite() {
            return Err(Error::BlowUp { step: self.step, time: self.state.t_e });
        }
        Ok(())
    }

    /// Steps until `t_final` (rounded to a whole number of steps).
    pub fn run_to(&mut self, t_final: f64) -> Result<()> {
        let steps = (t_final / self.grid.dt).round() as usize;
        while self.step < steps {
            self.step()?;
        }
        Ok(())
    }

    fn refresh_boundary(&mut self, fields: &[FieldKind], t: f64) {
        match self.grid.boundary {
            BoundaryKind::Periodic => {
                for f in fields {
                    self.state.field_mut(*f).fill_periodic_ghosts();
                }
            }
            BoundaryKind::Prescribed => {
                let Some(pre) = &self.prescribed else { return };
                for f in fields {
                    let nodes = &pre.nodes[f.index()];
                    let arr = match f {
                        FieldKind::Hx => &mut self.state.hx,
                        FieldKind::Hy => &mut self.state.hy,
                        FieldKind::Ez => &mut self.state.ez,
                    };
                    match &pre.phasors {
                        Some((omega, ph)) => {
                            let e = Complex64::from_polar(1.0, omega * t);
                            for ((i, j, _), p) in nodes.iter().zip(&ph[f.index()]) {
                                arr.set(*i, *j, (p * e).re);
                            }
                        }
                        None => {
                            for (i, j, side) in nodes {
                                let p = self.grid.position(*f, *i, *j);
                                arr.set(*i, *j, self.reference.fields(*side, p[0], p[1], t)[f.index()]);
                            }
                        }
                    }
                }
            }
        }
    }
}

fn apply_corrections<const N: usize>(
    entries: &[CorrectionEntry],
    jumps: &[f64],
    slot: impl Fn(FieldKind) -> usize,
    out: &mut [FieldArray; N],
) {
    for e in entries {
        out[slot(e.updated.field)].add(e.updated.i, e.updated.j, e.coef * jumps[e.target]);
    }
}

fn prescribed_nodes(grid: &StaggeredGrid2D, reference: &dyn ReferenceSolution) -> PrescribedNodes {
    let mut nodes: [Vec<(isize, isize, Side)>; 3] = Default::default();
    for f in FieldKind::ALL {
        let arr = grid.new_array(f);
        let (ri, rj) = arr.full_range();
        for i in ri {
            for j in rj.clone() {
                if !grid.is_active(f, i, j) {
                    let side = reference.interface().classify(grid.position(f, i, j));
                    nodes[f.index()].push((i, j, side));
                }
            }
        }
    }
    let phasors = reference.angular_frequency().map(|omega| {
        let mut ph: [Vec<Complex64>; 3] = Default::default();
        for f in FieldKind::ALL {
            for (i, j, side) in &nodes[f.index()] {
                let p = grid.position(f, *i, *j);
                let u = reference.phasor(*side, p[0], p[1]).expect("time-harmonic reference provides phasors");
                ph[f.index()].push(u[f.index()]);
            }
        }
        (omega, ph)
    });
    PrescribedNodes { nodes, phasors }
}
