//! Run orchestration: single runs, convergence ladders, long-time runs.

use std::sync::Arc;

use serde::Serialize;

use super::config::{Problem, RunConfig};
use super::report;
use crate::analytic::{ManufacturedSolution, ReferenceSolution, ScatteringSolution};
use crate::cfm::CfmCorrector;
use crate::fdtd::{CorrectionProvider, Phase, Simulation};
use crate::grid::{l2_error, write_snapshot, ErrorNorms, FieldKind, StaggeredGrid2D};
use crate::jumpcheck::{max_over_patches, JumpConditionSet, JumpTable};
use crate::{Error, Result, Side};

pub fn build_reference(config: &RunConfig) -> Arc<dyn ReferenceSolution> {
    match config.problem {
        Problem::ScatteringNonmagnetic => Arc::new(ScatteringSolution::non_magnetic()),
        Problem::ScatteringMagnetic => Arc::new(ScatteringSolution::magnetic()),
        Problem::Manufactured => Arc::new(ManufacturedSolution::new(config.interface())),
    }
}

/// Largest wave speed over the grid nodes.
fn max_wave_speed(grid: &StaggeredGrid2D, reference: &dyn ReferenceSolution) -> f64 {
    let (ni, nj) = grid.extent(FieldKind::Ez);
    let mut c: f64 = 0.0;
    for i in 0..ni as isize {
        for j in 0..nj as isize {
            let [x, y] = grid.position(FieldKind::Ez, i, j);
            for side in Side::BOTH {
                c = c.max(reference.material(side, x, y).wave_speed());
            }
        }
    }
    c
}

/// A simulation with its correction-function provider kept at hand.
pub struct Prepared {
    pub config: RunConfig,
    pub reference: Arc<dyn ReferenceSolution>,
    pub sim: Simulation,
    pub corrector: CfmCorrector,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    config.validate()?;
    let reference = build_reference(config);
    let n = config.cells();
    let grid = StaggeredGrid2D::new(config.bounds(), n, n, config.dt(), config.boundary_kind())?;
    let scheme = config.scheme.kind();
    let limit = scheme.max_time_step(grid.h(), max_wave_speed(&grid, reference.as_ref()));
    if grid.dt > limit {
        return Err(Error::Config(format!("time step {} exceeds the stability limit {limit}", grid.dt)));
    }
    let levels = scheme.interpolant_time_degree() + 1;
    let cfm = config.cfm();
    let r = reference.clone();
    let mut kept = None;
    let sim = Simulation::new(grid, scheme, reference.clone(), levels, |g, p| {
        let c = CfmCorrector::new(r, g, p, levels, cfm)?;
        kept = Some(c.clone());
        Ok(Box::new(c) as Box<dyn CorrectionProvider>)
    })?;
    let corrector = kept.expect("provider factory runs during setup");
    Ok(Prepared { config: config.clone(), reference, sim, corrector })
}

impl Prepared {
    pub fn errors(&self) -> ErrorNorms {
        l2_error(&self.sim.grid, &self.sim.state, self.reference.as_ref(), self.sim.time())
    }

    /// Steps to `t`, writing snapshots at the configured cadence.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let steps = (t / self.sim.grid.dt).round() as usize;
        let every = self.config.snapshot_every;
        while self.sim.step_count() < steps {
            self.sim.step()?;
            if every > 0 && self.sim.step_count() % every == 0 {
                self.snapshot()?;
            }
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Result<()> {
        std::fs::create_dir_all(&self.config.output_dir)?;
        for f in FieldKind::ALL {
            let path = self.config.output_dir.join(format!("{}_{}_{}.csv", self.config.name, f.name(), self.sim.step_count()));
            write_snapshot(&path, &self.sim.grid, &self.sim.state, f, &self.config.header())?;
        }
        Ok(())
    }

    /// Jump-condition errors of the correction functions at the current
    /// time level.
    pub fn jump_table(&self) -> Result<JumpTable> {
        let regime = self
            .config
            .problem
            .regime()
            .ok_or_else(|| Error::Config("jump conditions are only defined for the scattering problems".into()))?;
        let t = self.sim.time();
        let cfs = self.corrector.correction_functions(Phase::Electric, t, self.sim.history())?;
        max_over_patches(&cfs, self.corrector.patches(), self.reference.as_ref(), &JumpConditionSet::for_regime(regime), t)
    }

    /// Ratio of the largest second difference of `E_z` at interface-adjacent
    /// nodes to the largest one elsewhere. Values read across the interface
    /// are shifted by the exact jump so that only spurious oscillations
    /// count.
    pub fn oscillation_ratio(&self) -> f64 {
        let grid = &self.sim.grid;
        let interface = self.reference.interface();
        let t = self.sim.time();
        let ez = &self.sim.state.ez;
        let (ni, nj) = grid.extent(FieldKind::Ez);
        let (mut near, mut far) = (0.0f64, 0.0f64);
        for i in 0..ni as isize {
            for j in 0..nj as isize {
                if !grid.is_active(FieldKind::Ez, i, j) {
                    continue;
                }
                let side = interface.classify(grid.position(FieldKind::Ez, i, j));
                let mut crossing = false;
                let mut value = |di: isize, dj: isize| {
                    let (wi, wj) = grid.wrap(i + di, j + dj);
                    let p = grid.position(FieldKind::Ez, i + di, j + dj);
                    let other = interface.classify(p);
                    let v = ez.get(wi, wj);
                    if other == side {
                        v
                    } else {
                        crossing = true;
                        let own = self.reference.fields(side, p[0], p[1], t)[2];
                        let theirs = self.reference.fields(other, p[0], p[1], t)[2];
                        v + own - theirs
                    }
                };
                let dx = (value(-1, 0) - 2.0 * value(0, 0) + value(1, 0)).abs();
                let dy = (value(0, -1) - 2.0 * value(0, 0) + value(0, 1)).abs();
                let d = dx.max(dy);
                if crossing {
                    near = near.max(d);
                } else {
                    far = far.max(d);
                }
            }
        }
        near / far
    }
}

/// Record of one completed run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub h: f64,
    pub cells: usize,
    pub steps: usize,
    pub time: f64,
    pub errors: ErrorNorms,
}

pub fn run(config: &RunConfig) -> Result<(Prepared, RunRecord)> {
    let mut p = prepare(config)?;
    p.advance_to(config.t_final)?;
    let record = RunRecord {
        h: config.h,
        cells: config.cells(),
        steps: p.sim.step_count(),
        time: p.sim.time(),
        errors: p.errors(),
    };
    Ok((p, record))
}

/// Least-squares slope of `log(err)` against `log(h)` over the finest four
/// points (all points when fewer are given).
pub fn fit_slope(hs: &[f64], errs: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = hs.iter().copied().zip(errs.iter().copied()).filter(|(_, e)| *e > 0.0 && e.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(4);
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (h, e)| (a + h.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (h, e)| {
        let dx = h.ln() - mx;
        (a + dx * (e.ln() - my), b + dx * dx)
    });
    num / den
}

/// One rung of a ladder: a record and optional jump table, or the error.
#[derive(Debug)]
pub struct Rung {
    pub h: f64,
    pub outcome: std::result::Result<(RunRecord, Option<JumpTable>), String>,
}

#[derive(Debug)]
pub struct ConvergenceReport {
    pub config: RunConfig,
    pub rungs: Vec<Rung>,
}

impl ConvergenceReport {
    fn completed(&self) -> impl Iterator<Item = (&RunRecord, &Option<JumpTable>)> {
        self.rungs.iter().filter_map(|r| r.outcome.as_ref().ok().map(|(a, b)| (a, b)))
    }

    /// Slope of the combined L2 error.
    pub fn slope(&self) -> f64 {
        let (hs, es): (Vec<f64>, Vec<f64>) = self.completed().map(|(r, _)| (r.h, r.errors.combined)).unzip();
        fit_slope(&hs, &es)
    }

    /// Slope of `E_q` over the rungs that computed jump tables.
    pub fn jump_slope(&self, q: usize) -> f64 {
        let (hs, es): (Vec<f64>, Vec<f64>) =
            self.completed().filter_map(|(r, j)| j.as_ref().and_then(|j| j.order(q)).map(|e| (r.h, e))).unzip();
        fit_slope(&hs, &es)
    }

    pub fn failures(&self) -> usize {
        self.rungs.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Runs `template` at every `h`; failed rungs are recorded and skipped.
pub fn convergence_ladder(template: &RunConfig, hs: &[f64], with_jumps: bool) -> Result<ConvergenceReport> {
    if hs.len() < 3 {
        return Err(Error::Config(format!("a ladder needs at least 3 grid sizes, got {}", hs.len())));
    }
    let mut rungs = Vec::new();
    for &h in hs {
        let config = RunConfig { h, snapshot_every: 0, ..template.clone() };
        let outcome = run(&config).and_then(|(p, record)| {
            let jumps = if with_jumps { Some(p.jump_table()?) } else { None };
            Ok((record, jumps))
        });
        match &outcome {
            Ok((r, _)) => log::info!("h = {h:.5}: error {:.3e}", r.errors.combined),
            Err(e) => log::warn!("h = {h:.5}: {e}"),
        }
        rungs.push(Rung { h, outcome: outcome.map_err(|e| e.to_string()) });
    }
    Ok(ConvergenceReport { config: template.clone(), rungs })
}

/// Error samples of a long run.
#[derive(Debug, Clone, Serialize)]
pub struct LongtimeSample {
    pub step: usize,
    pub time: f64,
    pub errors: ErrorNorms,
}

/// Runs to `t_final`, sampling the error every `config.error_every` steps.
/// A blow-up ends the series early and is returned with it.
pub fn longtime(config: &RunConfig, t_final: f64) -> Result<(Vec<LongtimeSample>, Option<Error>)> {
    let mut p = prepare(config)?;
    let steps = (t_final / p.sim.grid.dt).round() as usize;
    let mut samples = vec![LongtimeSample { step: 0, time: 0.0, errors: p.errors() }];
    while p.sim.step_count() < steps {
        if let Err(e) = p.sim.step() {
            return Ok((samples, Some(e)));
        }
        let k = p.sim.step_count();
        if k % config.error_every == 0 || k == steps {
            samples.push(LongtimeSample { step: k, time: p.sim.time(), errors: p.errors() });
        }
        if config.snapshot_every > 0 && k % config.snapshot_every == 0 {
            p.snapshot()?;
        }
    }
    Ok((samples, None))
}

/// Writes `errors.csv` for a ladder.
pub fn write_ladder(report: &ConvergenceReport) -> Result<()> {
    report::write_errors(&report.config, &report.rungs)?;
    if report.rungs.iter().any(|r| matches!(&r.outcome, Ok((_, Some(_))))) {
        report::write_jumps(&report.config, &report.rungs)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let hs = [0.1, 0.05, 0.025, 0.0125, 0.00625];
        let es: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        assert!((fit_slope(&hs, &es) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slope_uses_finest_four() {
        let hs = [0.2, 0.1, 0.05, 0.025, 0.0125];
        let mut es: Vec<f64> = hs.iter().map(|h| h * h * h).collect();
        es[0] = 1e9;
        assert!((fit_slope(&hs, &es) - 3.0).abs() < 1e-12);
    }
}
