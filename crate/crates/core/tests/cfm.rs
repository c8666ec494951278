use std::f64::consts::PI;
use std::sync::Arc;

use maxwell_cfm::analytic::{ManufacturedSolution, PlaneWave, ReferenceSolution, ScatteringSolution};
use maxwell_cfm::cfm::assemble::{assemble_matrix, assemble_system, evaluate_functional};
use maxwell_cfm::cfm::{minimize, CfmConfig, CfmContext, CfmCorrector, CorrectionFunction, DataLayout, LocalFrame};
use maxwell_cfm::fdtd::{classify_stencils, CorrectionProvider, FieldHistory, NoCorrections, Phase, SchemeKind, Simulation};
use maxwell_cfm::geometry::Interface;
use maxwell_cfm::grid::{BoundaryKind, FieldArray, FieldKind, StaggeredGrid2D};
use maxwell_cfm::harness::fit_slope;
use maxwell_cfm::{Error, Side};

/// A corrector on a grid whose history holds the exact solution at t = 0.
struct Setup {
    reference: Arc<dyn ReferenceSolution>,
    grid: StaggeredGrid2D,
    sim: Simulation,
    cfm: CfmCorrector,
}

fn setup(reference: Arc<dyn ReferenceSolution>, bounds: [f64; 4], n: usize, scheme: SchemeKind, config: CfmConfig) -> Setup {
    let boundary = if bounds[0] < 0.0 { BoundaryKind::Prescribed } else { BoundaryKind::Periodic };
    let h = (bounds[1] - bounds[0]) / n as f64;
    let grid = StaggeredGrid2D::new(bounds, n, n, 0.5 * h, boundary).unwrap();
    let levels = scheme.interpolant_time_degree() + 1;
    let sim = Simulation::new(grid.clone(), scheme, reference.clone(), levels, |_, _| Ok(Box::new(NoCorrections) as Box<dyn CorrectionProvider>)).unwrap();
    let plan = classify_stencils(&grid, reference.interface(), scheme);
    let cfm = CfmCorrector::new(reference.clone(), &grid, &plan, levels, config).unwrap();
    Setup { reference, grid, sim, cfm }
}

const SCATTERING: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];
const UNIT: [f64; 4] = [0.0, 1.0, 0.0, 1.0];

/// Largest deviation of either extension from the exact one-sided fields
/// over the interface samples and a 5x5 lattice of each patch box.
fn extension_error(s: &Setup) -> f64 {
    let cfs = s.cfm.correction_functions(Phase::Electric, 0.0, s.sim.history()).unwrap();
    let mut worst = 0.0f64;
    for (cf, patch) in cfs.iter().zip(s.cfm.patches()) {
        let mut points: Vec<[f64; 2]> = patch.samples.iter().map(|q| q.point).collect();
        for a in 0..5 {
            for b in 0..5 {
                let u = |k: usize| -1.0 + 0.5 * k as f64;
                points.push([patch.center[0] + patch.half_width * u(a), patch.center[1] + patch.half_width * u(b)]);
            }
        }
        for p in points {
            for side in Side::BOTH {
                let exact = s.reference.fields(side, p[0], p[1], 0.0);
                for f in FieldKind::ALL {
                    let v = cf.value(side, f, p[0], p[1], 0.0).unwrap();
                    worst = worst.max((v - exact[f.index()]).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn extensions_converge_at_degree_plus_one() {
    let ns = [40, 56, 80, 112];
    let hs: Vec<f64> = ns.iter().map(|n| 2.0 / *n as f64).collect();
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| extension_error(&setup(Arc::new(ScatteringSolution::magnetic()), SCATTERING, n, SchemeKind::Yee2, CfmConfig::yee())))
        .collect();
    let slope = fit_slope(&hs, &errs);
    assert!(slope >= 2.5, "slope {slope} errors {errs:?}");
}

#[test]
fn electric_field_continuous_but_normal_h_jumps_on_magnetic_cylinder() {
    let s = setup(Arc::new(ScatteringSolution::magnetic()), SCATTERING, 80, SchemeKind::Yee2, CfmConfig::yee());
    let cfs = s.cfm.correction_functions(Phase::Electric, 0.0, s.sim.history()).unwrap();
    let (mut ez, mut ht, mut hn) = (0.0f64, 0.0f64, 0.0f64);
    for (cf, patch) in cfs.iter().zip(s.cfm.patches()) {
        for q in &patch.samples {
            let [nx, ny] = q.normal;
            let dx = cf.jump_at(FieldKind::Hx, q.point, 0.0).unwrap();
            let dy = cf.jump_at(FieldKind::Hy, q.point, 0.0).unwrap();
            ez = ez.max(cf.jump_at(FieldKind::Ez, q.point, 0.0).unwrap().abs());
            ht = ht.max((nx * dy - ny * dx).abs());
            hn = hn.max((nx * dx + ny * dy).abs());
        }
    }
    assert!(ez < 1e-2 && ht < 1e-2, "Ez {ez:e} H tangential {ht:e}");
    assert!(hn > 10.0 * ht.max(ez), "normal H jump {hn:e}");
}

#[test]
fn manufactured_jump_on_interface_converges() {
    let ns = [20, 28, 40, 56];
    let hs: Vec<f64> = ns.iter().map(|n| 1.0 / *n as f64).collect();
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let reference: Arc<dyn ReferenceSolution> = Arc::new(ManufacturedSolution::new(Interface::circle([0.5, 0.5], 0.25)));
            let s = setup(reference.clone(), UNIT, n, SchemeKind::Staggered4, CfmConfig::staggered4());
            let cfs = s.cfm.correction_functions(Phase::Electric, 0.0, s.sim.history()).unwrap();
            let mut worst = 0.0f64;
            for (cf, patch) in cfs.iter().zip(s.cfm.patches()) {
                for q in &patch.samples {
                    let [x, y] = q.point;
                    let exact = reference.fields(Side::Plus, x, y, 0.0)[2] - reference.fields(Side::Minus, x, y, 0.0)[2];
                    worst = worst.max((cf.jump_at(FieldKind::Ez, q.point, 0.0).unwrap() - exact).abs());
                }
            }
            worst
        })
        .collect();
    // cubic correction functions cap the jump accuracy at third order
    let slope = fit_slope(&hs, &errs);
    assert!(slope >= 2.7, "slope {slope} errors {errs:?}");
}

#[test]
fn free_space_interface_jumps_vanish_under_refinement() {
    // with equal media on both sides any jump is pure approximation error
    let worst = |n: usize| {
        let reference: Arc<dyn ReferenceSolution> = Arc::new(PlaneWave::new(Interface::circle([0.5, 0.5], 0.25), [2.0 * PI, 2.0 * PI], 1.0, 1.0));
        let s = setup(reference, UNIT, n, SchemeKind::Staggered4, CfmConfig::staggered4());
        let cfs = s.cfm.correction_functions(Phase::Electric, 0.0, s.sim.history()).unwrap();
        let mut worst = 0.0f64;
        for (cf, patch) in cfs.iter().zip(s.cfm.patches()) {
            for q in &patch.samples {
                for field in FieldKind::ALL {
                    worst = worst.max(cf.jump_at(field, q.point, 0.0).unwrap().abs());
                }
            }
        }
        worst
    };
    let (coarse, fine) = (worst(40), worst(80));
    assert!(coarse < 1e-3, "coarse jump {coarse:e}");
    assert!(fine < coarse / 6.0, "jumps {coarse:e} -> {fine:e}");
}

#[test]
fn zero_data_gives_zero_jumps() {
    let reference: Arc<dyn ReferenceSolution> = Arc::new(ScatteringSolution::non_magnetic());
    let s = setup(reference, SCATTERING, 40, SchemeKind::Yee2, CfmConfig::yee());
    let exact = s.sim.history();
    let mut history = FieldHistory::new(exact.depth());
    for f in FieldKind::ALL {
        for back in (0..exact.len(f)).rev() {
            let (t, a) = exact.level(f, back).unwrap();
            let (ni, nj) = a.extent();
            history.push(f, t, FieldArray::zeros(ni, nj));
        }
    }
    let plan = classify_stencils(&s.grid, s.reference.interface(), SchemeKind::Yee2);
    let mut out = vec![1.0; plan.targets.len()];
    let mut cfm = s.cfm.clone();
    cfm.jumps(Phase::Electric, 0.3, &history, &s.grid, &mut out).unwrap();
    cfm.jumps(Phase::Magnetic, 0.3, &history, &s.grid, &mut out).unwrap();
    assert!(out.iter().all(|v| *v == 0.0));
}

#[test]
fn evaluation_outside_the_patch_is_rejected() {
    let s = setup(Arc::new(ScatteringSolution::magnetic()), SCATTERING, 40, SchemeKind::Yee2, CfmConfig::yee());
    let cfs = s.cfm.correction_functions(Phase::Electric, 0.0, s.sim.history()).unwrap();
    let patch = s.cfm.patches().next().unwrap();
    let cf: &CorrectionFunction = &cfs[0];
    let inside = patch.center;
    assert!(cf.jump_at(FieldKind::Ez, inside, 0.0).is_ok());
    let outside = [patch.center[0] + 1.5 * patch.half_width, patch.center[1]];
    assert!(matches!(cf.jump_at(FieldKind::Ez, outside, 0.0), Err(Error::OutOfPatch { .. })));
    // the window ends at the correction time
    assert!(matches!(cf.jump_at(FieldKind::Ez, inside, 0.5), Err(Error::OutOfPatch { .. })));
}

#[test]
fn patch_matrices_are_symmetric_and_definite() {
    let s = setup(Arc::new(ScatteringSolution::magnetic()), SCATTERING, 40, SchemeKind::Staggered4, CfmConfig::staggered4());
    let config = CfmConfig::staggered4();
    let ctx = CfmContext::new(config.degree).unwrap();
    for patch in s.cfm.patches().take(8) {
        let m = assemble_matrix(&ctx, patch, &config, s.grid.dt, s.reference.as_ref());
        assert_eq!(m.asymmetry(), 0.0);
        assert!(minimize(&m, &vec![1.0; m.size()]).is_ok());
    }
}

/// Interface residual (per unit penalty) at the minimizer for penalty `c_p`.
fn interface_term(s: &Setup, patch_index: usize, c_p: f64) -> f64 {
    let patch = s.cfm.patches().nth(patch_index).unwrap();
    let config = CfmConfig { c_p, ..CfmConfig::yee() };
    let ctx = CfmContext::new(config.degree).unwrap();
    let layout = DataLayout::new(patch, Phase::Electric, 2);
    let mut data = Vec::new();
    layout.gather(&s.grid, s.sim.history(), &mut data).unwrap();
    let sys = assemble_system(&ctx, patch, &config, &s.grid, s.reference.as_ref(), &layout, &data, 0.0);
    let c = minimize(&sys.matrix, &sys.rhs).unwrap().coefficients;
    let j = |cp: f64| {
        let cfg = CfmConfig { c_p: cp, ..config };
        evaluate_functional(&ctx, patch, &cfg, &s.grid, s.reference.as_ref(), &layout, &data, 0.0, &c)
    };
    // J is affine in c_p at fixed coefficients; the slope is the interface residual
    j(2.0) - j(1.0)
}

#[test]
fn larger_interface_penalty_never_loosens_the_interface_fit() {
    let s = setup(Arc::new(ScatteringSolution::magnetic()), SCATTERING, 40, SchemeKind::Yee2, CfmConfig::yee());
    for patch in [0, 5, 11] {
        let terms: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|cp| interface_term(&s, patch, *cp)).collect();
        for w in terms.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "patch {patch}: {terms:?}");
        }
    }
}

#[test]
fn local_frame_maps_window_to_reference_cube() {
    let s = setup(Arc::new(ScatteringSolution::magnetic()), SCATTERING, 40, SchemeKind::Yee2, CfmConfig::yee());
    let patch = s.cfm.patches().next().unwrap();
    let frame = LocalFrame::of(patch);
    let lo = frame.to_local(patch.center[0] - patch.half_width, patch.center[1] + patch.half_width, -patch.time_length);
    let hi = frame.to_local(patch.center[0] + patch.half_width, patch.center[1] - patch.half_width, 0.0);
    for (v, e) in lo.iter().zip([-1.0, 1.0, -1.0]).chain(hi.iter().zip([1.0, -1.0, 1.0])) {
        assert!((v - e).abs() < 1e-12);
    }
}
