use std::f64::consts::PI;

use proptest::prelude::*;

use maxwell_cfm::cfm::linalg::{Cholesky, DenseMatrix};
use maxwell_cfm::cfm::poly::MonomialSpace;
use maxwell_cfm::cfm::DivFreePolyBasis;
use maxwell_cfm::geometry::Interface;
use maxwell_cfm::grid::{BoundaryKind, FieldKind, StaggeredGrid2D};
use maxwell_cfm::Side;

fn star() -> impl Strategy<Value = Interface> {
    (0.15..0.35f64, 0.0..0.1f64, 2u32..7).prop_map(|(r, a, m)| Interface::star([0.5, 0.5], r, a, m))
}

proptest! {
    #[test]
    fn curve_points_lie_on_the_interface(shape in star(), s in 0.0..2.0 * PI) {
        let (p, _) = shape.curve_point(s);
        prop_assert!(shape.level_set(p).abs() < 1e-12);
        prop_assert!(shape.distance(p) < 1e-9);
    }

    #[test]
    fn stepping_along_the_normal_changes_side(shape in star(), s in 0.0..2.0 * PI, step in 1e-4..1e-2f64) {
        let (p, _) = shape.curve_point(s);
        let n = shape.normal(p).unwrap();
        let out = shape.classify([p[0] + step * n[0], p[1] + step * n[1]]);
        let inn = shape.classify([p[0] - step * n[0], p[1] - step * n[1]]);
        prop_assert_ne!(out, inn);
        prop_assert_eq!(inn, Side::Minus);
    }

    #[test]
    fn box_samples_stay_in_the_box(shape in star(), s in 0.0..2.0 * PI, half in 0.02..0.15f64) {
        let (c, _) = shape.curve_point(s);
        let samples = shape.samples_in_box(c, half, 0.02);
        prop_assert!(!samples.is_empty());
        for q in &samples {
            prop_assert!((q.point[0] - c[0]).abs() <= half + 1e-12 && (q.point[1] - c[1]).abs() <= half + 1e-12);
            prop_assert!(q.weight > 0.0);
            prop_assert!(((q.normal[0].powi(2) + q.normal[1].powi(2)).sqrt() - 1.0).abs() < 1e-12);
        }
        // the weights integrate arc length over the clipped intervals
        let total: f64 = samples.iter().map(|q| q.weight).sum();
        let exact: f64 = shape.parameter_intervals_in_box(c, half).iter().map(|&(a, b)| shape.arc_length(a, b)).sum();
        prop_assert!((total - exact).abs() < 1e-8 * exact.max(1.0));
    }

    #[test]
    fn magnetic_basis_is_divergence_free(k in 1usize..=4) {
        let basis = DivFreePolyBasis::new(k).unwrap();
        for i in 0..basis.h_len() {
            prop_assert!(basis.divergence(i).iter().all(|c| c.abs() < 1e-12));
        }
        prop_assert_eq!(basis.h_gram_rank(), basis.h_len());
    }

    #[test]
    fn derivative_of_monomial_polynomial_matches_differences(
        coeffs in prop::collection::vec(-1.0..1.0f64, 20),
        p in prop::array::uniform3(-1.0..1.0f64),
        axis in 0usize..3,
    ) {
        let space = MonomialSpace::new(3);
        let c = &coeffs[..space.len()];
        let d = space.derivative(c, axis, 1);
        let step = 1e-5;
        let (mut a, mut b) = (p, p);
        a[axis] += step;
        b[axis] -= step;
        let fd = (space.eval(c, a) - space.eval(c, b)) / (2.0 * step);
        prop_assert!((space.eval(&d, p) - fd).abs() < 1e-7);
    }

    #[test]
    fn cholesky_solves_spd_systems(entries in prop::collection::vec(-1.0..1.0f64, 36), rhs in prop::collection::vec(-1.0..1.0f64, 6)) {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| entries[i * n + k] * entries[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += 1.0;
        }
        let m = DenseMatrix::from_row_major(n, a);
        let x = Cholesky::factor(&m).unwrap().solve(&rhs);
        let r = m.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&rhs) {
            prop_assert!((ri - bi).abs() < 1e-10);
        }
    }

    #[test]
    fn node_positions_follow_the_stagger(n in 8usize..64, i in 0isize..8, j in 0isize..8) {
        let grid = StaggeredGrid2D::new([0.0, 1.0, 0.0, 1.0], n, n, 0.25 / n as f64, BoundaryKind::Periodic).unwrap();
        let h = grid.h();
        let ez = grid.position(FieldKind::Ez, i, j);
        let hx = grid.position(FieldKind::Hx, i, j);
        let hy = grid.position(FieldKind::Hy, i, j);
        prop_assert!((hx[0] - ez[0]).abs() < 1e-12 && (hx[1] - ez[1] - 0.5 * h).abs() < 1e-12);
        prop_assert!((hy[0] - ez[0] - 0.5 * h).abs() < 1e-12 && (hy[1] - ez[1]).abs() < 1e-12);
    }
}
