//! Identification of stencils that read across the interface.

use std::collections::BTreeMap;

use super::SchemeKind;
use crate::geometry::Interface;
use crate::grid::{FieldKind, NodeIndex, StaggeredGrid2D};
use crate::Side;

/// One cross-interface read: the right-hand side of `updated` gets
/// `coef * D(target)` added, where `D = F^+ - F^-` at the read node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionEntry {
    pub updated: NodeIndex,
    /// Index into [`StencilPlan::targets`].
    pub target: usize,
    /// Stencil weight (including `1/h` and the curl sign) times the side
    /// sign: `+1` when the updated node is on the plus side.
    pub coef: f64,
}

/// The difference term of one curl component: `sign * d(source)/d(axis)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CurlTerm {
    pub source: FieldKind,
    pub axis: usize,
    pub sign: f64,
    /// Lattice shift of the first stencil node relative to the updated node.
    pub first: isize,
}

/// Curl terms of the TMz right-hand sides:
/// `dHx ~ -dEz/dy`, `dHy ~ dEz/dx`, `dEz ~ dHy/dx - dHx/dy`.
pub(crate) fn curl_terms(field: FieldKind, scheme: SchemeKind) -> Vec<CurlTerm> {
    let hw = scheme.half_width();
    // H nodes sit half a cell after the E nodes they difference
    let h_first = -(hw - 1);
    let e_first = -hw;
    match field {
        FieldKind::Hx => vec![CurlTerm { source: FieldKind::Ez, axis: 1, sign: -1.0, first: h_first }],
        FieldKind::Hy => vec![CurlTerm { source: FieldKind::Ez, axis: 0, sign: 1.0, first: h_first }],
        FieldKind::Ez => vec![
            CurlTerm { source: FieldKind::Hy, axis: 0, sign: 1.0, first: e_first },
            CurlTerm { source: FieldKind::Hx, axis: 1, sign: -1.0, first: e_first },
        ],
    }
}

#[derive(Debug, Clone)]
pub struct StencilPlan {
    pub scheme: SchemeKind,
    /// Read nodes whose jump is needed, as lattice indices (not wrapped).
    pub targets: Vec<NodeIndex>,
    /// Corrections of H updates (targets are E nodes).
    pub magnetic_updates: Vec<CorrectionEntry>,
    /// Corrections of E updates (targets are H nodes).
    pub electric_updates: Vec<CorrectionEntry>,
    /// Updated nodes whose stencil straddles the interface, sorted.
    pub corrected: Vec<NodeIndex>,
}

impl StencilPlan {
    pub fn is_corrected(&self, n: NodeIndex) -> bool {
        self.corrected.binary_search(&n).is_ok()
    }

    pub fn targets_of(&self, field: FieldKind) -> impl Iterator<Item = (usize, &NodeIndex)> {
        self.targets.iter().enumerate().filter(move |(_, t)| t.field == field)
    }
}

/// Side of the node that stores lattice index `(i, j)`.
pub(crate) fn stored_side(grid: &StaggeredGrid2D, interface: &Interface, field: FieldKind, i: isize, j: isize) -> Side {
    let (wi, wj) = grid.wrap(i, j);
    interface.classify(grid.position(field, wi, wj))
}

/// Marks every active node whose stencil reads a node on the other side of
/// the interface and lists the corresponding jump reads.
pub fn classify_stencils(grid: &StaggeredGrid2D, interface: &Interface, scheme: SchemeKind) -> StencilPlan {
    let weights = scheme.stencil();
    let inv_h = [1.0 / grid.dx, 1.0 / grid.dy];
    let mut target_ids: BTreeMap<NodeIndex, usize> = BTreeMap::new();
    let mut targets = Vec::new();
    let mut magnetic_updates = Vec::new();
    let mut electric_updates = Vec::new();
    let mut corrected = Vec::new();

    for field in FieldKind::ALL {
        let (ni, nj) = grid.extent(field);
        let terms = curl_terms(field, scheme);
        for i in 0..ni as isize {
            for j in 0..nj as isize {
                if !grid.is_active(field, i, j) {
                    continue;
                }
                let side = interface.classify(grid.position(field, i, j));
                let mut any = false;
                for term in &terms {
                    for (m, w) in weights.iter().enumerate() {
                        let shift = term.first + m as isize;
                        let (si, sj) = if term.axis == 0 { (i + shift, j) } else { (i, j + shift) };
                        if stored_side(grid, interface, term.source, si, sj) == side {
                            continue;
                        }
                        any = true;
                        let node = NodeIndex::new(term.source, si, sj);
                        let target = *target_ids.entry(node).or_insert_with(|| {
                            targets.push(node);
                            targets.len() - 1
                        });
                        let entry = CorrectionEntry {
                            updated: NodeIndex::new(field, i, j),
                            target,
                            coef: term.sign * w * inv_h[term.axis] * side.sign(),
                        };
                        if field.is_magnetic() {
                            magnetic_updates.push(entry);
                        } else {
                            electric_updates.push(entry);
                        }
                    }
                }
                if any {
                    corrected.push(NodeIndex::new(field, i, j));
                }
            }
        }
    }
    corrected.sort();
    StencilPlan { scheme, targets, magnetic_updates, electric_updates, corrected }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;

    fn unit_grid(n: usize) -> StaggeredGrid2D {
        StaggeredGrid2D::new([0.0, 1.0, 0.0, 1.0], n, n, 0.5 / n as f64, BoundaryKind::Periodic).unwrap()
    }

    #[test]
    fn vertical_line_between_grid_lines_yee() {
        // x = 0.51 on a 20-cell grid: Ez columns i = 10 (x = 0.5) and i = 11 (x = 0.55)
        // (prescribed boundary: a periodic grid would see a second crossing at x = 0)
        let grid = StaggeredGrid2D::new([0.0, 1.0, 0.0, 1.0], 20, 20, 0.025, BoundaryKind::Prescribed).unwrap();
        let line = Interface::line([0.51, 0.0], [1.0, 0.0]);
        let plan = classify_stencils(&grid, &line, SchemeKind::Yee2);
        let ez: Vec<_> = plan.corrected.iter().filter(|n| n.field == FieldKind::Ez).collect();
        // brute-force footprint check: Ez(i, j) reads Hy(i - 1, j) and Hy(i, j)
        let mut expected = 0;
        for i in 1..20isize {
            for _j in 1..20isize {
                let left = grid.position(FieldKind::Hy, i - 1, 0)[0] > 0.51;
                let right = grid.position(FieldKind::Hy, i, 0)[0] > 0.51;
                let me = grid.position(FieldKind::Ez, i, 0)[0] > 0.51;
                if left != me || right != me {
                    expected += 1;
                }
            }
        }
        assert_eq!(ez.len(), expected);
        // one Ez column (x = 0.5) and one Hy column (x = 0.525) straddle the line
        assert_eq!(ez.len(), 19);
        assert!(ez.iter().all(|n| n.i == 10));
        let hy = plan.corrected.iter().filter(|n| n.field == FieldKind::Hy).count();
        assert_eq!(hy, 19);
    }

    #[test]
    fn no_interface_inside_means_no_corrections() {
        let grid = unit_grid(20);
        let far = Interface::circle([5.0, 5.0], 0.5);
        let plan = classify_stencils(&grid, &far, SchemeKind::Staggered4);
        assert!(plan.corrected.is_empty() && plan.targets.is_empty());
    }

    #[test]
    fn wider_stencil_corrects_more_nodes() {
        let grid = unit_grid(40);
        let star = Interface::five_star();
        let yee = classify_stencils(&grid, &star, SchemeKind::Yee2);
        let fourth = classify_stencils(&grid, &star, SchemeKind::Staggered4);
        assert!(fourth.corrected.len() >= yee.corrected.len());
    }
}
