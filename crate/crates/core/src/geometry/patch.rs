//! Space-time patches around interface nodes.

use super::{InterfaceSample, Interface};
use crate::grid::{FieldKind, NodeIndex, StaggeredGrid2D, GHOST};
use crate::{Error, Result, Side};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchOptions {
    /// Side length of the square spatial box.
    pub side_length: f64,
    /// Length of the time window.
    pub time_length: f64,
    /// Grid nodes per fictitious segment (spatial interpolant degree + 1).
    pub segment_nodes: usize,
    /// Longest arc carrying one 3-point Gauss rule.
    pub max_arc: f64,
}

/// A grid-aligned piece of a grid line, lying in one subdomain, on which
/// one field component of that side's extension is tied to the
/// finite-difference values.
#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousSegment {
    pub field: FieldKind,
    pub side: Side,
    /// 1: tangential E, 2: tangential H, 4: normal H.
    pub kind: u8,
    /// 0 when the segment runs along x, 1 along y.
    pub axis: usize,
    pub normal: [f64; 2],
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Lattice indices of the interpolation nodes (not wrapped).
    pub nodes: Vec<(isize, isize)>,
}

impl FictitiousSegment {
    pub fn constrains_electric(&self) -> bool {
        self.kind == 1
    }

    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).abs() + (self.end[1] - self.start[1]).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub id: usize,
    pub center_node: NodeIndex,
    pub center: [f64; 2],
    pub half_width: f64,
    pub time_length: f64,
    pub samples: Vec<InterfaceSample>,
    pub segments: Vec<FictitiousSegment>,
}

impl Patch {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let tol = 1e-9 * self.half_width;
        (p[0] - self.center[0]).abs() <= self.half_width + tol && (p[1] - self.center[1]).abs() <= self.half_width + tol
    }

    pub fn segment_count(&self, side: Side, electric: bool) -> usize {
        self.segments.iter().filter(|s| s.side == side && s.constrains_electric() == electric).count()
    }
}

/// Kind of the condition a field imposes on a segment running along `axis`.
fn segment_kind(field: FieldKind, axis: usize) -> u8 {
    match (field, axis) {
        (FieldKind::Ez, _) => 1,
        (FieldKind::Hx, 0) | (FieldKind::Hy, 1) => 2,
        _ => 4,
    }
}

/// Builds the patch centered on `node`. Fictitious segments are cut from
/// runs of consecutive nodes of each field along both grid-line directions,
/// keeping nodes of one side at least one cell away from the interface; the
/// distance requirement is relaxed only if a side would otherwise lack an
/// electric or a magnetic constraint.
pub fn build_patch(
    interface: &Interface,
    grid: &StaggeredGrid2D,
    node: NodeIndex,
    options: &PatchOptions,
    id: usize,
) -> Result<Patch> {
    let center = grid.position(node.field, node.i, node.j);
    let half = 0.5 * options.side_length;
    let samples = interface.samples_in_box(center, half, options.max_arc);
    if samples.is_empty() {
        return Err(Error::NoInterfaceInPatch { i: node.i, j: node.j });
    }
    let h = grid.h();
    let mut patch = Patch {
        id,
        center_node: node,
        center,
        half_width: half,
        time_length: options.time_length,
        samples,
        segments: Vec::new(),
    };
    for side in Side::BOTH {
        let mut found = None;
        for d_min in [h, 0.5 * h, 0.0] {
            let segs = side_segments(interface, grid, &patch, side, d_min, options.segment_nodes);
            let has_e = segs.iter().any(|s| s.constrains_electric());
            let has_h = segs.iter().any(|s| !s.constrains_electric());
            if has_e && has_h {
                found = Some(segs);
                break;
            }
        }
        match found {
            Some(segs) => patch.segments.extend(segs),
            None => {
                return Err(Error::SingularPatch {
                    patch: id,
                    reason: format!("no room for fictitious segments on the {side:?} side"),
                })
            }
        }
    }
    Ok(patch)
}

fn side_segments(
    interface: &Interface,
    grid: &StaggeredGrid2D,
    patch: &Patch,
    side: Side,
    d_min: f64,
    nodes_per_segment: usize,
) -> Vec<FictitiousSegment> {
    let mut out = Vec::new();
    for field in FieldKind::ALL {
        let (ri, rj) = index_range(grid, field, patch);
        let admissible = |i: isize, j: isize| {
            if !storable(grid, field, i, j) {
                return false;
            }
            let p = grid.position(field, i, j);
            interface.classify(p) == side && interface.distance(p) >= d_min
        };
        for axis in 0..2 {
            let (outer, inner) = if axis == 0 { (rj.clone(), ri.clone()) } else { (ri.clone(), rj.clone()) };
            for a in outer {
                let mut run: Vec<(isize, isize)> = Vec::new();
                let mut flush = |run: &mut Vec<(isize, isize)>| {
                    for chunk in run.chunks_exact(nodes_per_segment) {
                        let first = grid.position(field, chunk[0].0, chunk[0].1);
                        let last = grid.position(field, chunk[chunk.len() - 1].0, chunk[chunk.len() - 1].1);
                        out.push(FictitiousSegment {
                            field,
                            side,
                            kind: segment_kind(field, axis),
                            axis,
                            normal: if axis == 0 { [0.0, 1.0] } else { [1.0, 0.0] },
                            start: first,
                            end: last,
                            nodes: chunk.to_vec(),
                        });
                    }
                    run.clear();
                };
                for b in inner.clone() {
                    let (i, j) = if axis == 0 { (b, a) } else { (a, b) };
                    if admissible(i, j) {
                        run.push((i, j));
                    } else {
                        flush(&mut run);
                    }
                }
                flush(&mut run);
            }
        }
    }
    out
}

/// Lattice index ranges of `field` nodes inside the patch box.
fn index_range(grid: &StaggeredGrid2D, field: FieldKind, patch: &Patch) -> (std::ops::Range<isize>, std::ops::Range<isize>) {
    let o = field.offset();
    let tol = 1e-9;
    let hw = patch.half_width;
    let lo_i = ((patch.center[0] - hw - grid.x_min) / grid.dx - o[0] - tol).ceil() as isize;
    let hi_i = ((patch.center[0] + hw - grid.x_min) / grid.dx - o[0] + tol).floor() as isize;
    let lo_j = ((patch.center[1] - hw - grid.y_min) / grid.dy - o[1] - tol).ceil() as isize;
    let hi_j = ((patch.center[1] + hw - grid.y_min) / grid.dy - o[1] + tol).floor() as isize;
    (lo_i..hi_i + 1, lo_j..hi_j + 1)
}

/// Whether the lattice index maps to stored data (owned or ghost for
/// prescribed boundaries, anything for periodic ones).
fn storable(grid: &StaggeredGrid2D, field: FieldKind, i: isize, j: isize) -> bool {
    match grid.boundary {
        crate::grid::BoundaryKind::Periodic => true,
        crate::grid::BoundaryKind::Prescribed => {
            let (ni, nj) = grid.extent(field);
            let g = GHOST as isize;
            i >= -g && j >= -g && i < ni as isize + g && j < nj as isize + g
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;

    fn circle_setup(h: f64) -> (Interface, StaggeredGrid2D) {
        let grid = StaggeredGrid2D::uniform([-1.0, 1.0, -1.0, 1.0], h, 0.5, BoundaryKind::Prescribed).unwrap();
        (Interface::circle([0.0, 0.0], 0.6), grid)
    }

    fn options(h: f64, beta: f64) -> PatchOptions {
        PatchOptions { side_length: beta * h, time_length: h, segment_nodes: 3, max_arc: 0.5 * h }
    }

    #[test]
    fn patch_on_circle_has_arc_and_segments() {
        let h = 1.0 / 20.0;
        let (circle, grid) = circle_setup(h);
        // Ez node (32, 20) sits at (0.6, 0.0), right on the interface
        let node = NodeIndex::new(FieldKind::Ez, 32, 20);
        let patch = build_patch(&circle, &grid, node, &options(h, 7.0), 0).unwrap();
        assert!((2.0 * patch.half_width - 0.35).abs() < 1e-14);
        assert!(!patch.samples.is_empty());
        for side in Side::BOTH {
            assert!(patch.segment_count(side, true) > 0);
            assert!(patch.segment_count(side, false) > 0);
        }
        for seg in &patch.segments {
            for &(i, j) in &seg.nodes {
                let p = grid.position(seg.field, i, j);
                assert_eq!(circle.classify(p), seg.side);
                assert!(circle.distance(p) >= h);
                assert!(patch.contains(p));
            }
        }
    }

    #[test]
    fn patch_away_from_interface_is_rejected() {
        let h = 1.0 / 20.0;
        let (circle, grid) = circle_setup(h);
        let node = NodeIndex::new(FieldKind::Ez, 20, 20);
        let err = build_patch(&circle, &grid, node, &options(h, 7.0), 3).unwrap_err();
        assert!(matches!(err, Error::NoInterfaceInPatch { i: 20, j: 20 }));
    }
}
