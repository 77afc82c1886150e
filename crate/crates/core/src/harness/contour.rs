//! Unity contours of the exponentiated-work field: marching squares over a
//! `(delta_max, tau)` grid with every edge crossing refined by bisection
//! against the live engine.

use std::collections::HashMap;

use crate::harness::sweep::SweepGrid;

/// Default refinement target `| <e^{-beta W}> - 1 |` for contour vertices.
pub const DEFAULT_CONTOUR_TOL: f64 = 1e-8;
/// Bisection iteration cap per vertex.
const MAX_BISECT: u32 = 60;

/// One refined contour vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourVertex {
    pub delta_max: f64,
    pub tau: f64,
    /// Field value at the vertex after refinement.
    pub value: f64,
    /// Cleared when bisection hit the iteration cap (or the evaluator failed)
    /// before reaching the tolerance.
    pub refined: bool,
}

/// Polylines where the exponentiated-work average crosses unity.
#[derive(Debug, Clone)]
pub struct ContourSet {
    pub polylines: Vec<Vec<ContourVertex>>,
    /// Cells whose four corners all sit within `contour_tol` of unity:
    /// tangent or flat regions that cannot be traced.
    pub tangency_cells: Vec<(usize, usize)>,
    pub contour_tol: f64,
}

impl ContourSet {
    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }
}

/// Edge of the grid, identified so that shared crossings stitch segments into
/// polylines. `TauEdge(i, j)` runs from `(i, j)` to `(i, j+1)` at fixed
/// `delta`; `DeltaEdge(i, j)` runs from `(i, j)` to `(i+1, j)` at fixed `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    Tau(usize, usize),
    Delta(usize, usize),
}

/// Extract the `value = 1` contours of a populated grid.
///
/// `eval(delta_max, tau)` re-evaluates the field from scratch for bisection;
/// it returns `None` on numerical failure, which leaves the affected vertex
/// at the linear-interpolation estimate with `refined = false`.
pub fn extract_contours<F>(grid: &SweepGrid, eval: F, contour_tol: f64) -> ContourSet
where
    F: Fn(f64, f64) -> Option<f64>,
{
    let nd = grid.delta_values.len();
    let nt = grid.tau_values.len();
    let f = |i: usize, j: usize| grid.value(i, j) - 1.0;

    let mut tangency_cells = Vec::new();
    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    let mut crossings: HashMap<EdgeId, ContourVertex> = HashMap::new();

    let mut crossing_on = |edge: EdgeId| -> Option<()> {
        if crossings.contains_key(&edge) {
            return Some(());
        }
        let ((d0, t0, f0), (d1, t1, f1)) = match edge {
            EdgeId::Tau(i, j) => (
                (grid.delta_values[i], grid.tau_values[j], f(i, j)),
                (grid.delta_values[i], grid.tau_values[j + 1], f(i, j + 1)),
            ),
            EdgeId::Delta(i, j) => (
                (grid.delta_values[i], grid.tau_values[j], f(i, j)),
                (grid.delta_values[i + 1], grid.tau_values[j], f(i + 1, j)),
            ),
        };
        if f0.is_nan() || f1.is_nan() || (f0 > 0.0) == (f1 > 0.0) {
            return None;
        }
        let vertex = bisect_edge((d0, t0, f0), (d1, t1, f1), &eval, contour_tol);
        crossings.insert(edge, vertex);
        Some(())
    };

    for i in 0..nd.saturating_sub(1) {
        for j in 0..nt.saturating_sub(1) {
            let corners = [f(i, j), f(i, j + 1), f(i + 1, j), f(i + 1, j + 1)];
            if corners.iter().any(|v| v.is_nan()) {
                continue;
            }
            if corners.iter().all(|v| v.abs() < contour_tol) {
                tangency_cells.push((i, j));
                continue;
            }
            // corner bits: 1 = (i, j), 2 = (i, j+1), 4 = (i+1, j), 8 = (i+1, j+1)
            let mut case = 0usize;
            if corners[0] > 0.0 {
                case |= 1;
            }
            if corners[1] > 0.0 {
                case |= 2;
            }
            if corners[2] > 0.0 {
                case |= 4;
            }
            if corners[3] > 0.0 {
                case |= 8;
            }

            let left = EdgeId::Tau(i, j); // between corners 1 and 2
            let right = EdgeId::Tau(i + 1, j); // between 4 and 8
            let bottom = EdgeId::Delta(i, j); // between 1 and 4
            let top = EdgeId::Delta(i, j + 1); // between 2 and 8

            let pairs: &[(EdgeId, EdgeId)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(left, bottom)],
                2 | 13 => &[(left, top)],
                4 | 11 => &[(bottom, right)],
                8 | 7 => &[(top, right)],
                3 | 12 => &[(bottom, top)],
                5 | 10 => &[(left, right)],
                6 | 9 => {
                    // saddle: resolve the pairing with the cell-center value
                    let dc = 0.5 * (grid.delta_values[i] + grid.delta_values[i + 1]);
                    let tc = 0.5 * (grid.tau_values[j] + grid.tau_values[j + 1]);
                    let center = eval(dc, tc).map(|v| v - 1.0).unwrap_or(0.0);
                    let center_matches_corner0 = (center > 0.0) == (corners[0] > 0.0);
                    if center_matches_corner0 {
                        &[(left, top), (bottom, right)]
                    } else {
                        &[(left, bottom), (top, right)]
                    }
                }
                _ => unreachable!(),
            };
            for &(a, b) in pairs {
                if crossing_on(a).is_some() && crossing_on(b).is_some() {
                    segments.push((a, b));
                }
            }
        }
    }

    let polylines = chain_segments(&segments)
        .into_iter()
        .map(|edges| edges.into_iter().map(|e| crossings[&e]).collect())
        .collect();

    ContourSet {
        polylines,
        tangency_cells,
        contour_tol,
    }
}

fn bisect_edge<F>(a: (f64, f64, f64), b: (f64, f64, f64), eval: &F, tol: f64) -> ContourVertex
where
    F: Fn(f64, f64) -> Option<f64>,
{
    let (mut x0, mut f0) = ((a.0, a.1), a.2);
    let (mut x1, mut f1) = ((b.0, b.1), b.2);
    // endpoint already on the contour
    for (x, fv) in [(x0, f0), (x1, f1)] {
        if fv.abs() <= tol {
            return ContourVertex {
                delta_max: x.0,
                tau: x.1,
                value: fv + 1.0,
                refined: true,
            };
        }
    }
    for _ in 0..MAX_BISECT {
        let mid = (0.5 * (x0.0 + x1.0), 0.5 * (x0.1 + x1.1));
        let fm = match eval(mid.0, mid.1) {
            Some(v) => v - 1.0,
            None => break,
        };
        if fm.abs() <= tol {
            return ContourVertex {
                delta_max: mid.0,
                tau: mid.1,
                value: fm + 1.0,
                refined: true,
            };
        }
        if (fm > 0.0) == (f0 > 0.0) {
            x0 = mid;
            f0 = fm;
        } else {
            x1 = mid;
            f1 = fm;
        }
    }
    // iteration cap: report the better endpoint, unrefined
    let (x, fv) = if f0.abs() <= f1.abs() {
        (x0, f0)
    } else {
        (x1, f1)
    };
    ContourVertex {
        delta_max: x.0,
        tau: x.1,
        value: fv + 1.0,
        refined: false,
    }
}

/// Stitch edge-to-edge segments into polylines by walking shared endpoints.
fn chain_segments(segments: &[(EdgeId, EdgeId)]) -> Vec<Vec<EdgeId>> {
    let mut adjacency: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(k);
        adjacency.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut line = vec![a, b];

        // extend forward from the tail, then backward from the head
        for forward in [true, false] {
            loop {
                let tip = if forward {
                    *line.last().unwrap()
                } else {
                    line[0]
                };
                let next = adjacency
                    .get(&tip)
                    .and_then(|ks| ks.iter().find(|&&k| !used[k]).copied());
                let Some(k) = next else { break };
                used[k] = true;
                let (x, y) = segments[k];
                let other = if x == tip { y } else { x };
                if forward {
                    line.push(other);
                } else {
                    line.insert(0, other);
                }
            }
        }
        polylines.push(line);
    }
    polylines
}
