//! Marching-squares level lines on a 2-D sweep grid.

use std::collections::HashMap;

use super::{ParameterPath, PathPoint, SweepGrid};
use crate::{Error, Result};

/// Edge of the grid: horizontal `(i, j)→(i+1, j)` or vertical `(i, j)→(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Contour of `field` at `level` through the point nearest `anchor = (x, y)`.
///
/// Corners with value ≥ level count as inside; saddle cells are resolved by
/// the cell-centre average. Crossing points are linearly interpolated along
/// cell edges. Of all polylines at the level, the one passing closest to the
/// anchor is returned. A surface that is identically equal to the level
/// yields the grid boundary.
pub fn level_line(
    grid: &SweepGrid,
    field: &str,
    level: f64,
    anchor: (f64, f64),
) -> Result<ParameterPath> {
    let ys = grid
        .y
        .as_ref()
        .ok_or_else(|| Error::InvalidGrid("level lines need a 2-D grid".into()))?;
    let xs = &grid.x;
    let f = grid.field(field)?;
    if !level.is_finite() {
        return Err(Error::NonFinite("level"));
    }
    let (nx, ny) = (xs.len(), ys.len());
    let v = |i: usize, j: usize| f[i * ny + j];

    let scale = f.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(level.abs());
    if f.iter().all(|&x| (x - level).abs() <= 1e-12 * scale.max(1e-300)) {
        return Ok(boundary(grid, level));
    }

    let point = |e: Edge| -> (f64, f64) {
        let (a, b, pa, pb) = match e {
            Edge::H(i, j) => (v(i, j), v(i + 1, j), (xs.values[i], ys.values[j]), (xs.values[i + 1], ys.values[j])),
            Edge::V(i, j) => (v(i, j), v(i, j + 1), (xs.values[i], ys.values[j]), (xs.values[i], ys.values[j + 1])),
        };
        let t = if b == a { 0.5 } else { ((level - a) / (b - a)).clamp(0.0, 1.0) };
        (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            let inside: Vec<bool> = c.iter().map(|&x| x >= level).collect();
            let case = inside
                .iter()
                .enumerate()
                .fold(0u8, |m, (k, &b)| m | ((b as u8) << k));
            // Edges: bottom (0–1), right (1–2), top (3–2), left (0–3).
            let bottom = Edge::H(i, j);
            let right = Edge::V(i + 1, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            let centre_inside = c.iter().sum::<f64>() / 4.0 >= level;
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 => {
                    if centre_inside {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                10 => {
                    if centre_inside {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    } else {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    if segments.is_empty() {
        return Err(Error::EmptyPath(level));
    }

    let polylines = chain(&segments);
    let dist2 = |p: (f64, f64)| (p.0 - anchor.0).powi(2) + (p.1 - anchor.1).powi(2);
    let best = polylines
        .iter()
        .map(|line| {
            let d = line
                .iter()
                .map(|&e| dist2(point(e)))
                .fold(f64::INFINITY, f64::min);
            (d, line)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, l)| l)
        .ok_or(Error::EmptyPath(level))?;

    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(best.len());
    for &e in best {
        let p = point(e);
        // Crossings at grid vertices appear on two edges; keep one.
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    // Start from the end nearer the anchor.
    if pts.len() > 1 && dist2(pts[pts.len() - 1]) < dist2(pts[0]) {
        pts.reverse();
    }
    Ok(ParameterPath::from_points(
        pts.into_iter()
            .map(|(x, y)| PathPoint {
                t: None,
                omega: x,
                stark: y,
                gap: level,
            })
            .collect(),
    ))
}

/// Join segments sharing an edge into polylines.
fn chain(segments: &[(Edge, Edge)]) -> Vec<Vec<Edge>> {
    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let other = |k: usize, e: Edge| if segments[k].0 == e { segments[k].1 } else { segments[k].0 };
    let extend = |line: &mut Vec<Edge>, used: &mut Vec<bool>| {
        while let Some(&tail) = line.last() {
            let next = by_edge[&tail].iter().copied().find(|&k| !used[k]);
            match next {
                Some(k) => {
                    used[k] = true;
                    line.push(other(k, tail));
                }
                None => break,
            }
        }
    };
    // Open lines first, starting from edges used only once.
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&k| by_edge[&segments[k].0].len() == 1 || by_edge[&segments[k].1].len() == 1)
        .collect();
    starts.extend(0..segments.len());
    for k in starts {
        if used[k] {
            continue;
        }
        used[k] = true;
        let (a, b) = segments[k];
        let (first, second) = if by_edge[&b].len() == 1 && by_edge[&a].len() != 1 {
            (b, a)
        } else {
            (a, b)
        };
        let mut line = vec![first, second];
        extend(&mut line, &mut used);
        line.reverse();
        extend(&mut line, &mut used);
        out.push(line);
    }
    out
}

fn boundary(grid: &SweepGrid, level: f64) -> ParameterPath {
    let xs = &grid.x.values;
    let ys = &grid.y.as_ref().expect("2-D grid").values;
    let (x0, x1, y0, y1) = (xs[0], xs[xs.len() - 1], ys[0], ys[ys.len() - 1]);
    let corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)];
    ParameterPath::from_points(
        corners
            .iter()
            .map(|&(x, y)| PathPoint {
                t: None,
                omega: x,
                stark: y,
                gap: level,
            })
            .collect(),
    )
}
