//! Simply connected planar domain made of rectangular cells around a fat Cantor
//! dust, glued along a spanning tree of narrow slits.
//!
//! The black set is `C x C` where `C` is the fat Cantor set obtained by
//! removing an open middle interval of length `4^-j` from each of the `2^(j-1)`
//! intervals present at stage `j`. Its measure is 1/2, so the black set has
//! area 1/4. The white cells of the stage-`g` tiling are joined through slits
//! whose width at generation `k` is `exp(-k^w)`.

use std::collections::VecDeque;

use super::planar::Point2;
use crate::error::{Error, Result};

/// Margin strip around the unit square so black cells never touch the outer ring.
pub const MARGIN: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPiece {
    pub lo: f64,
    pub hi: f64,
    /// Stage at which the piece appears (gaps) or the final stage (kept pieces).
    pub generation: u32,
    pub kept: bool,
}

/// Fat Cantor intervals and gaps on `[0, 1]` after `generations` stages, in order.
pub fn fat_cantor_pieces(generations: u32) -> Vec<AxisPiece> {
    let mut kept = vec![(0.0f64, 1.0f64)];
    let mut gaps: Vec<AxisPiece> = Vec::new();
    for j in 1..=generations {
        let removed = 0.25f64.powi(j as i32);
        let mut next = Vec::with_capacity(kept.len() * 2);
        for (lo, hi) in kept {
            let mid = 0.5 * (lo + hi);
            let (a, b) = (mid - 0.5 * removed, mid + 0.5 * removed);
            next.push((lo, a));
            next.push((b, hi));
            gaps.push(AxisPiece {
                lo: a,
                hi: b,
                generation: j,
                kept: false,
            });
        }
        kept = next;
    }
    let mut pieces: Vec<AxisPiece> = kept
        .into_iter()
        .map(|(lo, hi)| AxisPiece {
            lo,
            hi,
            generation: generations,
            kept: true,
        })
        .chain(gaps)
        .collect();
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    pieces
}

/// Total length removed after `generations` stages.
pub fn removed_length(generations: u32) -> f64 {
    fat_cantor_pieces(generations).iter().filter(|p| !p.kept).map(|p| p.hi - p.lo).sum()
}

pub struct CorridorLayout {
    pub outer: Vec<Point2>,
    pub holes: Vec<Vec<Point2>>,
    pub walls: Vec<(Point2, Point2)>,
    pub white_cells: usize,
    pub slits: usize,
    pub min_slit: f64,
}

fn slit_width(generation: u32, width_exponent: f64) -> f64 {
    (-(generation.max(1) as f64).powf(width_exponent)).exp()
}

pub fn build(generations: u32, width_exponent: f64) -> Result<CorridorLayout> {
    let mut axis = vec![AxisPiece {
        lo: -MARGIN,
        hi: 0.0,
        generation: 1,
        kept: false,
    }];
    axis.extend(fat_cantor_pieces(generations));
    axis.push(AxisPiece {
        lo: 1.0,
        hi: 1.0 + MARGIN,
        generation: 1,
        kept: false,
    });
    let n = axis.len();
    let white = |i: usize, j: usize| !(axis[i].kept && axis[j].kept);
    let gen = |i: usize, j: usize| axis[i].generation.max(axis[j].generation);
    let id = |i: usize, j: usize| j * n + i;

    // adjacency between white cells: (cell a, cell b, shared edge endpoints)
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n * n];
    let mut shared: Vec<(usize, usize, Point2, Point2)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !white(i, j) {
                continue;
            }
            if i + 1 < n && white(i + 1, j) {
                let x = axis[i].hi;
                let e = shared.len();
                shared.push((id(i, j), id(i + 1, j), Point2::new(x, axis[j].lo), Point2::new(x, axis[j].hi)));
                adj[id(i, j)].push((id(i + 1, j), e));
                adj[id(i + 1, j)].push((id(i, j), e));
            }
            if j + 1 < n && white(i, j + 1) {
                let y = axis[j].hi;
                let e = shared.len();
                shared.push((id(i, j), id(i, j + 1), Point2::new(axis[i].lo, y), Point2::new(axis[i].hi, y)));
                adj[id(i, j)].push((id(i, j + 1), e));
                adj[id(i, j + 1)].push((id(i, j), e));
            }
        }
    }

    // breadth-first spanning tree from the central cell
    let centre = axis.iter().position(|p| p.lo <= 0.5 && p.hi >= 0.5).expect("axis covers 0.5");
    let root = id(centre, centre);
    let mut seen = vec![false; n * n];
    let mut tree_edge = vec![false; shared.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        for &(nb, e) in &adj[c] {
            if !seen[nb] {
                seen[nb] = true;
                tree_edge[e] = true;
                queue.push_back(nb);
            }
        }
    }

    let mut walls = Vec::new();
    let mut slits = 0;
    let mut min_slit = f64::INFINITY;
    for (e, &(a, b, p, q)) in shared.iter().enumerate() {
        if !tree_edge[e] {
            walls.push((p, q));
            continue;
        }
        let (ai, aj) = (a % n, a / n);
        let (bi, bj) = (b % n, b / n);
        let g = gen(ai, aj).max(gen(bi, bj));
        let len = p.dist(q);
        let w = slit_width(g, width_exponent).min(0.5 * len);
        let dir = q.sub(p).scale(1.0 / len);
        let mid = p.add(q).scale(0.5);
        let s0 = mid.sub(dir.scale(0.5 * w));
        let s1 = mid.add(dir.scale(0.5 * w));
        walls.push((p, s0));
        walls.push((s1, q));
        slits += 1;
        min_slit = min_slit.min(s0.dist(s1));
    }

    // connectivity through open slits only
    let mut open = vec![false; n * n];
    open[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        for &(nb, e) in &adj[c] {
            if tree_edge[e] && !open[nb] {
                let (_, _, p, q) = shared[e];
                let len = p.dist(q);
                let dir = q.sub(p).scale(1.0 / len);
                let mid = p.add(q).scale(0.5);
                let (ai, aj) = (c % n, c / n);
                let (bi, bj) = (nb % n, nb / n);
                let w = slit_width(gen(ai, aj).max(gen(bi, bj)), width_exponent).min(0.5 * len);
                // the slit must survive rounding of its endpoints
                if mid.sub(dir.scale(0.5 * w)) == mid.add(dir.scale(0.5 * w)) {
                    continue;
                }
                open[nb] = true;
                queue.push_back(nb);
            }
        }
    }
    let white_cells = (0..n * n).filter(|&c| white(c % n, c / n)).count();
    let reached = open.iter().filter(|&&o| o).count();
    if reached != white_cells {
        return Err(Error::Construction(format!(
            "corridor tiling is disconnected: {reached} of {white_cells} cells reachable through open slits"
        )));
    }

    let (lo, hi) = (-MARGIN, 1.0 + MARGIN);
    let outer = vec![Point2::new(lo, lo), Point2::new(hi, lo), Point2::new(hi, hi), Point2::new(lo, hi)];
    let holes = axis
        .iter()
        .filter(|p| p.kept)
        .flat_map(|px| {
            axis.iter().filter(|p| p.kept).map(move |py| {
                // clockwise
                vec![
                    Point2::new(px.lo, py.lo),
                    Point2::new(px.lo, py.hi),
                    Point2::new(px.hi, py.hi),
                    Point2::new(px.hi, py.lo),
                ]
            })
        })
        .collect();
    Ok(CorridorLayout {
        outer,
        holes,
        walls,
        white_cells,
        slits,
        min_slit,
    })
}
