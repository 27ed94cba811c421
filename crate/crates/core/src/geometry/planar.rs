//! Planar regions bounded by line segments, with a uniform grid index over edges.
//!
//! A region is described by closed rings (interior on the left of every ring
//! edge, so outer rings run counterclockwise and holes clockwise) plus optional
//! two-sided walls: zero-thickness segments lying inside the region that act as
//! reflecting barriers but do not change inside/outside parity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    #[inline(always)]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline(always)]
    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    #[inline(always)]
    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    #[inline(always)]
    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    #[inline(always)]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline(always)]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline(always)]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline(always)]
    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum EdgeKind {
    /// Ring edge; `next` is the index of the following edge on the same ring.
    Ring { next: u32 },
    Wall,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Edge {
    pub a: Point2,
    pub b: Point2,
    pub kind: EdgeKind,
}

impl Edge {
    /// Unit normal pointing out of the region (right of `a -> b`).
    #[inline(always)]
    pub fn outward_normal(&self) -> Point2 {
        let e = self.b.sub(self.a);
        let len = e.norm();
        Point2::new(e.y / len, -e.x / len)
    }

    #[inline(always)]
    fn closest(&self, p: Point2) -> (f64, Point2, f64) {
        let e = self.b.sub(self.a);
        let len2 = e.dot(e);
        let t = if len2 > 0.0 {
            (p.sub(self.a).dot(e) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = self.a.add(e.scale(t));
        (p.dist(q), q, t)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

/// Result of a nearest-boundary query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub dist: f64,
    pub nearest: Point2,
    pub inside: bool,
}

/// Outcome of a distance query bounded by a cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capped {
    Exact(Probe),
    /// The distance is at least this value.
    AtLeast(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Crossing {
    pub t: f64,
    pub edge: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct EdgeIndex {
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    offsets: Vec<u32>,
    items: Vec<u32>,
    /// Chebyshev radius (in cells) of the empty neighbourhood around each cell.
    clear: Vec<u16>,
}

/// Longest grid side; bounds index memory for the finest prefractals.
const MAX_GRID_SIDE: usize = 2048;

impl EdgeIndex {
    fn build(edges: &[Edge], lo: Point2, hi: Point2) -> Self {
        let mut lengths: Vec<f64> = edges.iter().map(Edge::length).collect();
        lengths.sort_by(f64::total_cmp);
        let median = lengths[lengths.len() / 2].max(1e-12);
        let extent = (hi.x - lo.x).max(hi.y - lo.y);
        let cell = (2.0 * median).max(extent / MAX_GRID_SIDE as f64);
        // one cell of padding on every side
        let origin = Point2::new(lo.x - cell, lo.y - cell);
        let nx = (((hi.x - origin.x) / cell).ceil() as usize + 1).max(1);
        let ny = (((hi.y - origin.y) / cell).ceil() as usize + 1).max(1);

        let mut cells_of: Vec<(u32, u32)> = Vec::with_capacity(edges.len() * 2);
        for (i, e) in edges.iter().enumerate() {
            Self::for_each_cell(origin, cell, nx, ny, e.a, e.b, |c| cells_of.push((c as u32, i as u32)));
        }
        cells_of.sort_unstable();
        cells_of.dedup();
        let mut offsets = vec![0u32; nx * ny + 1];
        for &(c, _) in &cells_of {
            offsets[c as usize + 1] += 1;
        }
        for i in 0..nx * ny {
            offsets[i + 1] += offsets[i];
        }
        let items = cells_of.into_iter().map(|(_, e)| e).collect();

        let mut idx = Self {
            origin,
            cell,
            nx,
            ny,
            offsets,
            items,
            clear: Vec::new(),
        };
        idx.clear = idx.chessboard_clearance();
        idx
    }

    /// Cells touched by the segment `a -> b` (row-by-row supercover).
    fn for_each_cell(origin: Point2, cell: f64, nx: usize, ny: usize, a: Point2, b: Point2, mut f: impl FnMut(usize)) {
        let to_cell = |v: f64, o: f64, n: usize| -> usize { (((v - o) / cell).floor().max(0.0) as usize).min(n - 1) };
        let pad = 1e-9 * cell;
        let (ylo, yhi) = (a.y.min(b.y) - pad, a.y.max(b.y) + pad);
        let r0 = to_cell(ylo, origin.y, ny);
        let r1 = to_cell(yhi, origin.y, ny);
        for r in r0..=r1 {
            let band_lo = (origin.y + r as f64 * cell).max(ylo);
            let band_hi = (origin.y + (r + 1) as f64 * cell).min(yhi);
            let (xa, xb) = if (b.y - a.y).abs() < 1e-300 {
                (a.x.min(b.x), a.x.max(b.x))
            } else {
                let xl = a.x + (b.x - a.x) * ((band_lo - a.y) / (b.y - a.y)).clamp(0.0, 1.0);
                let xh = a.x + (b.x - a.x) * ((band_hi - a.y) / (b.y - a.y)).clamp(0.0, 1.0);
                (xl.min(xh), xl.max(xh))
            };
            let c0 = to_cell(xa - pad, origin.x, nx);
            let c1 = to_cell(xb + pad, origin.x, nx);
            for c in c0..=c1 {
                f(r * nx + c);
            }
        }
    }

    fn chessboard_clearance(&self) -> Vec<u16> {
        let (nx, ny) = (self.nx, self.ny);
        let inf = u16::MAX / 2;
        let mut d: Vec<u16> = (0..nx * ny)
            .map(|c| if self.offsets[c] == self.offsets[c + 1] { inf } else { 0 })
            .collect();
        // two-pass chamfer transform with unit weights is exact for the L-infinity metric
        for y in 0..ny {
            for x in 0..nx {
                let mut v = d[y * nx + x];
                if x > 0 {
                    v = v.min(d[y * nx + x - 1] + 1);
                }
                if y > 0 {
                    v = v.min(d[(y - 1) * nx + x] + 1);
                    if x > 0 {
                        v = v.min(d[(y - 1) * nx + x - 1] + 1);
                    }
                    if x + 1 < nx {
                        v = v.min(d[(y - 1) * nx + x + 1] + 1);
                    }
                }
                d[y * nx + x] = v;
            }
        }
        for y in (0..ny).rev() {
            for x in (0..nx).rev() {
                let mut v = d[y * nx + x];
                if x + 1 < nx {
                    v = v.min(d[y * nx + x + 1] + 1);
                }
                if y + 1 < ny {
                    v = v.min(d[(y + 1) * nx + x] + 1);
                    if x + 1 < nx {
                        v = v.min(d[(y + 1) * nx + x + 1] + 1);
                    }
                    if x > 0 {
                        v = v.min(d[(y + 1) * nx + x - 1] + 1);
                    }
                }
                d[y * nx + x] = v;
            }
        }
        d
    }

    #[inline(always)]
    fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.cell;
        let fy = (p.y - self.origin.y) / self.cell;
        if fx >= 0.0 && fy >= 0.0 && (fx as usize) < self.nx && (fy as usize) < self.ny {
            Some((fx as usize, fy as usize))
        } else {
            None
        }
    }

    #[inline(always)]
    fn cell_items(&self, cx: usize, cy: usize) -> &[u32] {
        let c = cy * self.nx + cx;
        &self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    /// Visit cells at Chebyshev ring `r` around `(cx, cy)`; returns false if the
    /// ring lies completely outside the grid.
    fn for_ring(&self, cx: usize, cy: usize, r: usize, mut f: impl FnMut(usize, usize)) -> bool {
        let (cx, cy, r) = (cx as isize, cy as isize, r as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if cx - r < 0 && cy - r < 0 && cx + r >= nx && cy + r >= ny {
            return false;
        }
        if r == 0 {
            f(cx as usize, cy as usize);
            return true;
        }
        let x0 = (cx - r).max(0);
        let x1 = (cx + r).min(nx - 1);
        for &y in &[cy - r, cy + r] {
            if y >= 0 && y < ny {
                for x in x0..=x1 {
                    f(x as usize, y as usize);
                }
            }
        }
        let y0 = (cy - r + 1).max(0);
        let y1 = (cy + r - 1).min(ny - 1);
        for &x in &[cx - r, cx + r] {
            if x >= 0 && x < nx {
                for y in y0..=y1 {
                    f(x as usize, y as usize);
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
pub struct PlanarRegion {
    pub(crate) edges: Vec<Edge>,
    ring_count: usize,
    pub(crate) lo: Point2,
    pub(crate) hi: Point2,
    index: EdgeIndex,
}

impl PlanarRegion {
    /// Build a region from rings (interior on the left) and two-sided walls.
    pub fn new(rings: &[Vec<Point2>], walls: &[(Point2, Point2)]) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::Construction("region needs at least one ring".into()));
        }
        let mut edges = Vec::new();
        for ring in rings {
            if ring.len() < 3 {
                return Err(Error::Construction("ring with fewer than 3 vertices".into()));
            }
            if ring.iter().any(|p| !p.is_finite()) {
                return Err(Error::Construction("non-finite vertex".into()));
            }
            let base = edges.len();
            let n = ring.len();
            for i in 0..n {
                let next = (base + (i + 1) % n) as u32;
                edges.push(Edge {
                    a: ring[i],
                    b: ring[(i + 1) % n],
                    kind: EdgeKind::Ring { next },
                });
            }
        }
        let ring_count = edges.len();
        for &(a, b) in walls {
            edges.push(Edge {
                a,
                b,
                kind: EdgeKind::Wall,
            });
        }
        if edges.iter().any(|e| e.length() == 0.0) {
            return Err(Error::Construction("zero-length edge".into()));
        }
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for e in &edges {
            for p in [e.a, e.b] {
                lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        let index = EdgeIndex::build(&edges, lo, hi);
        Ok(Self {
            edges,
            ring_count,
            lo,
            hi,
            index,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ring_edge_count(&self) -> usize {
        self.ring_count
    }

    /// Even-odd ray casting in +x using the grid row of `p`.
    pub fn contains(&self, p: Point2) -> bool {
        if !(p.x > self.lo.x && p.x < self.hi.x && p.y > self.lo.y && p.y < self.hi.y) {
            return false;
        }
        // boundary points (including walls) are not in the open region
        if let Capped::Exact(pr) = self.probe_capped(p, 1e-12) {
            if pr.dist <= 1e-15 {
                return false;
            }
        }
        let Some((cx, cy)) = self.index.cell_of(p) else {
            return self.contains_brute(p);
        };
        let mut inside = false;
        for x in cx..self.index.nx {
            let cell_lo = self.index.origin.x + x as f64 * self.index.cell;
            let cell_hi = self.index.origin.x + (x + 1) as f64 * self.index.cell;
            for &ei in self.index.cell_items(x, cy) {
                let e = &self.edges[ei as usize];
                if !matches!(e.kind, EdgeKind::Ring { .. }) {
                    continue;
                }
                if let Some(xc) = ray_crossing(e, p) {
                    // attribute each crossing to exactly one cell of the row
                    let owns = if x == cx { xc >= p.x && xc < cell_hi } else { xc >= cell_lo && xc < cell_hi };
                    if owns {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    fn contains_brute(&self, p: Point2) -> bool {
        let mut inside = false;
        for e in &self.edges[..self.ring_count] {
            if let Some(xc) = ray_crossing(e, p) {
                if xc >= p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Cheap lower bound on the distance from `p` to the boundary.
    #[inline(always)]
    pub fn distance_lower_bound(&self, p: Point2) -> f64 {
        match self.index.cell_of(p) {
            Some((cx, cy)) => {
                let c = self.index.clear[cy * self.index.nx + cx] as f64;
                ((c - 1.0) * self.index.cell).max(0.0)
            }
            None => 0.0,
        }
    }

    /// Exact nearest-boundary query.
    pub fn probe(&self, p: Point2) -> Probe {
        match self.probe_capped(p, f64::INFINITY) {
            Capped::Exact(pr) => pr,
            Capped::AtLeast(_) => unreachable!("uncapped probe always resolves"),
        }
    }

    /// Nearest-boundary query that gives up once the distance is known to be at least `cap`.
    pub fn probe_capped(&self, p: Point2, cap: f64) -> Capped {
        let Some((cx, cy)) = self.index.cell_of(p) else {
            return Capped::Exact(self.probe_brute(p));
        };
        let cs = self.index.cell;
        let r0 = self.index.clear[cy * self.index.nx + cx] as usize;
        if r0 > 0 && (r0 as f64 - 1.0) * cs >= cap {
            return Capped::AtLeast((r0 as f64 - 1.0) * cs);
        }
        let mut best = f64::INFINITY;
        let mut best_pt = p;
        let mut best_ring = f64::INFINITY;
        let mut ring_feature: Option<(u32, f64)> = None;
        let mut r = r0;
        loop {
            let any = self.index.for_ring(cx, cy, r, |x, y| {
                for &ei in self.index.cell_items(x, y) {
                    let e = &self.edges[ei as usize];
                    let (d, q, t) = e.closest(p);
                    if d < best {
                        best = d;
                        best_pt = q;
                    }
                    if matches!(e.kind, EdgeKind::Ring { .. }) && d < best_ring {
                        best_ring = d;
                        ring_feature = Some((ei, t));
                    }
                }
            });
            if !any {
                break;
            }
            // every edge not yet scanned is at least `reach` away
            let reach = r as f64 * cs;
            if best_ring <= reach {
                break;
            }
            if best <= reach {
                if best >= cap {
                    return Capped::AtLeast(best);
                }
            } else if reach >= cap {
                return Capped::AtLeast(reach);
            }
            r += 1;
        }
        if best_ring.is_infinite() {
            return Capped::Exact(self.probe_brute(p));
        }
        let inside = match ring_feature {
            Some((ei, t)) => self.inside_from_feature(p, ei, t),
            None => false,
        };
        Capped::Exact(Probe {
            dist: best,
            nearest: best_pt,
            inside,
        })
    }

    fn probe_brute(&self, p: Point2) -> Probe {
        let mut best = f64::INFINITY;
        let mut best_pt = p;
        let mut best_ring = f64::INFINITY;
        let mut feature = (0u32, 0.0);
        for (i, e) in self.edges.iter().enumerate() {
            let (d, q, t) = e.closest(p);
            if d < best {
                best = d;
                best_pt = q;
            }
            if i < self.ring_count && d < best_ring {
                best_ring = d;
                feature = (i as u32, t);
            }
        }
        Probe {
            dist: best,
            nearest: best_pt,
            inside: self.inside_from_feature(p, feature.0, feature.1),
        }
    }

    /// Inside test from the nearest ring feature, using the vertex pseudo-normal at corners.
    fn inside_from_feature(&self, p: Point2, ei: u32, t: f64) -> bool {
        let e = &self.edges[ei as usize];
        let n = if t > 0.0 && t < 1.0 {
            e.outward_normal()
        } else if t >= 1.0 {
            let EdgeKind::Ring { next } = e.kind else { unreachable!() };
            e.outward_normal().add(self.edges[next as usize].outward_normal())
        } else {
            let prev = self.prev_edge(ei);
            e.outward_normal().add(self.edges[prev as usize].outward_normal())
        };
        let v = if t >= 1.0 {
            e.b
        } else if t <= 0.0 {
            e.a
        } else {
            e.a.add(e.b.sub(e.a).scale(t))
        };
        p.sub(v).dot(n) < 0.0
    }

    fn prev_edge(&self, ei: u32) -> u32 {
        // rings are stored contiguously; walk forward until we come back
        let mut j = ei;
        loop {
            let EdgeKind::Ring { next } = self.edges[j as usize].kind else { unreachable!() };
            if next == ei {
                return j;
            }
            j = next;
        }
    }

    /// First boundary crossing of the directed segment `p -> q`, skipping edge `skip`.
    pub(crate) fn first_crossing(&self, p: Point2, q: Point2, skip: Option<u32>) -> Option<Crossing> {
        let d = q.sub(p);
        let mut best: Option<Crossing> = None;
        let test = |ei: u32, best: &mut Option<Crossing>| {
            if Some(ei) == skip {
                return;
            }
            let e = &self.edges[ei as usize];
            let ev = e.b.sub(e.a);
            let denom = d.cross(ev);
            let two_sided = matches!(e.kind, EdgeKind::Wall);
            if denom == 0.0 || (!two_sided && denom < 0.0) {
                return;
            }
            let ap = e.a.sub(p);
            let t = ap.cross(ev) / denom;
            let u = ap.cross(d) / denom;
            if !(0.0..=1.0).contains(&u) || t > 1.0 {
                return;
            }
            if t < 0.0 || (two_sided && t <= 1e-12) {
                return;
            }
            if best.map_or(true, |b| t < b.t) {
                *best = Some(Crossing { t, edge: ei });
            }
        };
        let lo = Point2::new(p.x.min(q.x), p.y.min(q.y));
        let hi = Point2::new(p.x.max(q.x), p.y.max(q.y));
        let idx = &self.index;
        let c0 = idx.cell_of(lo);
        let c1 = idx.cell_of(hi);
        match (c0, c1) {
            (Some((x0, y0)), Some((x1, y1))) if (x1 - x0 + 1) * (y1 - y0 + 1) <= 4096 => {
                for y in y0..=y1 {
                    for x in x0..=x1 {
                        for &ei in idx.cell_items(x, y) {
                            test(ei, &mut best);
                        }
                    }
                }
            }
            _ => {
                for ei in 0..self.edges.len() as u32 {
                    test(ei, &mut best);
                }
            }
        }
        best
    }

    /// Specular reflection of the move `cur -> prop` with projection fallback.
    pub fn reflect(&self, cur: Point2, prop: Point2) -> Point2 {
        let mut from = cur;
        let mut to = prop;
        let mut skip = None;
        for _ in 0..16 {
            let Some(hit) = self.first_crossing(from, to, skip) else {
                return to;
            };
            let e = &self.edges[hit.edge as usize];
            let h = from.add(to.sub(from).scale(hit.t));
            let rem = to.sub(h);
            let n = e.outward_normal();
            let reflected = rem.sub(n.scale(2.0 * rem.dot(n)));
            from = h;
            to = h.add(reflected);
            skip = Some(hit.edge);
        }
        let pr = self.probe(to);
        if pr.inside {
            to
        } else {
            pr.nearest
        }
    }

    pub fn area(&self) -> f64 {
        // shoelace over ring edges; holes are clockwise and subtract
        0.5 * self.edges[..self.ring_count].iter().map(|e| e.a.cross(e.b)).sum::<f64>()
    }

    /// Area centroid of the ring edges.
    pub fn centroid(&self) -> Point2 {
        let mut a = 0.0;
        let mut c = Point2::default();
        for e in &self.edges[..self.ring_count] {
            let w = e.a.cross(e.b);
            a += w;
            c = c.add(e.a.add(e.b).scale(w));
        }
        c.scale(1.0 / (3.0 * a))
    }

    pub fn median_edge_length(&self) -> f64 {
        let mut l: Vec<f64> = self.edges.iter().map(Edge::length).collect();
        l.sort_by(f64::total_cmp);
        l[l.len() / 2]
    }

    pub fn grid_cell_size(&self) -> f64 {
        self.index.cell
    }
}

/// x-coordinate where the horizontal ray through `p` crosses edge `e`, half-open in y.
#[inline(always)]
fn ray_crossing(e: &Edge, p: Point2) -> Option<f64> {
    let (a, b) = (e.a, e.b);
    if (a.y > p.y) != (b.y > p.y) {
        Some(a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y))
    } else {
        None
    }
}

/// True if no two non-adjacent edges of the closed polygon intersect.
pub fn is_simple(vertices: &[Point2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let seg = |i: usize| (vertices[i], vertices[(i + 1) % n]);
    let region = match PlanarRegion::new(&[vertices.to_vec()], &[]) {
        Ok(r) => r,
        Err(_) => return false,
    };
    for i in 0..n {
        let (a, b) = seg(i);
        let lo = Point2::new(a.x.min(b.x), a.y.min(b.y));
        let hi = Point2::new(a.x.max(b.x), a.y.max(b.y));
        let (Some((x0, y0)), Some((x1, y1))) = (region.index.cell_of(lo), region.index.cell_of(hi)) else {
            continue;
        };
        for y in y0..=y1 {
            for x in x0..=x1 {
                for &j in region.index.cell_items(x, y) {
                    let j = j as usize;
                    if j == i || j == (i + 1) % n || i == (j + 1) % n {
                        continue;
                    }
                    let (c, d) = seg(j);
                    if segments_intersect(a, b, c, d) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o = |p: Point2, q: Point2, r: Point2| q.sub(p).cross(r.sub(p));
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0 {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2| {
        o(p, q, r) == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d)
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PlanarRegion {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        PlanarRegion::new(&[v], &[]).unwrap()
    }

    #[test]
    fn square_queries() {
        let r = unit_square();
        assert!(r.contains(Point2::new(0.5, 0.5)));
        assert!(!r.contains(Point2::new(1.5, 0.5)));
        assert!(!r.contains(Point2::new(1.0, 0.5)));
        let pr = r.probe(Point2::new(0.1, 0.3));
        assert!((pr.dist - 0.1).abs() < 1e-15);
        assert!(pr.inside);
        assert!(!r.probe(Point2::new(-0.1, 0.3)).inside);
        assert!(!r.probe(Point2::new(-0.1, -0.1)).inside);
        assert!((r.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reflect_across_bottom_edge() {
        let r = unit_square();
        let out = r.reflect(Point2::new(0.5, 0.05), Point2::new(0.5, -0.03));
        assert!((out.x - 0.5).abs() < 1e-15 && (out.y - 0.03).abs() < 1e-15);
    }

    #[test]
    fn reflect_corner_double_bounce() {
        let r = unit_square();
        let out = r.reflect(Point2::new(0.02, 0.02), Point2::new(-0.03, -0.01));
        assert!((out.x - 0.03).abs() < 1e-12 && (out.y - 0.01).abs() < 1e-12);
    }

    #[test]
    fn hole_and_wall() {
        let outer = vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 4.0),
            Point2::new(0.0, 4.0),
        ];
        let hole = vec![
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 2.0),
            Point2::new(2.0, 2.0),
            Point2::new(2.0, 1.0),
        ];
        let wall = (Point2::new(3.0, 0.0), Point2::new(3.0, 3.0));
        let r = PlanarRegion::new(&[outer, hole], &[wall]).unwrap();
        assert!(!r.contains(Point2::new(1.5, 1.5)));
        assert!(r.contains(Point2::new(0.5, 1.5)));
        assert!(r.contains(Point2::new(3.5, 1.5)));
        assert!(!r.contains(Point2::new(3.0, 1.5)));
        assert!((r.area() - 15.0).abs() < 1e-12);
        // wall is reflecting from both sides
        let out = r.reflect(Point2::new(2.9, 1.0), Point2::new(3.1, 1.0));
        assert!((out.x - 2.9).abs() < 1e-12);
        let out = r.reflect(Point2::new(3.1, 1.0), Point2::new(2.9, 1.0));
        assert!((out.x - 3.1).abs() < 1e-12);
        // passes above the wall end
        let out = r.reflect(Point2::new(2.9, 3.5), Point2::new(3.1, 3.5));
        assert!((out.x - 3.1).abs() < 1e-12);
        let pr = r.probe(Point2::new(3.05, 1.0));
        assert!((pr.dist - 0.05).abs() < 1e-12 && pr.inside);
        assert!(!r.probe(Point2::new(1.5, 1.6)).inside);
    }

    #[test]
    fn simplicity() {
        let bow = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(!is_simple(&bow));
        let sq = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(is_simple(&sq));
        assert!(signed_area(&sq) > 0.0);
    }
}
