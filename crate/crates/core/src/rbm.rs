//! Reflected Brownian paths on a uniform time grid, boundary contact sets and
//! path-regularity diagnostics.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::fracdim::PointCloud;
use crate::geometry::{Capped, DomainProbe, DomainSpec, PlanarRegion, Point2, CLOSURE_TOL};
use crate::rng::CounterRng;
use crate::timeset::{cell_count, grid_steps, TimeSet};

/// Default boundary tolerance multiplier: `eps = 2 sqrt(dt)`.
pub const DEFAULT_EPS_FACTOR: f64 = 2.0;

/// Largest admissible simulation step.
pub const MAX_DT: f64 = 1e-3;

/// Discretized trajectory on the grid `k dt`, `k = 0..=floor(T/dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub dt: f64,
    pub horizon: f64,
    pub dim: usize,
    pub seed: u64,
    pub domain_id: String,
    positions: Vec<f64>,
}

impl PathSample {
    pub fn from_positions(dt: f64, horizon: f64, dim: usize, seed: u64, domain_id: String, positions: Vec<f64>) -> Result<Self> {
        if dim == 0 || positions.len() % dim != 0 {
            return Err(invalid("positions", "length is not a multiple of the dimension"));
        }
        let expected = grid_steps(horizon, dt) + 1;
        if positions.len() / dim != expected {
            return Err(invalid(
                "positions",
                format!("expected {expected} points for T={horizon}, dt={dt}, got {}", positions.len() / dim),
            ));
        }
        Ok(Self {
            dt,
            horizon,
            dim,
            seed,
            domain_id,
            positions,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.len().saturating_sub(1)
    }

    #[inline]
    pub fn position(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.positions.chunks_exact(self.dim)
    }

    pub fn raw(&self) -> &[f64] {
        &self.positions
    }

    /// CSV with columns `step,x,y[,z],dist_to_boundary`.
    pub fn write_csv<W: Write>(&self, domain: &DomainSpec, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io {
            path: "<path csv>".into(),
            source: e,
        };
        let axes = ["x", "y", "z"];
        writeln!(w, "step,{},dist_to_boundary", axes[..self.dim].join(",")).map_err(io)?;
        for (k, p) in self.positions().enumerate() {
            let d = domain.dist_to_boundary(p)?;
            let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{k},{},{d}", coords.join(",")).map_err(io)?;
        }
        Ok(())
    }
}

/// Exact reflection map folding the real line onto `[a0, a1]`.
pub fn fold_1d(b: f64, a0: f64, a1: f64) -> Result<f64> {
    if !(a0 < a1) {
        return Err(invalid("interval", format!("degenerate interval [{a0}, {a1}]")));
    }
    let w = a1 - a0;
    let u = (b - a0).rem_euclid(2.0 * w);
    Ok(a0 + if u <= w { u } else { 2.0 * w - u })
}

/// Near-boundary tracking with a Lipschitz lower bound anchored at the last
/// exactly probed point, so exact queries are only issued close to `∂D`.
#[derive(Debug, Clone)]
struct NearTracker {
    eps: f64,
    cap: f64,
    anchor: Point2,
    anchor_lb: f64,
}

enum Planar {
    Far,
    Near(crate::geometry::Probe),
}

impl NearTracker {
    fn new(eps: f64, spatial_step: f64) -> Self {
        Self {
            eps,
            cap: (4.0 * eps).max(8.0 * spatial_step),
            anchor: Point2::new(f64::NAN, f64::NAN),
            anchor_lb: -1.0,
        }
    }

    /// Lower bound on the distance at `p` from the current anchor.
    #[inline(always)]
    fn lower_bound(&self, p: Point2) -> f64 {
        let lb = self.anchor_lb - p.dist(self.anchor);
        if lb.is_nan() {
            -1.0
        } else {
            lb
        }
    }

    #[inline]
    fn observe(&mut self, region: &PlanarRegion, p: Point2) -> Planar {
        if self.lower_bound(p) > self.eps {
            return Planar::Far;
        }
        let fast = region.distance_lower_bound(p);
        if fast > self.eps {
            self.anchor = p;
            self.anchor_lb = fast;
            return Planar::Far;
        }
        match region.probe_capped(p, self.cap) {
            Capped::AtLeast(b) => {
                self.anchor = p;
                self.anchor_lb = b;
                Planar::Far
            }
            Capped::Exact(pr) => {
                self.anchor = p;
                self.anchor_lb = if pr.inside { pr.dist } else { 0.0 };
                if pr.dist <= self.eps || !pr.inside {
                    Planar::Near(pr)
                } else {
                    Planar::Far
                }
            }
        }
    }
}

/// Exact boundary data of a position within `eps` of the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub dist: f64,
    pub nearest: [f64; 3],
}

fn classify(domain: &DomainSpec, tracker: &mut NearTracker, p: &[f64]) -> (Option<Contact>, Option<Point2>) {
    let xy = Point2::new(p[0], p[1]);
    let planar = tracker.observe(domain.planar(), xy);
    let mut fix = None;
    let planar_contact = match planar {
        Planar::Far => None,
        Planar::Near(pr) => {
            if !pr.inside && pr.dist > 0.0 {
                fix = Some(pr.nearest);
            }
            Some(pr)
        }
    };
    match domain.interval() {
        None => (
            planar_contact.map(|pr| Contact {
                dist: if pr.inside { pr.dist } else { 0.0 },
                nearest: [pr.nearest.x, pr.nearest.y, 0.0],
            }),
            fix,
        ),
        Some([a, b]) => {
            let z = p[2];
            let (dz, face) = if z - a <= b - z { (z - a, a) } else { (b - z, b) };
            let dz = dz.max(0.0);
            let contact = match planar_contact {
                Some(pr) => {
                    let dp = if pr.inside { pr.dist } else { 0.0 };
                    if dz < dp {
                        Some(Contact {
                            dist: dz,
                            nearest: [p[0], p[1], face],
                        })
                    } else {
                        Some(Contact {
                            dist: dp,
                            nearest: [pr.nearest.x, pr.nearest.y, z],
                        })
                    }
                }
                None if dz <= tracker.eps => Some(Contact {
                    dist: dz,
                    nearest: [p[0], p[1], face],
                }),
                None => None,
            };
            (contact, fix)
        }
    }
}

/// Streaming reflected random walk
/// `x_{k+1} = reflect_step(x_k, x_k + sqrt(dt) g_k)`, with `g_k` keyed by `(seed, k)`.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    domain: &'a DomainSpec,
    rng: CounterRng,
    sdt: f64,
    step: u64,
    pos: [f64; 3],
    tracker: NearTracker,
    contact: Option<Contact>,
    seed: u64,
}

impl<'a> Walker<'a> {
    pub fn new(domain: &'a DomainSpec, x0: &[f64], dt: f64, eps: f64, seed: u64) -> Result<Self> {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return Err(invalid("dt", format!("must be in (0, {MAX_DT}], got {dt}")));
        }
        if !(eps > 0.0) {
            return Err(invalid("eps", format!("must be positive, got {eps}")));
        }
        if x0.len() != domain.ambient_dim() || x0.iter().any(|c| !c.is_finite()) {
            return Err(invalid("x0", "wrong dimension or non-finite coordinates"));
        }
        domain.dist_to_boundary(x0)?;
        let mut pos = [0.0; 3];
        pos[..x0.len()].copy_from_slice(x0);
        let sdt = dt.sqrt();
        let mut tracker = NearTracker::new(eps, sdt);
        let (contact, _) = classify(domain, &mut tracker, &pos[..domain.ambient_dim()]);
        Ok(Self {
            domain,
            rng: CounterRng::new(seed),
            sdt,
            step: 0,
            pos,
            tracker,
            contact,
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    #[inline]
    pub fn position(&self) -> &[f64] {
        &self.pos[..self.domain.ambient_dim()]
    }

    /// Boundary contact of the current position (distance at most `eps`).
    #[inline]
    pub fn contact(&self) -> Option<Contact> {
        self.contact
    }

    /// Standard normal increment of step `k` (unscaled).
    #[inline(always)]
    pub fn increment(rng: &CounterRng, k: u64, dim: usize) -> [f64; 3] {
        let (g0, g1) = rng.normal_pair_at(k, 0);
        let g2 = if dim == 3 { rng.normal_pair_at(k, 1).0 } else { 0.0 };
        [g0, g1, g2]
    }

    pub fn advance(&mut self) {
        let dim = self.domain.ambient_dim();
        let g = Self::increment(&self.rng, self.step, dim);
        let cur = Point2::new(self.pos[0], self.pos[1]);
        let prop = Point2::new(cur.x + self.sdt * g[0], cur.y + self.sdt * g[1]);
        let t = &self.tracker;
        let next = if t.lower_bound(prop) > 0.0 && t.lower_bound(cur) > 0.0 {
            prop
        } else {
            self.domain.planar().reflect(cur, prop)
        };
        self.pos[0] = next.x;
        self.pos[1] = next.y;
        if let Some([a, b]) = self.domain.interval() {
            self.pos[2] = fold_1d(self.pos[2] + self.sdt * g[2], a, b).expect("validated interval");
        }
        self.step += 1;
        let (contact, fix) = classify(self.domain, &mut self.tracker, &self.pos[..dim]);
        if let Some(q) = fix {
            // rounding pushed the point out; snap it onto the boundary
            self.pos[0] = q.x;
            self.pos[1] = q.y;
            self.tracker.anchor = q;
            self.tracker.anchor_lb = 0.0;
        }
        self.contact = contact;
    }
}

/// Reflected Brownian path on `[0, T]` from `x0`.
pub fn simulate_rbm(domain: &DomainSpec, x0: &[f64], horizon: f64, dt: f64, seed: u64) -> Result<PathSample> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be positive, got {horizon}")));
    }
    let eps = DEFAULT_EPS_FACTOR * dt.sqrt();
    let mut w = Walker::new(domain, x0, dt, eps, seed)?;
    let n = grid_steps(horizon, dt);
    let dim = domain.ambient_dim();
    let mut positions = Vec::with_capacity((n + 1) * dim);
    positions.extend_from_slice(x0);
    for _ in 0..n {
        w.advance();
        positions.extend_from_slice(w.position());
    }
    PathSample::from_positions(dt, horizon, dim, seed, domain.label(), positions)
}

/// Streams the walk on `[0, T]` without storing it, calling
/// `f(k, position, contact)` for every grid index `k = 0..=floor(T/dt)`.
/// Produces the same positions as [`simulate_rbm`].
pub fn walk_rbm(
    domain: &DomainSpec,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    eps: f64,
    seed: u64,
    mut f: impl FnMut(usize, &[f64], Option<Contact>),
) -> Result<u64> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be positive, got {horizon}")));
    }
    let mut w = Walker::new(domain, x0, dt, eps, seed)?;
    let n = grid_steps(horizon, dt);
    f(0, w.position(), w.contact());
    for k in 1..=n {
        w.advance();
        f(k, w.position(), w.contact());
    }
    Ok(n as u64)
}

fn classify_path(domain: &DomainSpec, path: &PathSample, eps: f64, mut f: impl FnMut(usize, Contact)) -> Result<()> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    if path.dim != domain.ambient_dim() {
        return Err(invalid("path", "dimension does not match the domain"));
    }
    let mut tracker = NearTracker::new(eps, path.dt.sqrt());
    for (k, p) in path.positions().enumerate() {
        if let (Some(c), _) = classify(domain, &mut tracker, p) {
            if c.dist <= eps {
                f(k, c);
            }
        }
    }
    Ok(())
}

/// Grid cells whose left endpoint lies within `eps` of the boundary.
pub fn boundary_hit_times(domain: &DomainSpec, path: &PathSample, eps: f64) -> Result<TimeSet> {
    let mut ts = TimeSet::empty(path.horizon, path.dt)?;
    let cells = cell_count(path.horizon, path.dt);
    classify_path(domain, path, eps, |k, _| {
        if k < cells {
            ts.mark(k);
        }
    })?;
    Ok(ts)
}

/// Nearest-boundary projections of all positions within `eps` of the boundary.
pub fn trace_points(domain: &DomainSpec, path: &PathSample, eps: f64) -> Result<PointCloud> {
    let dim = domain.ambient_dim();
    let mut cloud = PointCloud::new(dim);
    classify_path(domain, path, eps, |_, c| cloud.push(&c.nearest[..dim]))?;
    Ok(cloud)
}

/// Outcome of the dyadic modulus-of-continuity fit.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    pub exponent: f64,
    /// Set when the path does not move, in which case `exponent` is 0.
    pub degenerate: bool,
    pub spans: Vec<f64>,
    pub max_increments: Vec<f64>,
    pub fitted_levels: (usize, usize),
}

pub const HOLDER_MIN_STEPS: usize = 1 << 10;

/// Slope of `log max_k |x_{k+2^j} - x_k|` against `log(2^j dt)` over the middle
/// half of the available dyadic levels.
pub fn holder_exponent(path: &PathSample) -> Result<HolderEstimate> {
    let steps = path.steps();
    if steps < HOLDER_MIN_STEPS {
        return Err(Error::PathTooShort {
            steps,
            required: HOLDER_MIN_STEPS,
        });
    }
    let levels = (usize::BITS - 1 - steps.leading_zeros()) as usize + 1;
    let mut spans = Vec::with_capacity(levels);
    let mut maxima = Vec::with_capacity(levels);
    let raw = path.raw();
    let dim = path.dim;
    for j in 0..levels {
        let lag = 1usize << j;
        let mut m2 = 0.0f64;
        for k in 0..path.len() - lag {
            let a = &raw[k * dim..(k + 1) * dim];
            let b = &raw[(k + lag) * dim..(k + lag + 1) * dim];
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum();
            m2 = m2.max(d2);
        }
        spans.push(lag as f64 * path.dt);
        maxima.push(m2.sqrt());
    }
    let lo = levels / 4;
    let hi = (3 * levels).div_ceil(4).max(lo + 2).min(levels);
    if maxima[lo..hi].iter().any(|&m| m <= 0.0) {
        return Ok(HolderEstimate {
            exponent: 0.0,
            degenerate: true,
            spans,
            max_increments: maxima,
            fitted_levels: (lo, hi),
        });
    }
    let xs: Vec<f64> = spans[lo..hi].iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = maxima[lo..hi].iter().map(|m| m.ln()).collect();
    let exponent = crate::fracdim::ols(&xs, &ys).slope;
    Ok(HolderEstimate {
        exponent,
        degenerate: false,
        spans,
        max_increments: maxima,
        fitted_levels: (lo, hi),
    })
}

/// Number of grid cubes of side `a` (anchored at the origin) hit by the path.
pub fn cube_hit_count(path: &PathSample, a: f64) -> usize {
    let mut keys: Vec<[i64; 3]> = path
        .positions()
        .map(|p| {
            let mut k = [0i64; 3];
            for (i, c) in p.iter().enumerate() {
                k[i] = (c / a).floor() as i64;
            }
            k
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Check that `p` lies in the closure of `domain` to within [`CLOSURE_TOL`].
pub fn in_closure(domain: &DomainSpec, p: &[f64]) -> bool {
    let pr: DomainProbe = domain.probe(p);
    pr.inside || pr.dist <= CLOSURE_TOL
}
