//! Box-counting dimension estimates for time sets and point sets.
//!
//! Box dimension is used as the computable stand-in for Hausdorff dimension;
//! it upper-bounds it, so reported slopes are read as upper box dimensions.

use std::collections::HashSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rbm::PathSample;
use crate::timeset::TimeSet;

/// Points of a fixed dimension stored contiguously.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "point clouds are 1-, 2- or 3-dimensional");
        Self { dim, coords: Vec::new() }
    }

    pub fn from_points<'a>(dim: usize, pts: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut c = Self::new(dim);
        for p in pts {
            c.push(p);
        }
        c
    }

    #[inline]
    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn extend(&mut self, other: &PointCloud) {
        assert_eq!(self.dim, other.dim);
        self.coords.extend_from_slice(&other.coords);
    }
}

/// Box sides with the number of boxes meeting the set at each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCounts {
    /// Dyadic levels `k`; box side is `base * 2^-k`.
    pub levels: Vec<u32>,
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { (1.0 - ssr / syy).clamp(0.0, 1.0) } else { 1.0 };
    let stderr = if xs.len() > 2 && sxx > 0.0 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Line {
        slope,
        intercept,
        stderr,
        r2,
    }
}

/// Which scales enter the log-log fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWindow {
    /// Every supplied scale.
    All,
    /// Drop scales with fewer than 8 boxes and the two finest scales, then
    /// take the contiguous window (at least 4 long) with the best `r2`.
    Auto,
    /// Index range `lo..hi` into the supplied scales.
    Range(usize, usize),
}

pub const MIN_FIT_SCALES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
    /// Indices into `scales` used by the fit.
    pub window: Vec<usize>,
}

impl DimensionEstimate {
    /// Points of the fitted line as `(log(1/scale), log count)`.
    pub fn fit_line(&self) -> Vec<(f64, f64)> {
        self.window
            .iter()
            .map(|&i| {
                let x = -self.scales[i].ln();
                (x, self.intercept + self.slope * x)
            })
            .collect()
    }

    pub fn write_counts_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "scale,count")?;
        for (s, c) in self.scales.iter().zip(&self.counts) {
            writeln!(w, "{s},{c}")?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.slope,
            "stderr": self.stderr,
            "r2": self.r2,
            "window": self.window,
        })
    }
}

/// Least-squares fit of `log count` against `log(1/scale)`.
pub fn fit_loglog(scales: &[f64], counts: &[u64], window: FitWindow) -> Result<DimensionEstimate> {
    if scales.len() != counts.len() {
        return Err(invalid("counts", "scales and counts differ in length"));
    }
    if scales.len() < MIN_FIT_SCALES {
        return Err(Error::TooFewScales { usable: scales.len() });
    }
    let xs: Vec<f64> = scales.iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit_range = |lo: usize, hi: usize| -> Result<Line> {
        if counts[lo..hi].contains(&0) {
            return Err(Error::Empty("zero box count inside the fit window"));
        }
        Ok(ols(&xs[lo..hi], &ys[lo..hi]))
    };
    let (lo, hi, line) = match window {
        FitWindow::All => (0, scales.len(), fit_range(0, scales.len())?),
        FitWindow::Range(lo, hi) => {
            let hi = hi.min(scales.len());
            if hi < lo + MIN_FIT_SCALES {
                return Err(Error::TooFewScales {
                    usable: hi.saturating_sub(lo),
                });
            }
            (lo, hi, fit_range(lo, hi)?)
        }
        FitWindow::Auto => {
            // finest scale = smallest side
            let mut order: Vec<usize> = (0..scales.len()).collect();
            order.sort_by(|&a, &b| scales[b].total_cmp(&scales[a]));
            let drop_fine: HashSet<usize> = order.iter().rev().take(2).copied().collect();
            let usable: Vec<bool> = (0..scales.len()).map(|i| counts[i] >= 8 && !drop_fine.contains(&i)).collect();
            let mut best: Option<(usize, usize, Line)> = None;
            let mut longest_run = 0;
            let mut i = 0;
            while i < scales.len() {
                if !usable[i] {
                    i += 1;
                    continue;
                }
                let mut j = i;
                while j < scales.len() && usable[j] {
                    j += 1;
                }
                longest_run = longest_run.max(j - i);
                for lo in i..j {
                    for hi in lo + MIN_FIT_SCALES..=j {
                        let line = ols(&xs[lo..hi], &ys[lo..hi]);
                        if best.as_ref().map_or(true, |b| line.r2 > b.2.r2) {
                            best = Some((lo, hi, line));
                        }
                    }
                }
                i = j;
            }
            best.ok_or(Error::TooFewScales { usable: longest_run })?
        }
    };
    if !line.slope.is_finite() {
        return Err(invalid("counts", "non-finite slope"));
    }
    Ok(DimensionEstimate {
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        slope: line.slope,
        intercept: line.intercept,
        stderr: line.stderr,
        r2: line.r2,
        window: (lo..hi).collect(),
    })
}

/// Smallest admissible dyadic box, in grid cells, for time sets.
pub const TIME_CUTOFF_CELLS: f64 = 4.0;

/// Number of dyadic intervals of length `T 2^-k` meeting the set, for `k` in
/// `k_min..=k_max`.
pub fn box_counts_time(ts: &TimeSet, k_min: u32, k_max: u32) -> Result<BoxCounts> {
    if k_min >= k_max {
        return Err(invalid("k_max", format!("need k_min < k_max, got {k_min}..{k_max}")));
    }
    let horizon = ts.horizon();
    let finest = horizon * 0.5f64.powi(k_max as i32);
    if finest < TIME_CUTOFF_CELLS * ts.dt() * (1.0 - 1e-12) {
        return Err(Error::Resolution {
            finest,
            limit: TIME_CUTOFF_CELLS * ts.dt(),
        });
    }
    let runs = ts.runs();
    let mut counts = Vec::new();
    let mut scales = Vec::new();
    let mut levels = Vec::new();
    for k in k_min..=k_max {
        let boxes = 2f64.powi(k as i32);
        let nbox = 1u64 << k;
        let per = ts.dt() * boxes / horizon;
        let mut count = 0u64;
        let mut last: Option<u64> = None;
        for &(a, b) in &runs {
            let first = ((a as f64 * per).floor() as u64).min(nbox - 1);
            let end = b as f64 * per;
            let mut lastbox = (end.ceil() as u64).saturating_sub(1).min(nbox - 1);
            lastbox = lastbox.max(first);
            let start = match last {
                Some(l) if l >= first => l + 1,
                _ => first,
            };
            if lastbox >= start {
                count += lastbox - start + 1;
            }
            last = Some(last.map_or(lastbox, |l| l.max(lastbox)));
        }
        levels.push(k);
        scales.push(horizon / boxes);
        counts.push(count);
    }
    Ok(BoxCounts { levels, scales, counts })
}

fn morton(ix: &[u64]) -> u64 {
    let dim = ix.len();
    let bits = 64 / dim;
    let mut code = 0u64;
    for b in 0..bits {
        for (d, &v) in ix.iter().enumerate() {
            code |= ((v >> b) & 1) << (b * dim + d);
        }
    }
    code
}

/// Occupied dyadic cubes of side `L 2^-k`, where `L` is the longest side of the
/// points' bounding box. Cubes finer than `resolution` are rejected.
pub fn box_counts_space(points: &PointCloud, k_min: u32, k_max: u32, resolution: f64) -> Result<BoxCounts> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    if k_min >= k_max {
        return Err(invalid("k_max", format!("need k_min < k_max, got {k_min}..{k_max}")));
    }
    let dim = points.dim();
    let max_bits = 63 / dim as u32;
    if k_max > max_bits {
        return Err(invalid("k_max", format!("at most {max_bits} levels in dimension {dim}")));
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points.iter() {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let side = (0..dim).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
    let levels: Vec<u32> = (k_min..=k_max).collect();
    if side == 0.0 {
        return Ok(BoxCounts {
            scales: levels.iter().map(|_| 0.0).collect(),
            counts: vec![1; levels.len()],
            levels,
        });
    }
    let finest = side * 0.5f64.powi(k_max as i32);
    if finest < resolution * (1.0 - 1e-12) {
        return Err(Error::Resolution {
            finest,
            limit: resolution,
        });
    }
    let n = 1u64 << k_max;
    let mut keys: HashSet<u64> = HashSet::new();
    let mut ix = [0u64; 3];
    for p in points.iter() {
        for d in 0..dim {
            let f = ((p[d] - lo[d]) / side * n as f64).floor();
            ix[d] = (f.max(0.0) as u64).min(n - 1);
        }
        keys.insert(morton(&ix[..dim]));
    }
    let mut codes: Vec<u64> = keys.into_iter().collect();
    codes.sort_unstable();
    let mut counts = Vec::with_capacity(levels.len());
    let mut scales = Vec::with_capacity(levels.len());
    for &k in &levels {
        let shift = dim as u32 * (k_max - k);
        let mut count = 0u64;
        let mut prev = None;
        for &c in &codes {
            let key = c >> shift;
            if prev != Some(key) {
                count += 1;
                prev = Some(key);
            }
        }
        counts.push(count);
        scales.push(side * 0.5f64.powi(k as i32));
    }
    Ok(BoxCounts { levels, scales, counts })
}

/// Deterministic self-similar time set: `m` equally spaced pieces of ratio `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub pieces: u32,
    pub ratio: f64,
    pub depth: u32,
    pub horizon: f64,
}

impl CantorSpec {
    pub fn middle_thirds(depth: u32, horizon: f64) -> Self {
        Self {
            pieces: 2,
            ratio: 1.0 / 3.0,
            depth,
            horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pieces < 2 {
            return Err(invalid("pieces", "need at least 2 pieces"));
        }
        if !(self.ratio > 0.0 && self.pieces as f64 * self.ratio < 1.0) {
            return Err(invalid("ratio", format!("need 0 < r < 1/m, got r={}", self.ratio)));
        }
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon", "must be positive"));
        }
        Ok(())
    }

    pub fn analytic_dimension(&self) -> f64 {
        (self.pieces as f64).ln() / (1.0 / self.ratio).ln()
    }

    /// Intervals of the depth-level approximation.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let m = self.pieces as usize;
        let mut cur = vec![(0.0, self.horizon)];
        for _ in 0..self.depth {
            let mut next = Vec::with_capacity(cur.len() * m);
            for (a, b) in cur {
                let len = b - a;
                let piece = len * self.ratio;
                let stride = (len - piece) / (m - 1) as f64;
                for i in 0..m {
                    let s = a + i as f64 * stride;
                    next.push((s, s + piece));
                }
            }
            cur = next;
        }
        cur
    }
}

pub fn cantor_timeset(spec: &CantorSpec, grid_dt: f64) -> Result<TimeSet> {
    spec.validate()?;
    let finest = spec.horizon * spec.ratio.powi(spec.depth as i32);
    if finest < grid_dt * (1.0 - 1e-9) {
        return Err(Error::Resolution {
            finest,
            limit: grid_dt,
        });
    }
    let mut ts = TimeSet::empty(spec.horizon, grid_dt)?;
    let last = ts.len() - 1;
    for (a, b) in spec.intervals() {
        let i0 = ((a / grid_dt + 1e-9).floor() as usize).min(last);
        // cells [i dt, (i+1) dt) meeting [a, b)
        let i1 = ((b / grid_dt - 1e-9).ceil() as usize).clamp(i0 + 1, last + 1);
        for i in i0..i1 {
            ts.mark(i);
        }
    }
    Ok(ts)
}

/// Image points `{x_k : cell k marked}` of a path.
pub fn image_points(path: &PathSample, e: &TimeSet) -> Result<PointCloud> {
    if (e.dt() - path.dt).abs() > 1e-12 * path.dt || e.len() > path.len() {
        return Err(Error::GridMismatch(format!(
            "time set grid dt={} with {} cells vs path dt={} with {} points",
            e.dt(),
            e.len(),
            path.dt,
            path.len()
        )));
    }
    let mut cloud = PointCloud::new(path.dim);
    for k in e.marked() {
        cloud.push(path.position(k));
    }
    Ok(cloud)
}

/// Box dimension of the image of `e` under the path, fitted over levels
/// `k_min..=k_max`.
pub fn image_dimension(path: &PathSample, e: &TimeSet, k_min: u32, k_max: u32) -> Result<DimensionEstimate> {
    let cloud = image_points(path, e)?;
    if cloud.is_empty() {
        return Err(Error::Empty("image of the time set"));
    }
    let bc = box_counts_space(&cloud, k_min, k_max, 0.0)?;
    fit_loglog(&bc.scales, &bc.counts, FitWindow::All)
}
