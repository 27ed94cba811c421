//! Multi-path experiments: presets, per-path dimension estimates, aggregation
//! against predicted values, and report output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fracdim::{
    box_counts_space, box_counts_time, cantor_timeset, fit_loglog, CantorSpec, DimensionEstimate, FitWindow,
    PointCloud, TIME_CUTOFF_CELLS,
};
use crate::geometry::{
    make_corridor_domain, make_koch_snowflake, make_product, make_square, DomainSpec, Point2,
};
use crate::rbm::{walk_rbm, DEFAULT_EPS_FACTOR};
use crate::rng::derive_seed;
use crate::subordination::{sample_subordinator, walk_subordinated, DEFAULT_MAX_CLOCK_STEPS};
use crate::timeset::{cell_count, TimeSet};

/// Levels in a default fit window.
pub const WINDOW_LEVELS: u32 = 4;
/// Smallest time box, in observation cells, used by default windows.
pub const TIME_FLOOR_CELLS: f64 = 64.0;
/// Largest fraction of failed paths a run tolerates.
pub const MAX_FAILED_FRACTION: f64 = 0.1;

/// Domain as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Square {
        side: f64,
    },
    Snowflake {
        level: u32,
    },
    Product {
        base: Box<DomainConfig>,
        height: f64,
    },
    Corridor {
        generations: u32,
        width_exponent: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
        boundary_dim: Option<f64>,
    },
}

impl DomainConfig {
    pub fn build(&self) -> Result<DomainSpec> {
        match self {
            DomainConfig::Square { side } => make_square(*side),
            DomainConfig::Snowflake { level } => make_koch_snowflake(*level),
            DomainConfig::Product { base, height } => make_product(&base.build()?, *height),
            DomainConfig::Corridor {
                generations,
                width_exponent,
            } => make_corridor_domain(*generations, *width_exponent),
            DomainConfig::Polygon { vertices, boundary_dim } => {
                DomainSpec::polygon(vertices.iter().map(|v| Point2::new(v[0], v[1])).collect(), *boundary_dim)
            }
        }
    }
}

/// What a preset measures on each path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Times the path spends within `eps` of the boundary.
    Occupation,
    /// Boundary points the path comes within `eps` of.
    Trace,
    /// Path positions at the times of a fixed time set.
    Image,
}

/// Fixed time set whose image is measured by image presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TimeSetConfig {
    Full,
    Cantor(CantorSpec),
}

/// Asymmetric pass band around the predicted value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub below: f64,
    pub above: f64,
}

impl Tolerance {
    pub fn symmetric(t: f64) -> Self {
        Self { below: t, above: t }
    }

    pub fn admits(&self, predicted: f64, value: f64) -> bool {
        value >= predicted - self.below && value <= predicted + self.above
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub domain: DomainConfig,
    pub observable: Observable,
    pub paths: usize,
    /// Observation horizon. For subordinated runs this is the horizon of `Z`.
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Step of the reflected walk.
    pub dt: f64,
    /// Boundary tolerance in units of `sqrt(dt)`.
    pub eps_factor: f64,
    /// Subordinator index; `None` runs plain reflected Brownian motion.
    pub s: Option<f64>,
    /// Grid of the subordinator and of `Z`; defaults to `dt^s`.
    pub clock_dt: Option<f64>,
    pub max_clock_steps: u64,
    pub time_set: Option<TimeSetConfig>,
    pub master_seed: u64,
    /// Dyadic levels `[k_min, k_max]` for time box counts.
    pub time_window: Option<[u32; 2]>,
    /// Dyadic levels `[k_min, k_max]` for spatial box counts.
    pub space_window: Option<[u32; 2]>,
    /// Pick the window by maximal r2 instead of the default rule.
    pub auto_window: bool,
    pub tolerance: Option<Tolerance>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    fn base(preset: &str, domain: DomainConfig, observable: Observable) -> Self {
        Self {
            preset: preset.to_string(),
            domain,
            observable,
            paths: 32,
            horizon: 100.0,
            dt: 1e-5,
            eps_factor: DEFAULT_EPS_FACTOR,
            s: None,
            clock_dt: None,
            max_clock_steps: DEFAULT_MAX_CLOCK_STEPS,
            time_set: None,
            master_seed: 20_240_601,
            time_window: None,
            space_window: None,
            auto_window: false,
            tolerance: None,
            out_dir: None,
        }
    }

    /// Default configuration of a named preset.
    pub fn preset(name: &str) -> Result<Self> {
        let p = find_preset(name)?;
        Ok((p.config)())
    }

    /// Preset defaults overlaid with the fields present in a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: serde_json::Value = serde_json::from_str(text)?;
        let name = doc
            .get("preset")
            .and_then(|v| v.as_str())
            .ok_or_else(|| invalid("preset", "config file must name a preset"))?;
        let mut merged = serde_json::to_value(Self::preset(name)?)?;
        if let (Some(base), Some(over)) = (merged.as_object_mut(), doc.as_object()) {
            for (k, v) in over {
                base.insert(k.clone(), v.clone());
            }
        }
        let cfg: Self = serde_json::from_value(merged)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        find_preset(&self.preset)?;
        if self.paths == 0 {
            return Err(invalid("paths", "need at least one path"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("T", format!("must be positive, got {}", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt < self.horizon) {
            return Err(invalid("dt", format!("must be in (0, T), got {}", self.dt)));
        }
        if !(self.eps_factor > 0.0 && self.eps_factor.is_finite()) {
            return Err(invalid("eps_factor", "must be positive"));
        }
        if let Some(s) = self.s {
            if !(s > 0.0 && s < 1.0) {
                return Err(invalid("s", format!("must be in (0, 1), got {s}")));
            }
            if self.observable == Observable::Image {
                return Err(invalid("s", "image presets run without a subordinator"));
            }
        }
        if self.observable == Observable::Image && self.time_set.is_none() {
            return Err(invalid("time_set", "image presets need a time set"));
        }
        for (name, w) in [("time_window", self.time_window), ("space_window", self.space_window)] {
            if let Some([lo, hi]) = w {
                if hi < lo + WINDOW_LEVELS - 1 {
                    return Err(invalid(name, format!("need at least {WINDOW_LEVELS} levels, got {lo}..={hi}")));
                }
            }
        }
        Ok(())
    }

    pub fn eps(&self) -> f64 {
        self.eps_factor * self.dt.sqrt()
    }

    /// Grid on which the observed time sets live.
    pub fn observation_dt(&self) -> f64 {
        match self.s {
            Some(s) => self.clock_dt.unwrap_or_else(|| self.dt.powf(s)),
            None => self.dt,
        }
    }

    pub fn path_seed(&self, index: usize) -> u64 {
        derive_seed(self.master_seed, index as u64)
    }
}

/// Occupation dimension `max{1 - (n - d)/alpha, 0}`.
pub fn predicted_occupation(n: f64, d: f64, alpha: f64) -> f64 {
    (1.0 - (n - d) / alpha).max(0.0)
}

/// Trace dimension `max{alpha + d - n, 0}`.
pub fn predicted_trace(n: f64, d: f64, alpha: f64) -> f64 {
    (alpha + d - n).max(0.0)
}

/// Image dimension `min{2 dim E, 2}` for a self-similar `E` with `m` pieces of ratio `r`.
pub fn predicted_image(m: u32, r: f64) -> f64 {
    (2.0 * (m as f64).ln() / (1.0 / r).ln()).min(2.0)
}

/// Named experiment with its default configuration.
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub citation: &'static str,
    /// Exploratory presets are reported but never fail a run.
    pub gating: bool,
    config: fn() -> ExperimentConfig,
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        (self.config)()
    }
}

fn square() -> DomainConfig {
    DomainConfig::Square { side: 1.0 }
}

fn snowflake() -> DomainConfig {
    DomainConfig::Snowflake { level: 7 }
}

fn snowflake_slab() -> DomainConfig {
    DomainConfig::Product {
        base: Box::new(snowflake()),
        height: 1.0,
    }
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "square-occupation",
        summary: "boundary occupation times of RBM in the unit square",
        citation: "Lipschitz domain: dim S = 1 - (n - dim dD)/2 = 1/2",
        gating: true,
        config: || ExperimentConfig::base("square-occupation", square(), Observable::Occupation),
    },
    Preset {
        name: "square-trace",
        summary: "boundary trace of RBM in the unit square",
        citation: "Lipschitz domain: dim R = 2 + dim dD - n = 1",
        gating: true,
        config: || ExperimentConfig::base("square-trace", square(), Observable::Trace),
    },
    Preset {
        name: "snowflake-occupation",
        summary: "boundary occupation times of RBM in the level-7 Koch snowflake",
        citation: "Koch snowflake: dim S = 1/2 log4/log3",
        gating: true,
        config: || ExperimentConfig::base("snowflake-occupation", snowflake(), Observable::Occupation),
    },
    Preset {
        name: "snowflake-trace",
        summary: "boundary trace of RBM in the level-7 Koch snowflake",
        citation: "Koch snowflake: dim R = log4/log3",
        gating: true,
        config: || ExperimentConfig::base("snowflake-trace", snowflake(), Observable::Trace),
    },
    Preset {
        name: "product-occupation",
        summary: "boundary occupation times of RBM in snowflake x (0,1)",
        citation: "U = D x (0,1) with dim dU = 1 + log4/log3: dim S = 1 - (3 - dim dU)/2 = 1/2 log4/log3",
        gating: true,
        config: || ExperimentConfig {
            paths: 16,
            horizon: 50.0,
            ..ExperimentConfig::base("product-occupation", snowflake_slab(), Observable::Occupation)
        },
    },
    Preset {
        name: "product-trace",
        summary: "boundary trace of RBM in snowflake x (0,1)",
        citation: "U = D x (0,1) with dim dU = 1 + log4/log3: dim R = 2 + dim dU - 3 = log4/log3",
        gating: true,
        config: || ExperimentConfig {
            paths: 16,
            horizon: 50.0,
            ..ExperimentConfig::base("product-trace", snowflake_slab(), Observable::Trace)
        },
    },
    Preset {
        name: "doubling-cantor",
        summary: "image of the middle-thirds Cantor set under planar RBM",
        citation: "uniform doubling: dim X(E) = 2 dim E = 2 log2/log3",
        gating: true,
        config: || ExperimentConfig {
            horizon: 10.0,
            time_set: Some(TimeSetConfig::Cantor(CantorSpec::middle_thirds(10, 10.0))),
            ..ExperimentConfig::base("doubling-cantor", square(), Observable::Image)
        },
    },
    Preset {
        name: "doubling-full",
        summary: "image of a full time interval under planar RBM",
        citation: "uniform doubling: dim X([0,T]) = min{2 dim [0,T], n} = 2",
        gating: true,
        config: || ExperimentConfig {
            horizon: 10.0,
            time_set: Some(TimeSetConfig::Full),
            ..ExperimentConfig::base("doubling-full", square(), Observable::Image)
        },
    },
    Preset {
        name: "subordinated-occupation",
        summary: "boundary occupation times of s-subordinated RBM in the unit square",
        citation: "stable-like process of index alpha = 2s: dim S = max{1 - (n - dim dD)/alpha, 0}",
        gating: true,
        config: || ExperimentConfig {
            s: Some(0.9),
            horizon: 10.0,
            ..ExperimentConfig::base("subordinated-occupation", square(), Observable::Occupation)
        },
    },
    Preset {
        name: "subordinated-trace",
        summary: "boundary trace of s-subordinated RBM in the level-7 Koch snowflake",
        citation: "stable-like process of index alpha = 2s: dim R = max{alpha + dim dD - n, 0}",
        gating: true,
        config: || ExperimentConfig {
            s: Some(0.9),
            horizon: 10.0,
            ..ExperimentConfig::base("subordinated-trace", snowflake(), Observable::Trace)
        },
    },
    Preset {
        name: "corridor-trace",
        summary: "boundary trace of RBM in the corridor domain (exploratory)",
        citation: "squares joined by corridors of summable widths: trace dimension expected near 1",
        gating: false,
        config: || ExperimentConfig {
            paths: 8,
            horizon: 20.0,
            ..ExperimentConfig::base(
                "corridor-trace",
                DomainConfig::Corridor {
                    generations: 4,
                    width_exponent: 1.5,
                },
                Observable::Trace,
            )
        },
    },
];

pub fn presets() -> &'static [Preset] {
    PRESETS
}

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

/// One catalog line: preset name, predicted value at its defaults, citation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub predicted: f64,
    pub citation: &'static str,
    pub gating: bool,
}

pub fn preset_catalog() -> Vec<CatalogEntry> {
    PRESETS
        .iter()
        .map(|p| {
            let cfg = p.config();
            let predicted = cfg.domain.build().and_then(|d| predicted_value(&cfg, &d)).unwrap_or(f64::NAN);
            CatalogEntry {
                name: p.name,
                predicted,
                citation: p.citation,
                gating: p.gating,
            }
        })
        .collect()
}

/// Predicted dimension for a configuration on a built domain.
pub fn predicted_value(cfg: &ExperimentConfig, domain: &DomainSpec) -> Result<f64> {
    let n = domain.ambient_dim() as f64;
    if cfg.observable == Observable::Image {
        return Ok(match cfg.time_set.as_ref() {
            Some(TimeSetConfig::Cantor(c)) => (2.0 * c.analytic_dimension()).min(n),
            _ => 2.0f64.min(n),
        });
    }
    let Some(d) = domain.analytic_boundary_dim() else {
        // no analytic value: a rectifiable-looking boundary is the working guess
        return Ok(1.0);
    };
    let alpha = cfg.s.map_or(2.0, |s| 2.0 * s);
    Ok(match cfg.observable {
        Observable::Occupation => predicted_occupation(n, d, alpha),
        _ => predicted_trace(n, d, alpha),
    })
}

fn default_tolerance(cfg: &ExperimentConfig, domain: &DomainSpec) -> Tolerance {
    if domain.ambient_dim() == 3 || cfg.s.is_some() {
        Tolerance::symmetric(0.15)
    } else {
        Tolerance::symmetric(0.10)
    }
}

/// Per-path outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub index: usize,
    pub seed: u64,
    pub steps: u64,
    /// Marked cells or collected points.
    pub set_size: u64,
    pub empty_set: bool,
    pub dimension: Option<f64>,
    pub stderr: Option<f64>,
    pub r2: Option<f64>,
    pub window: Option<[u32; 2]>,
    pub levels: Vec<u32>,
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
}

impl Aggregate {
    /// Mean, sample standard deviation and standard error of the estimates.
    pub fn from_rows(rows: &[PathRow]) -> Self {
        let xs: Vec<f64> = rows.iter().filter_map(|r| r.dimension).collect();
        let n = xs.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                std: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            n,
            mean,
            std,
            stderr: std / (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub started_unix: u64,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub preset: String,
    pub config: ExperimentConfig,
    pub domain: String,
    pub observable: Observable,
    /// Box-counting slopes stand in for Hausdorff dimensions.
    pub estimator: String,
    pub predicted: f64,
    pub citation: String,
    pub tolerance: Tolerance,
    pub aggregate: Aggregate,
    pub verdict: Verdict,
    pub failed_paths: usize,
    pub total_steps: u64,
    pub rows: Vec<PathRow>,
    pub timestamp: Timestamp,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Report without its timestamp, for comparing runs.
    pub fn content_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("timestamp");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

/// Execution knobs that do not affect results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all available cores.
    pub workers: Option<usize>,
}

/// Levels `0..=k` with `T 2^-k` at least `cells` grid cells.
fn time_level_limit(horizon: f64, dt: f64, cells: f64) -> Option<u32> {
    let ratio = horizon / (cells * dt) * (1.0 + 1e-12);
    (ratio >= 1.0).then(|| ratio.log2().floor() as u32)
}

/// Largest `k` with `side 2^-k >= resolution`.
fn space_level_limit(side: f64, resolution: f64) -> Option<u32> {
    let ratio = side / resolution * (1.0 + 1e-12);
    (ratio >= 1.0).then(|| (ratio.log2().floor() as u32).min(20))
}

/// Default window: the `WINDOW_LEVELS` finest levels not below `floor_level`,
/// relaxed toward `cut` when the floor leaves too few.
fn default_window(floor_level: Option<u32>, cut: u32) -> [u32; 2] {
    let hi = floor_level.unwrap_or(0).max(WINDOW_LEVELS - 1).min(cut);
    [hi + 1 - WINDOW_LEVELS.min(hi + 1), hi]
}

fn fit_counts(levels: &[u32], scales: &[f64], counts: &[u64], window: Option<[u32; 2]>) -> Result<DimensionEstimate> {
    match window {
        None => fit_loglog(scales, counts, FitWindow::Auto),
        Some([lo, hi]) => {
            let first = levels[0];
            if hi > *levels.last().expect("levels") {
                return Err(invalid("window", format!("level {hi} is finer than the resolution allows")));
            }
            fit_loglog(scales, counts, FitWindow::Range((lo - first) as usize, (hi - first + 1) as usize))
        }
    }
}

struct PathData {
    steps: u64,
    times: Option<TimeSet>,
    points: Option<PointCloud>,
}

/// Estimates for one path and one observable.
fn estimate(cfg: &ExperimentConfig, observable: Observable, data: &PathData, row: &mut PathRow) -> Result<()> {
    let (levels, scales, counts, window) = match observable {
        Observable::Occupation => {
            let ts = data.times.as_ref().expect("occupation data");
            row.set_size = ts.count() as u64;
            if ts.is_empty() {
                row.empty_set = true;
                row.dimension = Some(0.0);
                return Ok(());
            }
            let dt = ts.dt();
            let cut = time_level_limit(ts.horizon(), dt, TIME_CUTOFF_CELLS)
                .filter(|&k| k >= WINDOW_LEVELS)
                .ok_or(Error::TooFewScales { usable: 0 })?;
            let bc = box_counts_time(ts, 0, cut)?;
            let window = if cfg.auto_window {
                None
            } else {
                Some(cfg.time_window.unwrap_or_else(|| {
                    default_window(time_level_limit(ts.horizon(), dt, TIME_FLOOR_CELLS), cut)
                }))
            };
            (bc.levels, bc.scales, bc.counts, window)
        }
        Observable::Trace | Observable::Image => {
            let pts = data.points.as_ref().expect("point data");
            row.set_size = pts.len() as u64;
            if pts.is_empty() {
                row.empty_set = true;
                row.dimension = Some(0.0);
                return Ok(());
            }
            let side = bounding_side(pts);
            let resolution = cfg.dt.sqrt();
            let cut = space_level_limit(side, resolution)
                .filter(|&k| k >= WINDOW_LEVELS)
                .ok_or(Error::TooFewScales { usable: 0 })?;
            let bc = box_counts_space(pts, 0, cut, resolution)?;
            let window = if cfg.auto_window {
                None
            } else {
                Some(cfg.space_window.unwrap_or_else(|| default_window(Some(cut), cut)))
            };
            (bc.levels, bc.scales, bc.counts, window)
        }
    };
    let est = fit_counts(&levels, &scales, &counts, window)?;
    row.dimension = Some(est.slope);
    row.stderr = Some(est.stderr);
    row.r2 = Some(est.r2);
    row.window = Some([levels[est.window[0]], levels[*est.window.last().expect("window")]]);
    row.levels = levels;
    row.scales = scales;
    row.counts = counts;
    Ok(())
}

fn bounding_side(pts: &PointCloud) -> f64 {
    let dim = pts.dim();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts.iter() {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    (0..dim).map(|d| hi[d] - lo[d]).fold(0.0, f64::max)
}

fn simulate_path(
    cfg: &ExperimentConfig,
    domain: &DomainSpec,
    image_set: Option<&TimeSet>,
    observables: &[Observable],
    seed: u64,
) -> Result<PathData> {
    let dim = domain.ambient_dim();
    let x0 = domain.centroid();
    let eps = cfg.eps();
    let want_times = observables.contains(&Observable::Occupation);
    let want_trace = observables.contains(&Observable::Trace);
    let obs_dt = cfg.observation_dt();
    let cells = cell_count(cfg.horizon, obs_dt);
    let mut times = if want_times {
        Some(TimeSet::empty(cfg.horizon, obs_dt)?)
    } else {
        None
    };
    let mut points = (want_trace || image_set.is_some()).then(|| PointCloud::new(dim));
    let mut record = |k: usize, pos: &[f64], contact: Option<crate::rbm::Contact>| {
        if let Some(c) = contact {
            if let Some(ts) = times.as_mut() {
                if k < cells {
                    ts.mark(k);
                }
            }
            if want_trace {
                points.as_mut().expect("trace").push(&c.nearest[..dim]);
            }
        }
        if let Some(e) = image_set {
            if k < e.len() && e.is_marked(k) {
                points.as_mut().expect("image").push(pos);
            }
        }
    };
    let steps = match cfg.s {
        None => walk_rbm(domain, &x0, cfg.horizon, cfg.dt, eps, seed, &mut record)?,
        Some(s) => {
            let xi = sample_subordinator(s, cfg.horizon, obs_dt, seed)?;
            walk_subordinated(domain, &x0, cfg.dt, eps, seed, &xi, cfg.max_clock_steps, &mut record)?
        }
    };
    Ok(PathData { steps, times, points })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(config, RunOptions::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentReport> {
    let mut reports = run_joint(config, &[config.observable], opts)?;
    Ok(reports.remove(0))
}

/// Runs the configured paths once and reports each observable from the same
/// simulations. Reports follow the order of `observables`.
pub fn run_joint(config: &ExperimentConfig, observables: &[Observable], opts: RunOptions) -> Result<Vec<ExperimentReport>> {
    config.validate()?;
    if observables.is_empty() {
        return Err(invalid("observables", "nothing to measure"));
    }
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let domain = config.domain.build()?;
    let image_set = match (&config.time_set, observables.contains(&Observable::Image)) {
        (Some(TimeSetConfig::Cantor(c)), true) => {
            if (c.horizon - config.horizon).abs() > 1e-12 * config.horizon {
                return Err(invalid("time_set", "Cantor horizon must equal T"));
            }
            Some(cantor_timeset(c, config.dt)?)
        }
        (Some(TimeSetConfig::Full), true) => Some(TimeSet::full(config.horizon, config.dt)?),
        (None, true) => return Err(invalid("time_set", "image presets need a time set")),
        _ => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| invalid("workers", format!("cannot start worker pool: {e}")))?;
    let per_path: Vec<Vec<PathRow>> = pool.install(|| {
        (0..config.paths)
            .into_par_iter()
            .map(|i| {
                let seed = config.path_seed(i);
                let blank = PathRow {
                    index: i,
                    seed,
                    steps: 0,
                    set_size: 0,
                    empty_set: false,
                    dimension: None,
                    stderr: None,
                    r2: None,
                    window: None,
                    levels: vec![],
                    scales: vec![],
                    counts: vec![],
                    error: None,
                };
                match simulate_path(config, &domain, image_set.as_ref(), observables, seed) {
                    Err(e) => observables
                        .iter()
                        .map(|_| PathRow {
                            error: Some(e.to_string()),
                            ..blank.clone()
                        })
                        .collect(),
                    Ok(data) => observables
                        .iter()
                        .map(|&ob| {
                            let mut row = PathRow {
                                steps: data.steps,
                                ..blank.clone()
                            };
                            if let Err(e) = estimate(config, ob, &data, &mut row) {
                                row.dimension = None;
                                row.error = Some(e.to_string());
                            }
                            row
                        })
                        .collect(),
                }
            })
            .collect()
    });
    let wall = started.elapsed().as_secs_f64();
    let preset = find_preset(&config.preset)?;
    let mut report_config = config.clone();
    report_config.out_dir = None;
    let mut reports = Vec::with_capacity(observables.len());
    for (o, &ob) in observables.iter().enumerate() {
        let mut rows: Vec<PathRow> = per_path.iter().map(|r| r[o].clone()).collect();
        rows.sort_by_key(|r| r.index);
        let failed: Vec<&PathRow> = rows.iter().filter(|r| r.error.is_some()).collect();
        if failed.len() as f64 > MAX_FAILED_FRACTION * rows.len() as f64 {
            return Err(Error::TooManyPathFailures {
                failed: failed.len(),
                total: rows.len(),
                first: failed[0].error.clone().unwrap_or_default(),
            });
        }
        let cfg_ob = ExperimentConfig {
            observable: ob,
            ..report_config.clone()
        };
        let predicted = predicted_value(&cfg_ob, &domain)?;
        let tolerance = config.tolerance.unwrap_or_else(|| default_tolerance(config, &domain));
        let aggregate = Aggregate::from_rows(&rows);
        let verdict = if !preset.gating {
            Verdict::Exploratory
        } else if aggregate.n > 0 && tolerance.admits(predicted, aggregate.mean) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let citation = if ob == config.observable {
            preset.citation.to_string()
        } else {
            PRESETS
                .iter()
                .find(|p| p.config().observable == ob && p.config().domain == config.domain && p.config().s == config.s)
                .map_or_else(|| preset.citation.to_string(), |p| p.citation.to_string())
        };
        reports.push(ExperimentReport {
            preset: config.preset.clone(),
            config: cfg_ob,
            domain: domain.label(),
            observable: ob,
            estimator: "least-squares slope of log box count against log(1/box side); upper box dimension as a proxy for Hausdorff dimension".into(),
            predicted,
            citation,
            tolerance,
            aggregate,
            verdict,
            failed_paths: failed.len(),
            total_steps: rows.iter().map(|r| r.steps).sum(),
            rows,
            timestamp: Timestamp {
                started_unix,
                wall_clock_secs: wall,
            },
        });
    }
    Ok(reports)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_writer(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(w)
}

/// Writes `report.json`, `loglog.csv`, `summary.csv` and `fit.csv` into `dir`.
pub fn emit_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let json_path = dir.join("report.json");
    let text = serde_json::to_string_pretty(report)?;
    fs::write(&json_path, text + "\n").map_err(io_err(&json_path))?;

    let csv_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Csv { path: p, source }
    };

    let loglog = dir.join("loglog.csv");
    let mut w = csv_writer(&loglog, &["path", "level", "scale", "count"])?;
    for r in &report.rows {
        for ((k, s), c) in r.levels.iter().zip(&r.scales).zip(&r.counts) {
            w.serialize((r.index, k, s, c)).map_err(csv_err(&loglog))?;
        }
    }
    w.flush().map_err(io_err(&loglog))?;

    let summary = dir.join("summary.csv");
    let mut w = csv_writer(
        &summary,
        &["path", "seed", "steps", "set_size", "empty_set", "dimension", "stderr", "r2", "k_min", "k_max", "error"],
    )?;
    for r in &report.rows {
        w.serialize((
            r.index,
            r.seed,
            r.steps,
            r.set_size,
            r.empty_set,
            r.dimension,
            r.stderr,
            r.r2,
            r.window.map(|w| w[0]),
            r.window.map(|w| w[1]),
            r.error.as_deref(),
        ))
        .map_err(csv_err(&summary))?;
    }
    w.flush().map_err(io_err(&summary))?;

    let fit = dir.join("fit.csv");
    let mut w = csv_writer(&fit, &["path", "level", "scale", "log_inv_scale", "log_count", "fitted_log_count"])?;
    for r in &report.rows {
        let (Some(slope), Some([lo, hi])) = (r.dimension, r.window) else {
            continue;
        };
        let pts: Vec<(u32, f64, f64, f64)> = r
            .levels
            .iter()
            .zip(&r.scales)
            .zip(&r.counts)
            .filter(|((k, _), _)| (lo..=hi).contains(*k))
            .map(|((k, s), c)| (*k, *s, -s.ln(), (*c as f64).ln()))
            .collect();
        let n = pts.len() as f64;
        let intercept = pts.iter().map(|p| p.3 - slope * p.2).sum::<f64>() / n;
        for (k, s, x, y) in pts {
            w.serialize((r.index, k, s, x, y, intercept + slope * x))
                .map_err(csv_err(&fit))?;
        }
    }
    w.flush().map_err(io_err(&fit))?;
    Ok(vec![json_path, loglog, summary, fit])
}

/// One fixture of the estimator calibration gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub fixture: &'static str,
    pub analytic: f64,
    pub estimate: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Box-counting fits on sets of known dimension.
pub fn calibration_gate() -> Result<Vec<CalibrationResult>> {
    let mut out = Vec::new();
    let mut push = |fixture, analytic: f64, estimate: f64| {
        out.push(CalibrationResult {
            fixture,
            analytic,
            estimate,
            tolerance: 0.05,
            passed: (estimate - analytic).abs() <= 0.05,
        })
    };

    let spec = CantorSpec::middle_thirds(12, 1.0);
    let ts = cantor_timeset(&spec, 3f64.powi(-12) / 4.0)?;
    let cut = time_level_limit(1.0, ts.dt(), TIME_CUTOFF_CELLS).expect("grid is fine enough");
    let bc = box_counts_time(&ts, 0, cut)?;
    let est = fit_loglog(&bc.scales, &bc.counts, FitWindow::Auto)?;
    push("middle-thirds Cantor set", spec.analytic_dimension(), est.slope);

    let n = 512;
    let mut square = PointCloud::new(2);
    for i in 0..n {
        for j in 0..n {
            square.push(&[(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
        }
    }
    let bc = box_counts_space(&square, 1, 8, 0.0)?;
    let est = fit_loglog(&bc.scales, &bc.counts, FitWindow::All)?;
    push("filled square", 2.0, est.slope);

    let koch = make_koch_snowflake(7)?;
    let mut cloud = PointCloud::new(2);
    for v in koch.vertices() {
        cloud.push(&[v.x, v.y]);
    }
    let bc = box_counts_space(&cloud, 0, 12, 0.0)?;
    let est = fit_loglog(&bc.scales, &bc.counts, FitWindow::Auto)?;
    push("Koch vertex cloud, level 7", crate::geometry::koch::koch_dimension(), est.slope);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_formulas() {
        assert_eq!(predicted_occupation(2.0, 1.0, 2.0), 0.5);
        assert_eq!(predicted_trace(2.0, 1.0, 2.0), 1.0);
        assert_eq!(predicted_occupation(2.0, 1.0, 0.8), 0.0);
        assert!((predicted_image(2, 1.0 / 3.0) - 1.2619).abs() < 1e-4);
        assert_eq!(predicted_image(4, 0.25), 2.0);
        let d = crate::geometry::koch::koch_dimension();
        assert!((predicted_trace(2.0, d, 1.8) - 1.0619).abs() < 1e-4);
    }

    #[test]
    fn catalog_lists_every_preset() {
        let cat = preset_catalog();
        assert_eq!(cat.len(), 11);
        let get = |n: &str| cat.iter().find(|c| c.name == n).unwrap().predicted;
        assert_eq!(get("square-occupation"), 0.5);
        assert_eq!(get("square-trace"), 1.0);
        assert!((get("snowflake-occupation") - 0.5 * 4f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((get("product-trace") - 4f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((get("product-occupation") - get("snowflake-occupation")).abs() < 1e-12);
        assert!((get("subordinated-occupation") - (1.0 - 1.0 / 1.8)).abs() < 1e-12);
        assert_eq!(get("doubling-full"), 2.0);
        assert!(!cat.iter().find(|c| c.name == "corridor-trace").unwrap().gating);
    }

    #[test]
    fn windows() {
        assert_eq!(time_level_limit(100.0, 1e-5, 64.0), Some(17));
        assert_eq!(time_level_limit(100.0, 1e-5, 4.0), Some(21));
        assert_eq!(time_level_limit(1.0, 1.0, 4.0), None);
        assert_eq!(default_window(Some(17), 21), [14, 17]);
        assert_eq!(default_window(Some(2), 6), [0, 3]);
        assert_eq!(space_level_limit(1.0, 1e-5f64.sqrt()), Some(8));
    }

    #[test]
    fn config_file_overrides_preset() {
        let cfg = ExperimentConfig::from_json(r#"{"preset": "square-trace", "paths": 3, "T": 2.5}"#).unwrap();
        assert_eq!(cfg.paths, 3);
        assert_eq!(cfg.horizon, 2.5);
        assert_eq!(cfg.dt, 1e-5);
        assert!(ExperimentConfig::from_json(r#"{"preset": "nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"preset": "square-trace", "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"preset": "square-trace", "paths": 0}"#).is_err());
    }

    #[test]
    fn aggregate_skips_failed_rows() {
        let row = |d: Option<f64>| PathRow {
            index: 0,
            seed: 0,
            steps: 0,
            set_size: 0,
            empty_set: false,
            dimension: d,
            stderr: None,
            r2: None,
            window: None,
            levels: vec![],
            scales: vec![],
            counts: vec![],
            error: None,
        };
        let a = Aggregate::from_rows(&[row(Some(1.0)), row(Some(3.0)), row(None)]);
        assert_eq!(a.n, 2);
        assert_eq!(a.mean, 2.0);
        assert!((a.std - 2f64.sqrt()).abs() < 1e-12);
        assert!((a.stderr - 1.0).abs() < 1e-12);
    }
}
