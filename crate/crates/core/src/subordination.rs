//! One-sided stable subordinators and subordinated paths.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::geometry::DomainSpec;
use crate::rbm::{Contact, PathSample, Walker};
use crate::rng::CounterRng;
use crate::timeset::{cell_count, grid_steps, TimeSet};

/// Nondecreasing path `xi` sampled on the grid `k dt`, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPath {
    pub s: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    values: Vec<f64>,
}

impl SubordinatorPath {
    pub fn from_values(s: f64, dt: f64, horizon: f64, seed: u64, values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&0.0) {
            return Err(invalid("values", "must start at 0"));
        }
        if values.len() != grid_steps(horizon, dt) + 1 {
            return Err(invalid("values", "length does not match the grid"));
        }
        if values.windows(2).any(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
            return Err(invalid("values", "must be finite and nondecreasing"));
        }
        Ok(Self {
            s,
            dt,
            horizon,
            seed,
            values,
        })
    }

    /// The deterministic clock `xi_t = t`.
    pub fn identity(dt: f64, horizon: f64) -> Self {
        let n = grid_steps(horizon, dt);
        Self {
            s: 1.0,
            dt,
            horizon,
            seed: 0,
            values: (0..=n).map(|k| k as f64 * dt).collect(),
        }
    }

    pub fn constant_zero(dt: f64, horizon: f64) -> Self {
        Self {
            s: 0.0,
            dt,
            horizon,
            seed: 0,
            values: vec![0.0; grid_steps(horizon, dt) + 1],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,xi")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{v}", k as f64 * self.dt)?;
        }
        Ok(())
    }
}

/// Positive `s`-stable variate with Laplace transform `exp(-lambda^s)`, from a
/// uniform angle and an independent unit exponential (Kanter's representation).
#[inline]
pub fn positive_stable(s: f64, u: f64, e: f64) -> f64 {
    let a = (s * u).sin() / u.sin().powf(1.0 / s);
    let b = ((1.0 - s) * u).sin() / e;
    a * b.powf((1.0 - s) / s)
}

pub fn sample_subordinator(s: f64, horizon: f64, dt: f64, seed: u64) -> Result<SubordinatorPath> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("s", format!("stability index must be in (0, 1), got {s}")));
    }
    if !(dt > 0.0 && horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("dt", "step and horizon must be positive"));
    }
    let rng = CounterRng::new(seed).substream(0x5AB0);
    let n = grid_steps(horizon, dt);
    let scale = dt.powf(1.0 / s);
    let mut values = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    values.push(0.0);
    for k in 0..n as u64 {
        let u = PI * rng.uniform_at(k, 0);
        let e = rng.exp_at(k, 1);
        acc += scale * positive_stable(s, u, e);
        values.push(acc);
    }
    SubordinatorPath::from_values(s, dt, horizon, seed, values)
}

/// Grid index of `x`'s step at or below time `v`.
#[inline]
fn floor_index(v: f64, dt: f64) -> usize {
    (v / dt + 1e-9).floor() as usize
}

/// `Z_t = X_{xi_t}`, reading `X` at the nearest grid index at or below `xi_t`.
pub fn subordinate_path(x: &PathSample, xi: &SubordinatorPath) -> Result<PathSample> {
    let last = x.len() - 1;
    let needed = floor_index(xi.max(), x.dt);
    if needed > last {
        return Err(Error::HorizonExceeded {
            needed: xi.max(),
            available: x.horizon,
        });
    }
    let mut positions = Vec::with_capacity(xi.values.len() * x.dim);
    for &v in &xi.values {
        positions.extend_from_slice(x.position(floor_index(v, x.dt)));
    }
    PathSample::from_positions(xi.dt, xi.horizon, x.dim, xi.seed, x.domain_id.clone(), positions)
}

/// Default bound on the number of steps the underlying walk may take.
pub const DEFAULT_MAX_CLOCK_STEPS: u64 = 1_000_000_000;

/// Streams `Z_j = X_{floor(xi_j / x_dt)}` for every clock index `j`, walking
/// `X` forward only as far as the clock requires. Returns the number of steps
/// taken by `X`. Positions agree with [`subordinate_path`] applied to a stored
/// path of the same seed.
#[allow(clippy::too_many_arguments)]
pub fn walk_subordinated(
    domain: &DomainSpec,
    x0: &[f64],
    x_dt: f64,
    eps: f64,
    seed: u64,
    xi: &SubordinatorPath,
    max_steps: u64,
    mut f: impl FnMut(usize, &[f64], Option<Contact>),
) -> Result<u64> {
    let needed = floor_index(xi.max(), x_dt) as u64;
    if needed > max_steps {
        return Err(Error::HorizonExceeded {
            needed: xi.max(),
            available: max_steps as f64 * x_dt,
        });
    }
    let mut w = Walker::new(domain, x0, x_dt, eps, seed)?;
    for (j, &v) in xi.values.iter().enumerate() {
        let target = floor_index(v, x_dt) as u64;
        while w.step_index() < target {
            w.advance();
        }
        f(j, w.position(), w.contact());
    }
    Ok(w.step_index())
}

/// Grid indices of `X` visited by the subordinated clock, one per `xi` value.
pub fn clock_indices(xi: &SubordinatorPath, x_dt: f64) -> Vec<usize> {
    xi.values.iter().map(|&v| floor_index(v, x_dt)).collect()
}

/// `C_E = {t : xi_t in E}` on the subordinator's grid.
pub fn preimage_timeset(xi: &SubordinatorPath, e: &TimeSet) -> Result<TimeSet> {
    let cells = cell_count(xi.horizon, xi.dt);
    let mut out = TimeSet::empty(xi.horizon, xi.dt)?;
    for (j, &v) in xi.values[..cells].iter().enumerate() {
        let c = floor_index(v, e.dt());
        if c >= e.len() {
            return Err(Error::GridMismatch(format!(
                "xi reaches {v} but the time set covers only [0, {})",
                e.len() as f64 * e.dt()
            )));
        }
        if e.is_marked(c) {
            out.mark(j);
        }
    }
    Ok(out)
}
