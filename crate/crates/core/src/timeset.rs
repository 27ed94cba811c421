//! Subsets of `[0, T]` stored as marked cells of a uniform grid.

use std::io::Write;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Number of whole steps of size `dt` in `[0, horizon]`.
pub fn grid_steps(horizon: f64, dt: f64) -> usize {
    (horizon / dt + 1e-9).floor() as usize
}

/// Number of grid cells `[i dt, (i+1) dt)` needed to cover `[0, horizon)`.
pub fn cell_count(horizon: f64, dt: f64) -> usize {
    (horizon / dt - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSet {
    dt: f64,
    horizon: f64,
    flags: BitVec<u64, Lsb0>,
}

impl TimeSet {
    pub fn empty(horizon: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be positive, got {horizon}")));
        }
        Ok(Self {
            dt,
            horizon,
            flags: bitvec![u64, Lsb0; 0; cell_count(horizon, dt)],
        })
    }

    pub fn full(horizon: f64, dt: f64) -> Result<Self> {
        let mut t = Self::empty(horizon, dt)?;
        t.flags.fill(true);
        Ok(t)
    }

    pub fn from_flags(horizon: f64, dt: f64, flags: impl IntoIterator<Item = bool>) -> Result<Self> {
        let mut t = Self::empty(horizon, dt)?;
        let mut n = 0;
        for (i, f) in flags.into_iter().enumerate() {
            if i >= t.flags.len() {
                return Err(invalid("flags", "more flags than grid cells"));
            }
            t.flags.set(i, f);
            n += 1;
        }
        if n != t.flags.len() {
            return Err(invalid("flags", format!("expected {} flags, got {n}", t.flags.len())));
        }
        Ok(t)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.not_any()
    }

    pub fn count(&self) -> usize {
        self.flags.count_ones()
    }

    #[inline]
    pub fn mark(&mut self, cell: usize) {
        self.flags.set(cell, true);
    }

    #[inline]
    pub fn is_marked(&self, cell: usize) -> bool {
        self.flags[cell]
    }

    pub fn marked(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags.iter_ones()
    }

    /// Maximal runs of marked cells as half-open index ranges.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start: Option<usize> = None;
        let mut prev = 0usize;
        for i in self.flags.iter_ones() {
            match start {
                Some(_) if i == prev + 1 => {}
                Some(s) => {
                    out.push((s, prev + 1));
                    start = Some(i);
                }
                None => start = Some(i),
            }
            prev = i;
        }
        if let Some(s) = start {
            out.push((s, prev + 1));
        }
        out
    }

    /// Run-length encoded interval list in time units.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.runs()
            .into_iter()
            .map(|(a, b)| (a as f64 * self.dt, (b as f64 * self.dt).min(self.horizon)))
            .collect()
    }

    pub fn write_intervals_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "start,end")?;
        for (a, b) in self.intervals() {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    }

    /// Merge groups of `factor` consecutive cells; a coarse cell is marked iff
    /// any of its fine cells is.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(invalid("factor", "must be at least 1"));
        }
        let mut out = Self::empty(self.horizon, self.dt * factor as f64)?;
        for i in self.flags.iter_ones() {
            let c = (i / factor).min(out.len() - 1);
            out.flags.set(c, true);
        }
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &TimeSet) -> bool {
        self.len() == other.len() && self.flags.iter_ones().all(|i| other.flags[i])
    }

    pub fn to_doc(&self) -> TimeSetDoc {
        TimeSetDoc {
            dt: self.dt,
            horizon: self.horizon,
            intervals: self.runs(),
        }
    }
}

/// Serializable run-length form of a [`TimeSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSetDoc {
    pub dt: f64,
    pub horizon: f64,
    pub intervals: Vec<(usize, usize)>,
}

impl TryFrom<TimeSetDoc> for TimeSet {
    type Error = crate::error::Error;

    fn try_from(doc: TimeSetDoc) -> Result<Self> {
        let mut t = TimeSet::empty(doc.horizon, doc.dt)?;
        for (a, b) in doc.intervals {
            if a > b || b > t.len() {
                return Err(invalid("intervals", format!("run {a}..{b} outside grid of {} cells", t.len())));
            }
            t.flags[a..b].fill(true);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(grid_steps(1.0, 1e-3), 1000);
        assert_eq!(cell_count(1.0, 1e-3), 1000);
        assert_eq!(cell_count(1.0, 0.3), 4);
        assert_eq!(grid_steps(1.0, 0.3), 3);
    }

    #[test]
    fn runs_and_intervals() {
        let t = TimeSet::from_flags(1.0, 0.125, [true, true, false, true, false, false, true, true]).unwrap();
        assert_eq!(t.runs(), vec![(0, 2), (3, 4), (6, 8)]);
        assert_eq!(t.intervals(), vec![(0.0, 0.25), (0.375, 0.5), (0.75, 1.0)]);
        let mut buf = Vec::new();
        t.write_intervals_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "start,end\n0,0.25\n0.375,0.5\n0.75,1\n");
    }

    proptest! {
        #[test]
        fn coarsening_never_unmarks(bits in proptest::collection::vec(any::<bool>(), 64), factor in 1usize..9) {
            let t = TimeSet::from_flags(64.0, 1.0, bits.clone()).unwrap();
            let c = t.coarsen(factor).unwrap();
            for (i, b) in bits.iter().enumerate() {
                if *b {
                    prop_assert!(c.is_marked((i / factor).min(c.len() - 1)));
                }
            }
            prop_assert_eq!(c.is_empty(), t.is_empty());
        }

        #[test]
        fn run_length_doc_round_trips(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let n = bits.len() as f64;
            let t = TimeSet::from_flags(n * 0.5, 0.5, bits).unwrap();
            let back = TimeSet::try_from(t.to_doc()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
