//! Event-driven MNW cell division.
//!
//! Every live cell carries an absolute death time drawn at its creation as
//! `birth + Exp(Λ([c]))`. A binary min-heap keyed by death time drives the
//! simulation: the earliest death splits its cell by a hyperplane sampled
//! from the normalized hitting measure, and each child draws a fresh
//! lifetime. Stopping at a horizon leaves the heap intact, so a stopped run
//! can be continued and the continued run is the same trajectory.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolytope, GeometryError};
use crate::measures::{HyperplaneMeasureSpec, MeasureError};

/// Consecutive degenerate hyperplane draws tolerated for a single cell.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MnwError {
    #[error("horizon must be finite and non-negative, got {0}")]
    NegativeHorizon(f64),
    #[error("time reversal: cannot continue from {from} back to {to}")]
    TimeReversal { from: f64, to: f64 },
    #[error("checkpoint times must be ascending and non-negative")]
    UnsortedTimes,
    #[error("non-finite capacity {0}")]
    NonFiniteCapacity(f64),
    #[error("window must be a full-dimensional polytope")]
    DegenerateWindow,
    #[error("this tessellation was rescaled or deserialized and cannot be continued")]
    NotContinuable,
    #[error("rescaling factor must be positive and finite, got {0}")]
    BadFactor(f64),
    #[error("cell could not be split after {0} hyperplane draws")]
    SplitFailed(usize),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A cell-separating facet created by one split.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaxPolytopeRecord {
    pub facet: ConvexPolytope,
    pub birth_time: f64,
    pub normal: Vec<f64>,
    /// `(d-1)`-volume of `facet`.
    pub measure: f64,
}

/// A live cell.
#[derive(Clone, Debug)]
pub struct Cell {
    pub polytope: ConvexPolytope,
    pub capacity: f64,
    /// Index of the maximal polytope whose split created this cell.
    pub parent: Option<usize>,
    death_time: f64,
}

impl Cell {
    pub fn death_time(&self) -> f64 {
        self.death_time
    }
}

#[derive(Clone, Copy, Debug)]
struct Event {
    time: f64,
    slot: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so that `BinaryHeap` pops the earliest death first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

/// Counters for events that have zero probability in exact arithmetic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Hyperplane draws rejected because they only grazed the cell.
    pub redrawn_splits: u64,
}

/// `Y(t, W)`: a STIT tessellation of a window up to a horizon.
#[derive(Clone, Debug)]
pub struct Tessellation {
    window: ConvexPolytope,
    spec: HyperplaneMeasureSpec,
    horizon: f64,
    cells: Vec<Cell>,
    maximal_polytopes: Vec<MaxPolytopeRecord>,
    pending: BinaryHeap<Event>,
    continuable: bool,
    diagnostics: Diagnostics,
    seed: Option<u64>,
}

/// Result of [`Tessellation::check_partition`].
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    /// `|Σ vol(cells) - vol(W)| / vol(W)`.
    pub volume_relative_error: f64,
    /// Sample points lying in zero cells or in more than one cell interior.
    pub membership_failures: usize,
    pub facet_count_matches: bool,
    pub birth_times_sorted: bool,
}

impl PartitionReport {
    pub fn is_valid(&self) -> bool {
        self.volume_relative_error <= 1e-6
            && self.membership_failures == 0
            && self.facet_count_matches
            && self.birth_times_sorted
    }
}

fn lifetime<R: Rng + ?Sized>(capacity: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / capacity
}

fn check_horizon(t: f64) -> Result<(), MnwError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(MnwError::NegativeHorizon(t));
    }
    Ok(())
}

/// Simulates `Y(horizon, window)`.
pub fn run_mnw<R: Rng + ?Sized>(
    window: ConvexPolytope,
    spec: &HyperplaneMeasureSpec,
    horizon: f64,
    rng: &mut R,
) -> Result<Tessellation, MnwError> {
    check_horizon(horizon)?;
    let mut state = Tessellation::new(window, spec, rng)?;
    state.advance_to(horizon, rng)?;
    Ok(state)
}

/// Continues a run to a later horizon.
pub fn continue_mnw<R: Rng + ?Sized>(
    mut state: Tessellation,
    new_horizon: f64,
    rng: &mut R,
) -> Result<Tessellation, MnwError> {
    state.advance_to(new_horizon, rng)?;
    Ok(state)
}

/// Snapshots of one trajectory at each of the ascending `times`.
pub fn run_with_checkpoints<R: Rng + ?Sized>(
    window: ConvexPolytope,
    spec: &HyperplaneMeasureSpec,
    times: &[f64],
    rng: &mut R,
) -> Result<Vec<Tessellation>, MnwError> {
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(MnwError::UnsortedTimes);
    }
    let mut state = Tessellation::new(window, spec, rng)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        state.advance_to(t, rng)?;
        out.push(state.clone());
    }
    Ok(out)
}

/// Scales all geometry by `factor` about the origin; birth times are kept.
///
/// Pending lifetimes are tied to the old capacities, so the result cannot
/// be continued.
pub fn rescale_tessellation(state: &Tessellation, factor: f64) -> Result<Tessellation, MnwError> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(MnwError::BadFactor(factor));
    }
    let k = state.dimension() as i32 - 1;
    Ok(Tessellation {
        window: state.window.scaled(factor),
        spec: state.spec.clone(),
        horizon: state.horizon,
        cells: state
            .cells
            .iter()
            .map(|c| Cell {
                polytope: c.polytope.scaled(factor),
                capacity: c.capacity * factor,
                parent: c.parent,
                death_time: f64::INFINITY,
            })
            .collect(),
        maximal_polytopes: state
            .maximal_polytopes
            .iter()
            .map(|m| MaxPolytopeRecord {
                facet: m.facet.scaled(factor),
                birth_time: m.birth_time,
                normal: m.normal.clone(),
                measure: m.measure * factor.powi(k),
            })
            .collect(),
        pending: BinaryHeap::new(),
        continuable: false,
        diagnostics: state.diagnostics.clone(),
        seed: state.seed,
    })
}

impl Tessellation {
    /// The single-cell tessellation at time 0.
    pub fn new<R: Rng + ?Sized>(
        window: ConvexPolytope,
        spec: &HyperplaneMeasureSpec,
        rng: &mut R,
    ) -> Result<Self, MnwError> {
        if window.ambient_dimension() != spec.dimension() {
            return Err(MeasureError::DimensionMismatch {
                expected: spec.dimension(),
                found: window.ambient_dimension(),
            }
            .into());
        }
        if window.intrinsic_dimension() != window.ambient_dimension() || !(window.volume() > 0.0) {
            return Err(MnwError::DegenerateWindow);
        }
        let mut state = Tessellation {
            window: window.clone(),
            spec: spec.clone(),
            horizon: 0.0,
            cells: Vec::new(),
            maximal_polytopes: Vec::new(),
            pending: BinaryHeap::new(),
            continuable: true,
            diagnostics: Diagnostics::default(),
            seed: None,
        };
        state.push_cell(window, None, 0.0, None, rng)?;
        Ok(state)
    }

    /// Records the master seed for output metadata.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn push_cell<R: Rng + ?Sized>(
        &mut self,
        polytope: ConvexPolytope,
        parent: Option<usize>,
        birth: f64,
        slot: Option<usize>,
        rng: &mut R,
    ) -> Result<(), MnwError> {
        let capacity = self.spec.capacity(&polytope);
        if !capacity.is_finite() {
            return Err(MnwError::NonFiniteCapacity(capacity));
        }
        let death_time = if capacity > 0.0 {
            birth + lifetime(capacity, rng)
        } else {
            f64::INFINITY
        };
        let cell = Cell {
            polytope,
            capacity,
            parent,
            death_time,
        };
        let slot = match slot {
            Some(i) => {
                self.cells[i] = cell;
                i
            }
            None => {
                self.cells.push(cell);
                self.cells.len() - 1
            }
        };
        if death_time.is_finite() {
            self.pending.push(Event { time: death_time, slot });
        }
        Ok(())
    }

    /// Runs the event loop until every pending death lies beyond `t`.
    pub fn advance_to<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Result<(), MnwError> {
        check_horizon(t)?;
        if t < self.horizon {
            return Err(MnwError::TimeReversal {
                from: self.horizon,
                to: t,
            });
        }
        if !self.continuable && t > self.horizon {
            return Err(MnwError::NotContinuable);
        }
        while let Some(&Event { time, slot }) = self.pending.peek() {
            if time > t {
                break;
            }
            self.pending.pop();
            self.split_cell(slot, time, rng)?;
        }
        self.horizon = t;
        Ok(())
    }

    fn split_cell<R: Rng + ?Sized>(&mut self, slot: usize, time: f64, rng: &mut R) -> Result<(), MnwError> {
        let mut redraws = 0;
        let split = loop {
            let h = self.spec.sample_hitting(&self.cells[slot].polytope, rng)?;
            match self.cells[slot].polytope.split(&h) {
                Ok(s) => break s,
                Err(GeometryError::NonSplitting) => {
                    self.diagnostics.redrawn_splits += 1;
                    redraws += 1;
                    if redraws >= MAX_REDRAWS {
                        return Err(MnwError::SplitFailed(redraws));
                    }
                }
                Err(e) => return Err(e.into()),
            }
        };
        let facet_index = self.maximal_polytopes.len();
        let normal = split
            .interface
            .carrier()
            .expect("interface carries its hyperplane")
            .normal()
            .to_vec();
        self.maximal_polytopes.push(MaxPolytopeRecord {
            measure: split.interface.volume(),
            facet: split.interface,
            birth_time: time,
            normal,
        });
        self.push_cell(split.minus, Some(facet_index), time, Some(slot), rng)?;
        self.push_cell(split.plus, Some(facet_index), time, None, rng)?;
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.window.ambient_dimension()
    }

    pub fn window(&self) -> &ConvexPolytope {
        &self.window
    }

    pub fn spec(&self) -> &HyperplaneMeasureSpec {
        &self.spec
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Maximal polytopes in order of birth.
    pub fn maximal_polytopes(&self) -> &[MaxPolytopeRecord] {
        &self.maximal_polytopes
    }

    /// The prefix of maximal polytopes born by time `s`, i.e. those of the
    /// coupled `Y(s, W)`.
    pub fn maximal_polytopes_until(&self, s: f64) -> &[MaxPolytopeRecord] {
        let n = self.maximal_polytopes.partition_point(|m| m.birth_time <= s);
        &self.maximal_polytopes[..n]
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_continuable(&self) -> bool {
        self.continuable
    }

    /// Total `(d-1)`-volume of the maximal polytopes.
    pub fn total_surface(&self) -> f64 {
        self.maximal_polytopes.iter().map(|m| m.measure).sum()
    }

    /// Checks the partition invariants, with `n_points` uniform points from
    /// the window for the membership test.
    pub fn check_partition<R: Rng + ?Sized>(&self, n_points: usize, rng: &mut R) -> PartitionReport {
        let vol_w = self.window.volume();
        let vol_cells: f64 = self.cells.iter().map(|c| c.polytope.volume()).sum();
        let d = self.dimension();
        let axes: Vec<(f64, f64)> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                self.window.support_range(&e)
            })
            .collect();
        let mut failures = 0;
        let mut x = vec![0.0; d];
        let mut drawn = 0;
        while drawn < n_points {
            for (xi, (lo, hi)) in x.iter_mut().zip(&axes) {
                *xi = lo + (hi - lo) * rng.random::<f64>();
            }
            // Points within the snap tolerance of a boundary can legitimately
            // belong to two closed cells; test against shrunken interiors.
            if !self.window.contains_with_tolerance(&x, -1e-7) {
                continue;
            }
            drawn += 1;
            let closed = self.cells.iter().filter(|c| c.polytope.contains(&x)).count();
            let interior = self
                .cells
                .iter()
                .filter(|c| c.polytope.contains_with_tolerance(&x, -1e-7))
                .count();
            if closed == 0 || interior > 1 {
                failures += 1;
            }
        }
        PartitionReport {
            volume_relative_error: (vol_cells - vol_w).abs() / vol_w,
            membership_failures: failures,
            facet_count_matches: self.maximal_polytopes.len() + 1 == self.cells.len(),
            birth_times_sorted: self
                .maximal_polytopes
                .windows(2)
                .all(|w| w[0].birth_time <= w[1].birth_time)
                && self.maximal_polytopes.iter().all(|m| m.birth_time <= self.horizon),
        }
    }

    /// Geometry as JSON (window, cells, maximal polytopes with birth times).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TessellationJson::from(self)).expect("serializable")
    }
}

/// Documented geometry format written by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TessellationJson {
    pub dimension: usize,
    pub horizon: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    pub measure: HyperplaneMeasureSpec,
    pub window: ConvexPolytope,
    pub cells: Vec<ConvexPolytope>,
    pub maximal_polytopes: Vec<MaxPolytopeRecord>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

impl From<&Tessellation> for TessellationJson {
    fn from(t: &Tessellation) -> Self {
        TessellationJson {
            dimension: t.dimension(),
            horizon: t.horizon,
            seed: t.seed,
            measure: t.spec.clone(),
            window: t.window.clone(),
            cells: t.cells.iter().map(|c| c.polytope.clone()).collect(),
            maximal_polytopes: t.maximal_polytopes.clone(),
            diagnostics: t.diagnostics.clone(),
        }
    }
}

impl From<TessellationJson> for Tessellation {
    /// Restores a tessellation for analysis; it cannot be continued.
    fn from(j: TessellationJson) -> Self {
        Tessellation {
            cells: j
                .cells
                .into_iter()
                .map(|p| Cell {
                    capacity: j.measure.capacity(&p),
                    polytope: p,
                    parent: None,
                    death_time: f64::INFINITY,
                })
                .collect(),
            window: j.window,
            spec: j.measure,
            horizon: j.horizon,
            maximal_polytopes: j.maximal_polytopes,
            pending: BinaryHeap::new(),
            continuable: false,
            diagnostics: j.diagnostics,
            seed: j.seed,
        }
    }
}
