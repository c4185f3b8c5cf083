//! Randomized geometry invariants on windows and tessellation cells.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::functionals::section_volumes;
use crate::geometry::{ConvexPolytope, GeometryError};
use crate::measures::HyperplaneMeasureSpec;
use crate::mnw::run_mnw;
use crate::rng::{stream, StreamRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest relative error seen.
    pub max_error: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub const SPLIT_TOLERANCE: f64 = 1e-9;
pub const PARTITION_TOLERANCE: f64 = 1e-6;
pub const SECTION_TOLERANCE: f64 = 1e-7;
pub const CAPACITY_TOLERANCE: f64 = 1e-10;

fn uniform(rng: &mut StreamRng, a: f64, b: f64) -> f64 {
    a + (b - a) * rng.random::<f64>()
}

fn random_window(d: usize, rng: &mut StreamRng) -> ConvexPolytope {
    match (d, rng_pick(rng, 3)) {
        (_, 0) => {
            let lo: Vec<f64> = (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + uniform(rng, 0.2, 2.0)).collect();
            ConvexPolytope::axis_box(lo, hi).expect("positive sides")
        }
        (_, 1) => ConvexPolytope::cube(d, uniform(rng, 0.3, 2.0)).to_general(),
        (2, _) => {
            let n = 3 + rng_pick(rng, 10);
            ConvexPolytope::regular_polygon(n, uniform(rng, 0.3, 2.0)).expect("valid polygon")
        }
        _ => {
            let k = rng_pick(rng, 2) as u32;
            ConvexPolytope::icosphere(k, uniform(rng, 0.3, 2.0)).expect("valid icosphere")
        }
    }
}

fn rng_pick(rng: &mut StreamRng, n: usize) -> usize {
    rng.random_range(0..n)
}

fn random_spec(d: usize, rng: &mut StreamRng) -> HyperplaneMeasureSpec {
    if rng.random::<bool>() {
        HyperplaneMeasureSpec::isotropic(d).expect("d = 2, 3")
    } else {
        HyperplaneMeasureSpec::axis_aligned(d)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn run_cases(
    name: &str,
    cases: usize,
    seed: u64,
    tolerance: f64,
    case: impl Fn(&mut StreamRng) -> Option<f64> + Sync,
) -> PropertyOutcome {
    let errors: Vec<Option<f64>> = (0..cases as u64)
        .into_par_iter()
        .map(|i| case(&mut stream(seed, name, i)))
        .collect();
    let failures = errors.iter().filter(|e| !e.is_some_and(|e| e <= tolerance)).count();
    let max_error = errors.iter().map(|e| e.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    PropertyOutcome {
        name: name.to_string(),
        cases,
        failures,
        max_error,
        tolerance,
    }
}

/// Splitting a random cell of a random tessellation: the parts add up and
/// the interface equals the section. `None` marks a hard failure.
fn split_case(rng: &mut StreamRng) -> Option<f64> {
    let d = 2 + rng_pick(rng, 2);
    let spec = random_spec(d, rng);
    let w = random_window(d, rng);
    let t = 3.0 * rng.random::<f64>();
    let state = run_mnw(w, &spec, t, rng).ok()?;
    let cell = &state.cells()[rng_pick(rng, state.cells().len())].polytope;
    for _ in 0..20 {
        let h = spec.sample_hitting(cell, rng).ok()?;
        match cell.split(&h) {
            Ok(s) => {
                let vol = cell.volume();
                let parts = s.plus.volume() + s.minus.volume();
                let section = cell.intersect_with_hyperplane(&h).ok()??.volume();
                if !(s.plus.volume() > 0.0 && s.minus.volume() > 0.0) {
                    return None;
                }
                // Float cancellation on sliver cells is absolute, so errors
                // are relative to the cell size floored at 1e-6 of the window.
                let floor_d = 1e-6 * state.window().volume();
                let floor_f = 1e-6 * state.window().diameter().powi(d as i32 - 1);
                let e = ((parts - vol).abs() / vol.max(floor_d))
                    .max((s.interface.volume() - section).abs() / section.max(floor_f));
                return Some(e);
            }
            Err(GeometryError::NonSplitting) => continue,
            Err(_) => return None,
        }
    }
    None
}

fn partition_case(rng: &mut StreamRng) -> Option<f64> {
    let d = 2 + rng_pick(rng, 2);
    let spec = random_spec(d, rng);
    let w = random_window(d, rng);
    let state = run_mnw(w, &spec, 4.0 * rng.random::<f64>(), rng).ok()?;
    let report = state.check_partition(20, rng);
    report.is_valid().then_some(report.volume_relative_error)
}

fn section_case(rng: &mut StreamRng) -> Option<f64> {
    let d = 2 + rng_pick(rng, 2);
    let spec = random_spec(d, rng);
    let w = random_window(d, rng);
    let state = run_mnw(w.clone(), &spec, 4.0 * rng.random::<f64>(), rng).ok()?;
    let h = spec.sample_hitting(&w, rng).ok()?;
    let total: f64 = section_volumes(&state, &h).iter().sum();
    let whole = w.intersect_with_hyperplane(&h).ok()?.map_or(0.0, |s| s.volume());
    // Hyperplanes grazing the window have no interior section.
    Some(if whole == 0.0 { total } else { rel(total, whole) })
}

fn capacity_case(rng: &mut StreamRng) -> Option<f64> {
    let d = 2 + rng_pick(rng, 2);
    let spec = random_spec(d, rng);
    let p = random_window(d, rng);
    let c = 0.1 + 9.9 * rng.random::<f64>();
    Some(rel(spec.capacity(&p.scaled(c)), c * spec.capacity(&p)))
}

/// Runs the four invariants on `cases` random instances each.
pub fn geometry_property_suite(cases: usize, seed: u64) -> Vec<PropertyOutcome> {
    vec![
        run_cases("split_additivity", cases, seed, SPLIT_TOLERANCE, split_case),
        run_cases("partition_invariants", cases, seed, PARTITION_TOLERANCE, partition_case),
        run_cases("section_partition", cases, seed, SECTION_TOLERANCE, section_case),
        run_cases("capacity_homogeneity", cases, seed, CAPACITY_TOLERANCE, capacity_case),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        for o in geometry_property_suite(200, 5) {
            assert!(o.passed(), "{o:?}");
        }
    }
}
