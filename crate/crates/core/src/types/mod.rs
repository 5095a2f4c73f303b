//! Shared domain types: sample sets, support points, pole pairs, barycentric
//! forms, realized models and the iteration configuration/report.

mod config;
mod forms;
mod models;
mod poles;
mod samples;

pub use config::{FitReport, InitStrategy, IterationConfig, IterationRecord, Termination};
pub use forms::{FullyStructuredBarycentric, PartialStructuredBarycentric, UnstructuredBarycentric};
pub use models::{FirstOrderModel, SecondOrderModel};
pub use poles::{lambdas_from_modal, pair_from_lambdas, PolePair, PolePairSet, PoleSet};
pub use samples::FrequencySampleSet;

use num_complex::Complex64;

/// Points whose imaginary part is below this fraction of their magnitude are
/// treated as real.
pub const SNAP_REL_TOL: f64 = 1e-10;

/// Returns `true` when all entries are pairwise distinct (exact comparison).
pub(crate) fn all_distinct(points: &[Complex64]) -> bool {
    let mut sorted: Vec<Complex64> = points.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Multiset check for conjugate closure with an absolute/relative tolerance.
pub(crate) fn is_conjugate_closed(points: &[Complex64], rel_tol: f64) -> bool {
    let mut used = vec![false; points.len()];
    for i in 0..points.len() {
        if used[i] {
            continue;
        }
        let p = points[i];
        let scale = rel_tol * p.norm().max(f64::MIN_POSITIVE);
        if p.im.abs() <= scale {
            used[i] = true;
            continue;
        }
        let target = p.conj();
        let partner = (0..points.len())
            .filter(|&j| j != i && !used[j])
            .find(|&j| (points[j] - target).norm() <= scale);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}
