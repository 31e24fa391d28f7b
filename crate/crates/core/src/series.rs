//! Radial spectral sums and truncation planning shared by the measure,
//! kernel and operator layers.

use crate::exec::{sum_range, sum_range_counted, Execution};
use crate::exponents::DecayClass;
use crate::kernel::TruncationPolicy;
use crate::lattice;
use crate::measures::CentralMeasure;
use crate::spectrum::{so3_casimir, su2_casimir, torus_casimir, GroupKind, GroupSpectrum};
use crate::tail::{select_cutoff, Envelope, SeriesShape};

/// Number of terms summed for diagnostic partial sums that carry no tail
/// certificate.
pub const REPORT_TERMS: u64 = 100_000;

/// Index cutoff plus what is known about the discarded remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    /// Largest summed label (SU(2), SO(3)), squared norm (tori) or row
    /// position (tables).
    pub cutoff: u64,
    pub tail_bound: Option<f64>,
    pub certified: bool,
}

/// Largest index cutoff whose series has at most `max_terms` terms.
pub fn cutoff_for_terms(spec: &GroupSpectrum, max_terms: u64) -> u64 {
    let max_terms = max_terms.max(1);
    match spec.kind() {
        GroupKind::Su2 | GroupKind::So3 => max_terms - 1,
        GroupKind::Torus(d) => {
            // (2R + 1)^d ≤ max_terms bounds the lattice ball of radius R
            let side = (max_terms as f64).powf(1.0 / d as f64);
            let r = ((side - 1.0) / 2.0).floor().max(1.0) as u64;
            r * r
        }
        GroupKind::Generic => (spec.table().len() as u64).min(max_terms) - 1,
    }
}

/// Truncation plan for the series of `shape` at time `t`.
pub fn plan(m: &CentralMeasure, shape: SeriesShape, t: f64, policy: &TruncationPolicy) -> Plan {
    let spec = m.spectrum();
    let max_j = cutoff_for_terms(spec, policy.hard_max_terms);
    match (spec.kind(), Envelope::from_decay(m.exponent().decay_class())) {
        (GroupKind::Generic, _) => Plan {
            cutoff: max_j,
            tail_bound: None,
            certified: false,
        },
        (kind, Some(env)) => {
            let (cutoff, tail) = select_cutoff(kind, shape, env, t, policy.target_tail, max_j);
            Plan {
                cutoff,
                tail_bound: tail.is_finite().then_some(tail),
                certified: tail <= policy.target_tail,
            }
        }
        (_, None) => Plan {
            cutoff: cutoff_for_terms(spec, policy.hard_max_terms.min(REPORT_TERMS)),
            tail_bound: None,
            certified: false,
        },
    }
}

/// `Σ g(d_π, κ_π)` over every irrep within the index cutoff, with the number
/// of irreps summed. Torus sums are compressed to hyperoctahedral orbits.
pub fn radial_sum<G>(spec: &GroupSpectrum, exec: Execution, cutoff: u64, g: G) -> (f64, u64)
where
    G: Fn(u64, f64) -> f64 + Sync + Send,
{
    match spec.kind() {
        GroupKind::Su2 => (sum_range(exec, 0, cutoff, |n| g(n + 1, su2_casimir(n))), cutoff + 1),
        GroupKind::So3 => (
            sum_range(exec, 0, cutoff, |n| g(2 * n + 1, so3_casimir(n))),
            cutoff + 1,
        ),
        GroupKind::Torus(d) => sum_range_counted(exec, 0, lattice::isqrt(cutoff), |first| {
            let mut acc = 0.0;
            let mut count = 0;
            lattice::for_each_orbit(d, first, cutoff, |norm_sq, mult| {
                acc += mult as f64 * g(1, torus_casimir(norm_sq));
                count += mult;
            });
            (acc, count)
        }),
        GroupKind::Generic => {
            let rows = spec.table();
            let end = cutoff.min(rows.len() as u64 - 1);
            (
                sum_range(exec, 0, end, |i| {
                    let r = &rows[i as usize];
                    g(r.dim, r.casimir)
                }),
                end + 1,
            )
        }
    }
}

/// Whether `Σ d_π^a (1+κ_π)^p (1+β²κ_π)^{-qt}` converges, for built-in
/// spectra where the summands have exact power asymptotics; for tabulated
/// spectra the same inequality is only sufficient.
///
/// With `d_π ≍ |λ|^m` and `κ_π ≍ |λ|²` on an `r`-dimensional lattice the
/// series behaves like `Σ |λ|^{a m + 2p − 2qt}`.
pub fn logarithmic_converges(spec: &GroupSpectrum, shape: SeriesShape, t: f64) -> bool {
    let m = spec.m();
    let r = spec.rank() as f64;
    let a = shape.dim_power as f64;
    let p = shape.sobolev_power as f64;
    a * m + 2.0 * p - 2.0 * shape.coeff_power * t < -r
}

/// Sup of `η` when bounded.
pub fn bounded_sup(class: DecayClass) -> Option<f64> {
    match class {
        DecayClass::Bounded { sup } => Some(sup),
        _ => None,
    }
}
