//! Certified remainder bounds for spectral series.
//!
//! Every series handled here has summands bounded by
//! `d_π^a (1 + κ_π)^p c_π^q` with `c_π = e^{-t η(√κ_π)}`. When `η` admits a
//! lower envelope `η(u) ≥ scale·u^γ − offset`, the remainder beyond an index
//! cutoff is bounded by an explicit integral of `x^A e^{-s x^γ}`, which is in
//! turn bounded through the upper incomplete gamma function.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::exponents::DecayClass;
use crate::spectrum::GroupKind;

/// Summand shape `d_π^a (1 + κ_π)^p c_π^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesShape {
    pub dim_power: u32,
    pub sobolev_power: u32,
    pub coeff_power: f64,
}

impl SeriesShape {
    /// `Σ c_π`, the trace on class functions.
    pub const CENTRAL: SeriesShape = SeriesShape {
        dim_power: 0,
        sobolev_power: 0,
        coeff_power: 1.0,
    };
    /// `Σ d_π² c_π`; also dominates `Σ d_π c_π χ_π(σ)` at every point.
    pub const FULL: SeriesShape = SeriesShape {
        dim_power: 2,
        sobolev_power: 0,
        coeff_power: 1.0,
    };
    /// `Σ d_π² c_π²`.
    pub const SQUARE: SeriesShape = SeriesShape {
        dim_power: 2,
        sobolev_power: 0,
        coeff_power: 2.0,
    };

    pub fn sobolev(p: u32) -> Self {
        SeriesShape {
            dim_power: 2,
            sobolev_power: p,
            coeff_power: 2.0,
        }
    }

    pub fn term(&self, dim: u64, casimir: f64, coeff: f64) -> f64 {
        let d = (dim as f64).powi(self.dim_power as i32);
        let s = if self.sobolev_power == 0 {
            1.0
        } else {
            (1.0 + casimir).powi(self.sobolev_power as i32)
        };
        let c = if self.coeff_power == 1.0 {
            coeff
        } else {
            coeff.powf(self.coeff_power)
        };
        d * s * c
    }
}

/// Lower envelope `η(u) ≥ scale·u^gamma − offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub gamma: f64,
    pub scale: f64,
    pub offset: f64,
}

impl Envelope {
    pub fn from_decay(class: DecayClass) -> Option<Self> {
        match class {
            DecayClass::ExponentialType {
                gamma,
                scale,
                offset,
                ..
            } => Some(Envelope {
                gamma,
                scale,
                offset,
            }),
            _ => None,
        }
    }
}

/// Natural log of an upper bound on the upper incomplete gamma function
/// `Γ(a, x) = ∫_x^∞ y^{a-1} e^{-y} dy`, `a > 0`.
///
/// For `a ≤ 1` we use `y^{a-1} ≤ x^{a-1}`. For `a > 1` and `x > a − 1`,
/// `(y/x)^{a-1} ≤ e^{(a-1)(y-x)/x}` gives `x^{a-1} e^{-x} / (1 − (a−1)/x)`.
/// Both are combined with the trivial bound `Γ(a)`.
pub fn ln_upper_gamma_bound(a: f64, x: f64) -> f64 {
    let trivial = ln_gamma(a);
    if x <= 0.0 {
        return trivial;
    }
    let lead = (a - 1.0) * x.ln() - x;
    if a <= 1.0 {
        return lead.min(trivial);
    }
    let ratio = (a - 1.0) / x;
    if ratio >= 1.0 {
        return trivial;
    }
    (lead - (-ratio).ln_1p()).min(trivial)
}

/// Upper bound on `∫_{x0}^∞ x^a e^{-s x^γ} dx`, as a natural log.
pub fn ln_power_exp_integral(a: f64, s: f64, gamma: f64, x0: f64) -> f64 {
    let shape = (a + 1.0) / gamma;
    let y0 = s * x0.max(0.0).powf(gamma);
    -gamma.ln() - shape * s.ln() + ln_upper_gamma_bound(shape, y0)
}

/// Point beyond which `x^a e^{-s x^γ}` is non-increasing.
pub fn decreasing_from(a: f64, s: f64, gamma: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else {
        (a / (s * gamma)).powf(1.0 / gamma)
    }
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / ln_gamma(h).exp()
}

/// Remainder bound for the series of `shape` over irreps beyond the index
/// cutoff `j`, at time `t`.
///
/// The cutoff is the largest summed label `n` for SU(2) and SO(3) and the
/// largest summed squared norm `|n|²` for tori. Returns `+∞` when the
/// envelope argument does not apply yet (or for tabulated spectra).
pub fn series_tail(kind: GroupKind, shape: SeriesShape, env: Envelope, t: f64, j: u64) -> f64 {
    let q = shape.coeff_power;
    let p = shape.sobolev_power as f64;
    let a = shape.dim_power as f64;
    let gamma = env.gamma;
    match kind {
        GroupKind::Su2 | GroupKind::So3 => {
            // n ≥ 1: d ≤ k_d n, 1 + κ ≤ k_c n², κ ≥ n²
            let (k_d, k_c): (f64, f64) = if kind == GroupKind::Su2 { (2.0, 4.0) } else { (3.0, 3.0) };
            let x0 = j as f64;
            let power = a + 2.0 * p;
            let s = q * t * env.scale;
            if j == 0 || x0 < decreasing_from(power, s, gamma) {
                return f64::INFINITY;
            }
            let ln_c = q * t * env.offset + a * k_d.ln() + p * k_c.ln();
            (ln_c + ln_power_exp_integral(power, s, gamma, x0)).exp()
        }
        GroupKind::Torus(d) => {
            // cube comparison: each lattice point n with |n| ≥ R owns the unit
            // cube around it, contained in |x| ≥ R − h with h = √d / 2
            let h = (d as f64).sqrt() / 2.0;
            let r = ((j + 1) as f64).sqrt();
            let lower = r - 2.0 * h;
            let power = 2.0 * p;
            let s = q * t * env.scale * (2.0 * PI).powf(gamma);
            if lower < h || lower < decreasing_from(power, s, gamma) {
                return f64::INFINITY;
            }
            let ln_c = q * t * env.offset
                + p * (1.0 + 4.0 * PI * PI).ln()
                + sphere_area(d).ln()
                + (d as f64 - 1.0) * 2f64.ln();
            (ln_c + ln_power_exp_integral(d as f64 - 1.0 + power, s, gamma, lower)).exp()
        }
        GroupKind::Generic => f64::INFINITY,
    }
}

/// Smallest index cutoff `j ≤ max_j` whose tail bound meets `target`, or
/// `max_j` with its (possibly larger) bound when the budget runs out.
pub fn select_cutoff(
    kind: GroupKind,
    shape: SeriesShape,
    env: Envelope,
    t: f64,
    target: f64,
    max_j: u64,
) -> (u64, f64) {
    let tail = |j| series_tail(kind, shape, env, t, j);
    let mut hi = 1u64;
    while tail(hi) > target {
        if hi >= max_j {
            return (max_j, tail(max_j));
        }
        hi = hi.saturating_mul(2).min(max_j);
    }
    let mut lo = hi / 2;
    // invariant: tail(hi) ≤ target, and lo is 0 or fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, tail(hi))
}
