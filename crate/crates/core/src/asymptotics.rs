//! Closed forms, comparison series and small-time power-law fits for
//! `k_t(e)`, plus eigenvalue counting and the Tauberian consistency check.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, sum_range, sum_range_counted, Execution};
use crate::exponents::Exponent;
use crate::kernel::{density_at_identity_with, KernelValue, Override, TruncationPolicy};
use crate::lattice;
use crate::measures::CentralMeasure;
use crate::output::sig17;
use crate::quadrature::IntervalRule;
use crate::series;
use crate::spectrum::{Cutoff, GroupKind, GroupSpectrum};
use crate::tail::{sphere_area, SeriesShape};

/// Default fit window and sample count.
pub const DEFAULT_WINDOW: (f64, f64) = (1e-3, 1e-2);
pub const DEFAULT_SAMPLES: usize = 10;

/// Poisson-summed torus Cauchy value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonValue {
    /// Truncated sum plus the continuum estimate of the remainder.
    pub value: f64,
    pub partial_sum: f64,
    /// `∫` of the radial profile over the region not covered by summed points.
    pub tail_estimate: f64,
    /// Rigorous bound on the discarded remainder.
    pub tail_bound: f64,
    pub terms_used: u64,
}

/// `k_t(e)` for the Cauchy semigroup on `T^d`.
///
/// `d = 1` is the exact `coth(πσt)`. For `d > 1` the dual lattice sum
/// `Γ((d+1)/2) π^{-(d+1)/2} Σ_m a (a² + |m|²)^{-(d+1)/2}`, `a = σt`, is
/// truncated at `|m| ≤ radius`.
pub fn torus_cauchy_closed_form(d: usize, sigma: f64, t: f64, radius: u64) -> Result<PoissonValue> {
    if d == 0 {
        return Err(Error::InvalidParameter("torus dimension must be positive".into()));
    }
    if !(sigma > 0.0 && t > 0.0) {
        return Err(Error::InvalidParameter("sigma and t must be positive".into()));
    }
    if d == 1 {
        let v = 1.0 / (PI * sigma * t).tanh();
        return Ok(PoissonValue {
            value: v,
            partial_sum: v,
            tail_estimate: 0.0,
            tail_bound: 0.0,
            terms_used: 0,
        });
    }
    let a = sigma * t;
    let nu = (d as f64 + 1.0) / 2.0;
    let c = (ln_gamma(nu) - nu * PI.ln()).exp();
    let max_sq = radius * radius;
    let (partial, terms) = sum_range_counted(Execution::default(), 0, radius, |first| {
        let mut acc = 0.0;
        let mut count = 0;
        lattice::for_each_orbit(d, first, max_sq, |nsq, mult| {
            acc += mult as f64 * a / (a * a + nsq as f64).powf(nu);
            count += mult;
        });
        (acc, count)
    });
    let area = sphere_area(d);
    // radius of the ball with as much volume as the summed cubes
    let volume = area / d as f64;
    let r_eff = (terms as f64 / volume).powf(1.0 / d as f64);
    // ∫_{|x|>R} a (a²+|x|²)^{-ν} dx = S_d ∫_0^{atan(a/R)} cos^{d-1} ψ dψ
    let rule = IntervalRule::gauss_legendre(32, 0.0, (a / r_eff).atan())?;
    let estimate = area * rule.integrate(|psi| psi.cos().powi(d as i32 - 1));
    let h = (d as f64).sqrt() / 2.0;
    let lower = radius as f64 - 2.0 * h;
    let bound = if lower >= h {
        area * 2f64.powi(d as i32 - 1) * a / lower
    } else {
        f64::INFINITY
    };
    Ok(PoissonValue {
        value: c * (partial + estimate),
        partial_sum: c * partial,
        tail_estimate: c * estimate,
        tail_bound: c * bound,
        terms_used: terms,
    })
}

/// `Σ_{m≥1} m² x^m = x(1+x)/(1−x)³` with `x = e^{-σt}`.
pub fn su2_cauchy_comparison_series(sigma: f64, t: f64) -> Result<f64> {
    if !(sigma > 0.0 && t > 0.0) {
        return Err(Error::InvalidParameter("sigma and t must be positive".into()));
    }
    let x = (-sigma * t).exp();
    let one_minus = -(-sigma * t).exp_m1();
    Ok(x * (1.0 + x) / one_minus.powi(3))
}

/// The exponent whose SU(2) coefficients are `e^{-tσκ/8}`, the heat
/// semigroup normalized so that its reference is [`heat_asymptotic_reference`].
pub fn heat_exponent(sigma: f64) -> Exponent {
    Exponent::Gaussian { variance: sigma / 4.0 }
}

/// `32√2 π² (4πσt)^{-3/2} e^{σt/8}` on SU(2).
pub fn heat_asymptotic_reference(kind: GroupKind, sigma: f64, t: f64) -> Result<f64> {
    if kind != GroupKind::Su2 {
        return Err(Error::Capability("heat reference is available on su2 only".into()));
    }
    if !(sigma > 0.0 && t > 0.0) {
        return Err(Error::InvalidParameter("sigma and t must be positive".into()));
    }
    Ok(heat_amplitude(sigma) * t.powf(-1.5) * (sigma * t / 8.0).exp())
}

/// `32√2 π² (4πσ)^{-3/2}`.
pub fn heat_amplitude(sigma: f64) -> f64 {
    32.0 * 2f64.sqrt() * PI * PI * (4.0 * PI * sigma).powf(-1.5)
}

/// `k_t(e)` through the Weyl-group form on SU(2): with `λ = m` on the
/// weight lattice, `|ρ|² = 1`, `d_λ = |m|` and `|W| = 2`,
/// `k_t(e) = ½ Σ_{m≠0} m² e^{-tη(√(m²−1))}`.
pub fn weyl_trace_form(m: &CentralMeasure, policy: &TruncationPolicy) -> Result<KernelValue> {
    if m.spectrum().kind() != GroupKind::Su2 {
        return Err(Error::Capability("weyl trace form is implemented for su2 only".into()));
    }
    policy.validate()?;
    if m.t() == 0.0 {
        return Err(Error::PointMass);
    }
    let plan = series::plan(m, SeriesShape::FULL, m.t(), policy);
    let top = plan.cutoff as i64 + 1;
    let sum = sum_range(policy.execution, 0, 2 * top as u64, |i| {
        let k = i as i64 - top;
        if k == 0 {
            return 0.0;
        }
        let k = k as f64;
        k * k * m.coefficient_at(k * k - 1.0)
    });
    Ok(KernelValue {
        value: 0.5 * sum,
        terms_used: 2 * top as u64,
        tail_bound: plan.tail_bound,
        certified: plan.certified,
    })
}

/// One `(t, value)` observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub value: f64,
}

/// Least-squares fit of `log value = log C − p log t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    #[serde(rename = "C")]
    pub c: f64,
    pub p: f64,
    /// Largest absolute log-residual.
    pub residual: f64,
    pub window: (f64, f64),
    pub samples: Vec<Sample>,
}

impl PowerLawFit {
    pub fn model(&self, t: f64) -> f64 {
        self.c * t.powf(-self.p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fit serializes")
    }

    /// Plot-ready `t,k_t_e,model_value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,k_t_e,model_value")?;
        for s in &self.samples {
            writeln!(out, "{},{},{}", sig17(s.t), sig17(s.value), sig17(self.model(s.t)))?;
        }
        Ok(())
    }
}

pub fn fit_power_law(samples: &[Sample], window: (f64, f64)) -> Result<PowerLawFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter("fit window must satisfy 0 < t_min < t_max".into()));
    }
    let used: Vec<Sample> = samples
        .iter()
        .copied()
        .filter(|s| s.t >= lo && s.t <= hi)
        .collect();
    if used.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs at least 5 samples in the window, got {}",
            used.len()
        )));
    }
    if let Some(s) = used.iter().find(|s| !(s.value > 0.0 && s.value.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs positive values, got {} at t = {}",
            s.value, s.t
        )));
    }
    let n = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|s| s.t.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|s| s.value.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit needs distinct sample times".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit {
        c: intercept.exp(),
        p: -slope,
        residual,
        window,
        samples: used,
    })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `k_t(e)` at each time, in input order.
pub fn identity_samples(
    m: &CentralMeasure,
    times: &[f64],
    policy: &TruncationPolicy,
    ov: Override,
) -> Result<Vec<(Sample, KernelValue)>> {
    let inner = policy.with_execution(Execution::Sequential);
    map_ordered(policy.execution, times, |&t| {
        let v = density_at_identity_with(&m.at_time(t)?, &inner, ov)?;
        Ok((Sample { t, value: v.value }, v))
    })
    .into_iter()
    .collect()
}

/// Fits `k_t(e)` sampled on a log grid over `window`.
pub fn fit_identity_density(
    m: &CentralMeasure,
    window: (f64, f64),
    count: usize,
    policy: &TruncationPolicy,
) -> Result<PowerLawFit> {
    let times = log_grid(window.0, window.1, count);
    let samples: Vec<Sample> = identity_samples(m, &times, policy, Override::Checked)?
        .into_iter()
        .map(|(s, _)| s)
        .collect();
    fit_power_law(&samples, window)
}

/// `N(λ)` on a grid of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingFunction {
    pub thresholds: Vec<f64>,
    pub counts: Vec<u64>,
}

/// `N(λ) = Σ_{η(√κ_π) ≤ λ} d_π²` for each `λ` in the sorted `grid`.
pub fn eigenvalue_counting(e: &Exponent, spectrum: &GroupSpectrum, grid: &[f64]) -> Result<CountingFunction> {
    e.validate()?;
    if grid.windows(2).any(|w| w[0] > w[1]) || grid.iter().any(|l| l.is_nan() || *l < 0.0) {
        return Err(Error::InvalidParameter("counting grid must be sorted and non-negative".into()));
    }
    let top = grid.last().copied().unwrap_or(0.0);
    let cutoff = match e.casimir_bound(top) {
        Some(k) => Cutoff::MaxCasimir(k),
        None if spectrum.kind() == GroupKind::Generic => Cutoff::MaxCount(spectrum.table().len()),
        None => {
            return Err(Error::InvalidParameter(
                "bounded exponent has infinitely many eigenvalues below its supremum".into(),
            ))
        }
    };
    let irreps = spectrum.enumerate(cutoff)?.irreps;
    let mut eig: Vec<(f64, u64)> = irreps
        .iter()
        .map(|r| (e.eta(r.casimir.sqrt()), r.dim * r.dim))
        .collect();
    eig.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut counts = Vec::with_capacity(grid.len());
    let (mut i, mut acc) = (0, 0u64);
    for &lambda in grid {
        while i < eig.len() && eig[i].0 <= lambda {
            acc += eig[i].1;
            i += 1;
        }
        counts.push(acc);
    }
    Ok(CountingFunction {
        thresholds: grid.to_vec(),
        counts,
    })
}

/// Tauberian consistency report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaramataReport {
    pub lambdas: Vec<f64>,
    /// `N(λ) Γ(1 + d/α) / λ^{d/α}`.
    pub ratios: Vec<f64>,
    pub target: f64,
    pub converged: bool,
}

/// Stability index of a stable or Cauchy exponent.
pub fn stability_index(e: &Exponent) -> Option<f64> {
    match e {
        Exponent::Stable { alpha, .. } => Some(*alpha),
        Exponent::Cauchy { .. } => Some(1.0),
        _ => None,
    }
}

/// Doubling grid `λ_max / 2^k`, ascending, with `count` points.
pub fn doubling_grid(lambda_max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .rev()
        .map(|k| lambda_max / 2f64.powi(k as i32))
        .collect()
}

/// Compares `N(λ) Γ(1+d/α) / λ^{d/α}` with the fitted small-time amplitude
/// on `lambdas`; converged when the last three ratios are within 10%.
pub fn karamata_check(
    e: &Exponent,
    spectrum: &GroupSpectrum,
    fit_c: f64,
    lambdas: &[f64],
) -> Result<KaramataReport> {
    let alpha = stability_index(e)
        .ok_or_else(|| Error::InvalidParameter("karamata check needs a stable or cauchy exponent".into()))?;
    // the amplitude of the fit absorbs the exponent's scale: η = b^α u^α
    let scale = match e {
        Exponent::Stable { b, alpha } => b.powf(*alpha),
        Exponent::Cauchy { sigma } => *sigma,
        _ => unreachable!(),
    };
    let order = spectrum.dim() as f64 / alpha;
    let n = eigenvalue_counting(e, spectrum, lambdas)?;
    let g = gamma(1.0 + order);
    let ratios: Vec<f64> = n
        .thresholds
        .iter()
        .zip(&n.counts)
        .map(|(l, c)| *c as f64 * g / l.powf(order))
        .collect();
    let target = fit_c * scale.powf(order);
    let converged = ratios.len() >= 3
        && ratios[ratios.len() - 3..]
            .iter()
            .all(|r| ((r - target) / target).abs() <= 0.1);
    Ok(KaramataReport {
        lambdas: lambdas.to_vec(),
        ratios,
        target,
        converged,
    })
}

/// Exploratory fit of `k_t(e) ∼ C t^{-dim/α}` for stable-type exponents on
/// any spectrum; nothing here is asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub group: String,
    pub exponent: String,
    pub predicted_p: Option<f64>,
    pub fit: PowerLawFit,
    pub certified: bool,
}

pub fn conjecture_report(
    m: &CentralMeasure,
    window: (f64, f64),
    count: usize,
    policy: &TruncationPolicy,
) -> Result<ConjectureReport> {
    let times = log_grid(window.0, window.1, count);
    let rows = identity_samples(m, &times, policy, Override::ForceUncertified)?;
    let certified = rows.iter().all(|(_, v)| v.certified);
    let samples: Vec<Sample> = rows.into_iter().map(|(s, _)| s).collect();
    let fit = fit_power_law(&samples, window)?;
    Ok(ConjectureReport {
        group: m.spectrum().kind().to_string(),
        exponent: m.exponent().to_string(),
        predicted_p: stability_index(m.exponent()).map(|a| m.spectrum().dim() as f64 / a),
        fit,
        certified,
    })
}
