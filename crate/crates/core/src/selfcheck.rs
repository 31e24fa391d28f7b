//! Named end-to-end checks of the closed forms, asymptotic constants and
//! operator identities, runnable from the command line.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{
    doubling_grid, fit_identity_density, heat_amplitude, heat_exponent, karamata_check,
    su2_cauchy_comparison_series, torus_cauchy_closed_form, DEFAULT_SAMPLES, DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::exponents::Exponent;
use crate::kernel::{
    conjugation_average, density_at_identity, normalization, plancherel_product, trace_central,
    trace_full, weyl_inner_product, TruncationPolicy,
};
use crate::measures::{decide_regularity, CentralMeasure, Level, Verdict};
use crate::operators::{apply_generator, apply_resolvent, apply_semigroup, FourierFunction};
use crate::spectrum::{load_spectrum, GroupSpectrum};

/// The tabulated SU(3) spectrum shipped with the crate.
pub const SU3_FIXTURE: &str = include_str!("../data/su3.csv");

type Outcome = std::result::Result<String, String>;

struct Check {
    name: &'static str,
    run: fn() -> Outcome,
}

const CHECKS: &[Check] = &[
    Check { name: "torus-closed-form", run: torus_closed_form },
    Check { name: "poisson-summation", run: poisson_summation },
    Check { name: "sandwich", run: sandwich },
    Check { name: "su2-cauchy-fit", run: su2_cauchy_fit },
    Check { name: "so3-cauchy-fit", run: so3_cauchy_fit },
    Check { name: "heat-fit", run: heat_fit },
    Check { name: "relativistic-fit", run: relativistic_fit },
    Check { name: "operator-algebra", run: operator_algebra },
    Check { name: "plancherel", run: plancherel },
    Check { name: "trace-inequality", run: trace_inequality },
    Check { name: "regularity", run: regularity },
    Check { name: "normalization", run: normalization_check },
    Check { name: "karamata", run: karamata },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfcheckReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SelfcheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{mark} {:<20} {:>8.3}s  {}\n", c.name, c.seconds, c.detail));
        }
        s
    }
}

/// Runs every check, or only those named in `only`.
pub fn run(only: &[String]) -> Result<SelfcheckReport> {
    for name in only {
        if !CHECKS.iter().any(|c| c.name == name) {
            return Err(Error::InvalidParameter(format!(
                "unknown check `{name}`; known: {}",
                check_names().join(", ")
            )));
        }
    }
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|n| n == c.name))
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)();
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name: c.name.to_string(),
                passed,
                detail,
                seconds,
            }
        })
        .collect();
    Ok(SelfcheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn measure(spec: GroupSpectrum, e: Exponent, t: f64) -> std::result::Result<CentralMeasure, String> {
    lib(CentralMeasure::new(Arc::new(spec), e, t))
}

fn torus_closed_form() -> Outcome {
    let policy = TruncationPolicy::default();
    let mut worst: f64 = 0.0;
    for t in [0.1, 0.5, 1.0] {
        let m = measure(lib(GroupSpectrum::torus(1))?, Exponent::Cauchy { sigma: 1.0 }, t)?;
        let v = lib(density_at_identity(&m, &policy))?;
        let exact = 1.0 / (PI * t).tanh();
        let rel = (v.value - exact).abs() / exact;
        ensure(v.certified && rel <= 1e-10, || format!("t={t}: rel err {rel:e}, certified {}", v.certified))?;
        worst = worst.max(rel);
    }
    Ok(format!("max rel err {worst:.2e}"))
}

fn poisson_summation() -> Outcome {
    let policy = TruncationPolicy::default();
    let mut worst: f64 = 0.0;
    for t in [0.01, 0.1] {
        let m = measure(lib(GroupSpectrum::torus(2))?, Exponent::Cauchy { sigma: 1.0 }, t)?;
        let direct = lib(density_at_identity(&m, &policy))?.value;
        let pv = lib(torus_cauchy_closed_form(2, 1.0, t, 400))?.value;
        let rel = (pv - direct).abs() / direct;
        ensure(rel <= 1e-9, || format!("t={t}: rel diff {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("max rel diff {worst:.2e}"))
}

fn sandwich() -> Outcome {
    let policy = TruncationPolicy::default();
    for t in [0.005, 0.05, 0.5] {
        let m = measure(GroupSpectrum::su2(), Exponent::Cauchy { sigma: 1.0 }, t)?;
        let k = lib(density_at_identity(&m, &policy))?;
        let s = lib(su2_cauchy_comparison_series(1.0, t))?;
        let slack = k.slack();
        let (lo, hi) = ((-t).exp() * s, t.exp() * s);
        ensure(k.certified && k.value - slack >= lo && k.value + slack <= hi, || {
            format!("t={t}: {lo} <= {} <= {hi} fails", k.value)
        })?;
    }
    Ok("e^{-t} S <= k_t(e) <= e^{t} S".into())
}

fn fit_check(spec: GroupSpectrum, e: Exponent, c_expect: f64, p_expect: f64) -> Outcome {
    let m = measure(spec, e, 1.0)?;
    let fit = lib(fit_identity_density(&m, DEFAULT_WINDOW, DEFAULT_SAMPLES, &TruncationPolicy::default()))?;
    let c_rel = (fit.c - c_expect).abs() / c_expect;
    ensure((fit.p - p_expect).abs() <= 0.05 && c_rel <= 0.05, || {
        format!("C={} (want {c_expect}), p={} (want {p_expect})", fit.c, fit.p)
    })?;
    Ok(format!("C={:.4} p={:.4}", fit.c, fit.p))
}

fn su2_cauchy_fit() -> Outcome {
    let mut parts = Vec::new();
    for sigma in [0.5, 1.0, 2.0] {
        let d = fit_check(GroupSpectrum::su2(), Exponent::Cauchy { sigma }, 2.0 / sigma.powi(3), 3.0)
            .map_err(|e| format!("sigma={sigma}: {e}"))?;
        parts.push(format!("sigma={sigma}: {d}"));
    }
    Ok(parts.join("; "))
}

fn so3_cauchy_fit() -> Outcome {
    fit_check(GroupSpectrum::so3(), Exponent::Cauchy { sigma: 1.0 }, 8.0, 3.0)
}

fn heat_fit() -> Outcome {
    let d = fit_check(GroupSpectrum::su2(), heat_exponent(1.0), heat_amplitude(1.0), 1.5)?;
    let m = measure(GroupSpectrum::su2(), heat_exponent(1.0), 1e-3)?;
    let k = lib(density_at_identity(&m, &TruncationPolicy::default()))?.value;
    let amp = k * 1e-3f64.powf(1.5);
    let rel = (amp / heat_amplitude(1.0) - 1.0).abs();
    ensure(rel <= 0.05, || format!("amplitude at t=1e-3 off by {rel:e}"))?;
    Ok(format!("{d}; amplitude at 1e-3 within {rel:.2e}"))
}

fn relativistic_fit() -> Outcome {
    fit_check(GroupSpectrum::su2(), Exponent::Relativistic { mass: 1.0 }, 2.0, 3.0)
}

fn operator_algebra() -> Outcome {
    let spec = Arc::new(GroupSpectrum::su2());
    let e = Exponent::Cauchy { sigma: 1.0 };
    let coeffs: Vec<(Vec<i64>, Complex64)> = (0..12)
        .map(|n| (vec![n], Complex64::new(1.0 / (1.0 + n as f64), 0.5 - n as f64 / 24.0)))
        .collect();
    let f = lib(FourierFunction::class_function(spec.clone(), &coeffs))?;
    let coord = lib(FourierFunction::coordinate(spec.clone(), &[3], 1, 2))?;

    let (s, t) = (0.3, 0.7);
    for n in 0..200u64 {
        let r = lib(spec.irrep(&[n as i64]))?;
        let alpha = e.symbol_alpha(r.casimir);
        let ms = measure(GroupSpectrum::su2(), e.clone(), s)?;
        let lhs = ms.coefficient(&r) * lib(ms.at_time(t))?.coefficient(&r);
        let rhs = lib(ms.at_time(s + t))?.coefficient(&r);
        let tol = 1e-15 * ((s + t) * alpha).abs().max(1.0);
        ensure((lhs - rhs).abs() <= tol * rhs, || format!("semigroup law fails at n={n}"))?;
    }

    let (l1, l2) = (0.5, 2.5);
    let r1 = lib(apply_resolvent(&e, l1, &f))?;
    let r2 = lib(apply_resolvent(&e, l2, &f))?;
    let r12 = lib(apply_resolvent(&e, l1, &r2))?;
    for ((_, a), ((_, b), (_, c))) in r1.blocks().zip(r2.blocks().zip(r12.blocks())) {
        for i in 0..a.data.len() {
            let lhs = a.data[i] - b.data[i];
            let rhs = c.data[i] * (l2 - l1);
            ensure((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300), || "resolvent identity fails".into())?;
        }
    }

    let h = 1e-6;
    let mh = measure(GroupSpectrum::su2(), e.clone(), h)?;
    let th = lib(apply_semigroup(&mh, &f))?;
    let fd = lib(th.combine(1.0 / h, &f, -1.0 / h))?;
    let gen = apply_generator(&e, &f);
    for ((_, a), (_, b)) in fd.blocks().zip(gen.blocks()) {
        for i in 0..a.data.len() {
            let rel = (a.data[i] - b.data[i]).norm() / b.data[i].norm().max(1e-300);
            ensure(b.data[i].norm() == 0.0 || rel <= 1e-4, || format!("finite difference off by {rel:e}"))?;
        }
    }

    let mt = measure(GroupSpectrum::su2(), e.clone(), t)?;
    let r3 = lib(spec.irrep(&[3]))?;
    let chi = lib(FourierFunction::character(spec.clone(), &[3]))?;
    let tchi = lib(apply_semigroup(&mt, &chi))?;
    let want = chi.map_symbol(|_| mt.coefficient(&r3));
    ensure(tchi == want, || "character eigenrelation fails".into())?;
    let acoord = apply_generator(&e, &coord);
    let alpha = e.symbol_alpha(r3.casimir);
    for (_, b) in acoord.blocks() {
        for i in 0..b.dim {
            for j in 0..b.dim {
                let expect = if (i, j) == (2, 1) { alpha * 0.25 } else { 0.0 };
                ensure(b.get(i, j) == Complex64::new(expect, 0.0), || {
                    "matrix-coefficient eigenrelation fails".into()
                })?;
            }
        }
    }
    Ok("semigroup, resolvent, generator and eigenrelations verified".into())
}

fn plancherel() -> Outcome {
    let mut parts = Vec::new();
    for e in [heat_exponent(1.0), Exponent::Cauchy { sigma: 1.0 }] {
        let m = measure(GroupSpectrum::su2(), e.clone(), 0.5)?;
        let p = lib(plancherel_product(&m, &m, &TruncationPolicy::default()))?.value;
        let q = lib(weyl_inner_product(&m, &m, 96))?;
        let rel = (p - q).abs() / p;
        ensure(rel <= 1e-6, || format!("{e}: plancherel {p} vs quadrature {q}"))?;
        parts.push(format!("{}: {rel:.1e}", e.family_name()));
    }
    Ok(parts.join("; "))
}

fn trace_inequality() -> Outcome {
    let policy = TruncationPolicy::default();
    for e in [heat_exponent(1.0), Exponent::Cauchy { sigma: 1.0 }] {
        for t in [0.1, 1.0] {
            for spec in [GroupSpectrum::su2(), GroupSpectrum::so3()] {
                let name = spec.kind().to_string();
                let m = measure(spec, e.clone(), t)?;
                let full = lib(trace_full(&m, &policy))?;
                let central = lib(trace_central(&m, &policy))?;
                ensure(full.value - full.slack() > central.value + central.slack(), || {
                    format!("{name} {e} t={t}: {} !> {}", full.value, central.value)
                })?;
            }
            let m = measure(lib(GroupSpectrum::torus(1))?, e.clone(), t)?;
            let full = lib(trace_full(&m, &policy))?.value;
            let central = lib(trace_central(&m, &policy))?.value;
            ensure((full - central).abs() <= 1e-14 * central, || format!("torus {e} t={t}: {full} != {central}"))?;
        }
    }
    let m = measure(GroupSpectrum::su2(), heat_exponent(1.0), 1.0)?;
    let avg = lib(conjugation_average(&m, 24))?;
    let central = lib(trace_central(&m, &policy))?.value;
    let rel = (avg - central).abs() / central;
    ensure(rel <= 1e-5, || format!("conjugation average {avg} vs trace {central}"))?;
    Ok(format!("strict on su2/so3, equal on torus; conjugation average within {rel:.1e}"))
}

fn regularity() -> Outcome {
    let lap = Exponent::Laplace { beta: 1.0 };
    for spec in [GroupSpectrum::su2(), GroupSpectrum::so3()] {
        let m = measure(spec, lap.clone(), 1.0)?;
        let (v, w) = lib(decide_regularity(&m, Level::L2))?;
        ensure(v == Verdict::Holds, || format!("laplace L2 on {}: {v} ({w})", m.spectrum().kind()))?;
    }
    let su3 = lib(load_spectrum(SU3_FIXTURE.as_bytes(), None))?;
    let m = measure(su3, lap, 1.0)?;
    let (v, w) = lib(decide_regularity(&m, Level::L2))?;
    ensure(v == Verdict::Fails, || format!("laplace L2 on su3: {v} ({w})"))?;
    let families = [
        Exponent::Stable { b: 1.0, alpha: 1.5 },
        Exponent::Gaussian { variance: 1.0 },
        Exponent::Cauchy { sigma: 1.0 },
        Exponent::Relativistic { mass: 1.0 },
    ];
    let builtins = || -> Result<Vec<GroupSpectrum>> {
        Ok(vec![
            GroupSpectrum::torus(1)?,
            GroupSpectrum::torus(2)?,
            GroupSpectrum::torus(3)?,
            GroupSpectrum::su2(),
            GroupSpectrum::so3(),
        ])
    };
    for spec in lib(builtins())? {
        for e in &families {
            let m = measure(spec.clone(), e.clone(), 0.5)?;
            for k in 0..=10 {
                let (v, _) = lib(decide_regularity(&m, Level::Ck(k)))?;
                ensure(v == Verdict::Holds, || format!("{e} C{k} on {}: {v}", spec.kind()))?;
            }
        }
    }
    Ok("laplace L2 holds on su2/so3, fails on su3; exponential types hold up to C10".into())
}

fn normalization_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for e in [heat_exponent(1.0), Exponent::Cauchy { sigma: 1.0 }] {
        for spec in [GroupSpectrum::su2(), GroupSpectrum::so3()] {
            let name = spec.kind().to_string();
            let m = measure(spec, e.clone(), 0.5)?;
            let z = lib(normalization(&m, 96))?;
            ensure((z - 1.0).abs() <= 1e-8, || format!("{name} {e}: integral {z}"))?;
            worst = worst.max((z - 1.0).abs());
        }
    }
    Ok(format!("max |integral - 1| = {worst:.1e}"))
}

fn karamata() -> Outcome {
    let e = Exponent::Cauchy { sigma: 1.0 };
    let m = measure(GroupSpectrum::su2(), e.clone(), 1.0)?;
    let fit = lib(fit_identity_density(&m, DEFAULT_WINDOW, DEFAULT_SAMPLES, &TruncationPolicy::default()))?;
    let r = lib(karamata_check(&e, &GroupSpectrum::su2(), fit.c, &doubling_grid(400.0, 6)))?;
    ensure(r.converged, || format!("ratios {:?} vs C={}", r.ratios, fit.c))?;
    let last = r.ratios.last().copied().unwrap_or(f64::NAN);
    Ok(format!("N(400) Gamma(4)/400^3 = {last:.4}, fitted C = {:.4}", fit.c))
}
