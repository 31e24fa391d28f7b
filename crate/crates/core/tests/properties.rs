use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

use liecid::asymptotics::{eigenvalue_counting, su2_cauchy_comparison_series, torus_cauchy_closed_form};
use liecid::kernel::{density_at, density_at_identity, trace_central, trace_full};
use liecid::measures::{decide_regularity, Level, Verdict};
use liecid::operators::{apply_generator, apply_resolvent, apply_semigroup, sobolev_norm};
use liecid::spectrum::Quaternion;
use liecid::{
    Atom, CentralMeasure, ClassPoint, Cutoff, Error, Exponent, FourierFunction, GroupElement, GroupSpectrum,
    TruncationPolicy,
};

fn builtin() -> impl Strategy<Value = GroupSpectrum> {
    prop_oneof![
        (1usize..=3).prop_map(|d| GroupSpectrum::torus(d).unwrap()),
        Just(GroupSpectrum::su2()),
        Just(GroupSpectrum::so3()),
    ]
}

fn exponential_type() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (0.1f64..3.0).prop_map(|variance| Exponent::Gaussian { variance }),
        (0.1f64..3.0).prop_map(|sigma| Exponent::Cauchy { sigma }),
        (0.1f64..2.0, 0.3f64..2.0).prop_map(|(b, alpha)| Exponent::Stable { b, alpha }),
        (0.0f64..3.0).prop_map(|mass| Exponent::Relativistic { mass }),
    ]
}

fn any_exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        exponential_type(),
        (0.1f64..3.0).prop_map(|beta| Exponent::Laplace { beta }),
        (0.1f64..3.0, 0.1f64..5.0).prop_map(|(rate, position)| {
            Exponent::CompoundPoisson {
                rate,
                atoms: vec![Atom { position, weight: 1.0 }],
            }
        }),
    ]
}

fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
        .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z).normalized())
}

fn class_function(spec: Arc<GroupSpectrum>, n: usize) -> impl Strategy<Value = FourierFunction> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..n).prop_map(move |cs| {
        let coeffs: Vec<(Vec<i64>, Complex64)> = cs
            .into_iter()
            .enumerate()
            .map(|(i, (re, im))| (vec![i as i64], Complex64::new(re, im)))
            .collect();
        FourierFunction::class_function(spec.clone(), &coeffs).unwrap()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn characters_at_identity_equal_dimension() {
    for spec in [
        GroupSpectrum::torus(1).unwrap(),
        GroupSpectrum::torus(3).unwrap(),
        GroupSpectrum::su2(),
        GroupSpectrum::so3(),
    ] {
        let id = ClassPoint::identity(spec.kind());
        for r in spec.enumerate(Cutoff::MaxCount(300)).unwrap().irreps {
            let chi = spec.character(&r, &id).unwrap();
            assert!((chi.re - r.dim as f64).abs() <= 1e-12 * r.dim as f64 && chi.im.abs() < 1e-12);
        }
    }
}

#[test]
fn dimension_bound_constant() {
    // d ≤ N (1 + √κ)^m with m = 1 on SU(2) and SO(3)
    for spec in [GroupSpectrum::su2(), GroupSpectrum::so3()] {
        let n = spec
            .enumerate(Cutoff::MaxCount(10_000))
            .unwrap()
            .irreps
            .iter()
            .map(|r| r.dim as f64 / (1.0 + r.casimir.sqrt()))
            .fold(0.0, f64::max);
        assert!(n.is_finite() && n <= 2.0, "{n}");
    }
}

#[test]
fn su2_character_orthogonality() {
    let rule = liecid::quadrature::IntervalRule::gauss_legendre(256, 0.0, PI).unwrap();
    for m in 0..=20u64 {
        for n in 0..=20u64 {
            let v = rule.integrate(|th| {
                liecid::spectrum::su2_character(m, th)
                    * liecid::spectrum::su2_character(n, th)
                    * (2.0 / PI)
                    * th.sin().powi(2)
            });
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10, "m={m} n={n} {v}");
        }
    }
}

#[test]
fn eta_symmetric_nonnegative() {
    let families = [
        Exponent::Gaussian { variance: 1.3 },
        Exponent::Laplace { beta: 0.7 },
        Exponent::Stable { b: 1.2, alpha: 0.8 },
        Exponent::Cauchy { sigma: 2.0 },
        Exponent::Relativistic { mass: 0.5 },
        Exponent::CompoundPoisson {
            rate: 1.0,
            atoms: vec![Atom { position: 0.3, weight: 1.0 }],
        },
        Exponent::LevyKhintchine {
            variance: 0.2,
            atoms: vec![Atom { position: -1.0, weight: 0.5 }],
        },
    ];
    for e in &families {
        for i in 0..10_000 {
            let u = -50.0 + i as f64 * 0.01;
            let a = e.eta(u);
            assert!(a >= 0.0 && a == e.eta(-u), "{e} u={u}");
        }
    }
}

#[test]
fn subordination_forms() {
    let (beta, b, alpha, mass) = (1.7, 0.6, 1.3, 2.5);
    for i in 0..=200 {
        let u = i as f64 * 0.5;
        let lap = Exponent::Laplace { beta }.eta(u.sqrt());
        assert!((lap - (1.0 + beta * beta * u).ln()).abs() <= 1e-12 * lap.max(1.0));
        let st = Exponent::Stable { b, alpha }.eta(u.sqrt());
        let want = b.powf(alpha) * u.powf(alpha / 2.0);
        assert!((st - want).abs() <= 1e-12 * want.max(1.0));
        let rl = Exponent::Relativistic { mass }.eta(u.sqrt());
        let want = (u + mass * mass).sqrt() - mass;
        assert!((rl - want).abs() <= 1e-12 * want.max(1.0));
    }
}

#[test]
fn sandwich_at_other_times() {
    let spec = Arc::new(GroupSpectrum::su2());
    for t in [0.01, 0.1, 1.0] {
        let m = CentralMeasure::new(spec.clone(), Exponent::Cauchy { sigma: 1.0 }, t).unwrap();
        let k = density_at_identity(&m, &TruncationPolicy::default()).unwrap();
        let s = su2_cauchy_comparison_series(1.0, t).unwrap();
        let slack = k.tail_bound.unwrap();
        assert!((-t).exp() * s <= k.value - slack && k.value + slack <= t.exp() * s);
    }
}

#[test]
fn positivity_at_random_points() {
    let spec = Arc::new(GroupSpectrum::su2());
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for e in [Exponent::Gaussian { variance: 0.25 }, Exponent::Cauchy { sigma: 1.0 }] {
        let m = CentralMeasure::new(spec.clone(), e, 0.05).unwrap();
        let ev = liecid::kernel::DensityEvaluator::new(&m, &TruncationPolicy::default()).unwrap();
        for _ in 0..1000 {
            let th = (0.0f64..=PI).new_tree(&mut runner).unwrap().current();
            let v = ev.eval(&ClassPoint::angle(th)).unwrap();
            // truncation slack plus summation rounding, bounded by ε Σ d² c = ε k_t(e)
            let rounding = 64.0 * f64::EPSILON * ev.at_identity().value;
            assert!(v.value >= -v.tail_bound.unwrap() - rounding, "theta={th} {v:?}");
        }
    }
}

#[test]
fn coth_identity_over_range() {
    for i in 0..=100 {
        let t = 0.01 * 1000f64.powf(i as f64 / 100.0);
        let q = (-2.0 * PI * t).exp();
        let series = 1.0 + 2.0 * q / (1.0 - q);
        let v = torus_cauchy_closed_form(1, 1.0, t, 0).unwrap().value;
        assert!(rel(v, series) <= 1e-14, "t={t}");
    }
}

#[test]
fn poisson_cross_check_d2_d3() {
    // values reach ~1e4 at t = 0.005, so an absolute 1e-7 budget is ample
    let policy = TruncationPolicy::new(1e-7, 50_000_000).unwrap();
    for (d, times, radius) in [(2usize, vec![0.005, 0.05, 1.0], 400u64), (3, vec![0.05, 0.2, 1.0], 120)] {
        let spec = Arc::new(GroupSpectrum::torus(d).unwrap());
        for t in times {
            let m = CentralMeasure::new(spec.clone(), Exponent::Cauchy { sigma: 1.0 }, t).unwrap();
            let direct = density_at_identity(&m, &policy).unwrap();
            let p = torus_cauchy_closed_form(d, 1.0, t, radius).unwrap();
            assert!(direct.certified);
            assert!(rel(p.value, direct.value) <= 1e-9, "d={d} t={t} {} {}", p.value, direct.value);
        }
    }
}

#[test]
fn counting_matches_brute_force() {
    let e = Exponent::Stable { b: 1.0, alpha: 1.5 };
    let grid: Vec<f64> = (0..40).map(|i| i as f64 * 2.5).collect();
    for spec in [GroupSpectrum::su2(), GroupSpectrum::so3(), GroupSpectrum::torus(2).unwrap()] {
        let n = eigenvalue_counting(&e, &spec, &grid).unwrap();
        let irreps = spec.enumerate(Cutoff::MaxCasimir(1e4)).unwrap().irreps;
        for (l, c) in grid.iter().zip(&n.counts) {
            let mut brute = 0u64;
            for r in &irreps {
                if r.casimir.sqrt().powf(1.5) <= *l {
                    brute += r.dim * r.dim;
                }
            }
            assert_eq!(*c, brute, "lambda={l}");
        }
        assert!(n.counts.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_preserves_class(g in unit_quaternion(), h in unit_quaternion(), so3 in any::<bool>()) {
        let wrap = |q| if so3 { GroupElement::so3(q).unwrap() } else { GroupElement::su2(q).unwrap() };
        let (g, h) = (wrap(g), wrap(h));
        let c = g.multiply(&h).unwrap().multiply(&g.invert()).unwrap();
        let a = c.class_of().coords[0];
        let b = h.class_of().coords[0];
        prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn growth_bound_certifies(e in any_exponent(), u in 0.0f64..5000.0) {
        let k = e.growth_bound();
        prop_assert!(e.eta(u) <= k * (1.0 + u * u));
    }

    #[test]
    fn relativistic_within_mass_of_cauchy(mass in 0.0f64..5.0, u in -1e4f64..1e4) {
        let r = Exponent::Relativistic { mass }.eta(u);
        let c = Exponent::Cauchy { sigma: 1.0 }.eta(u);
        prop_assert!((r - c).abs() <= mass + 1e-12);
    }

    #[test]
    fn coefficient_semigroup_law(
        spec in builtin(),
        e in any_exponent(),
        s in 0.0f64..3.0,
        t in 0.0f64..3.0,
        k in 0usize..200,
    ) {
        let spec = Arc::new(spec);
        let r = spec.enumerate(Cutoff::MaxCount(k + 1)).unwrap().irreps.pop().unwrap();
        let ms = CentralMeasure::new(spec, e.clone(), s).unwrap();
        let lhs = ms.coefficient(&r) * ms.at_time(t).unwrap().coefficient(&r);
        let rhs = ms.at_time(s + t).unwrap().coefficient(&r);
        // exp of a product carries the relative error of its argument
        let scale = ((s + t) * e.symbol_alpha(r.casimir)).abs().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 2e-15 * scale * rhs, "{lhs} {rhs}");
    }

    #[test]
    fn coefficients_are_monotone(spec in builtin(), e in any_exponent(), t in 0.01f64..2.0, dt in 0.01f64..1.0) {
        let spec = Arc::new(spec);
        let irreps = spec.enumerate(Cutoff::MaxCount(60)).unwrap().irreps;
        let m = CentralMeasure::new(spec, e.clone(), t).unwrap();
        let later = m.at_time(t + dt).unwrap();
        for r in irreps.iter().filter(|r| r.casimir > 0.0 && e.eta(r.casimir.sqrt()) > 0.0) {
            let (a, b) = (later.coefficient(r), m.coefficient(r));
            // both sides may underflow to zero deep in the spectrum
            prop_assert!(a < b || b == 0.0, "{a} {b}");
        }
        if e.is_monotone() {
            for w in irreps.windows(2) {
                prop_assert!(m.coefficient(&w[1]) <= m.coefficient(&w[0]));
            }
        }
    }

    #[test]
    fn regularity_levels_are_monotone(spec in builtin(), e in any_exponent(), t in 0.05f64..4.0, k in 0u32..8) {
        let m = CentralMeasure::new(Arc::new(spec), e, t).unwrap();
        let (ck, _) = decide_regularity(&m, Level::Ck(k)).unwrap();
        let (c0, _) = decide_regularity(&m, Level::C0).unwrap();
        let (l2, _) = decide_regularity(&m, Level::L2).unwrap();
        if ck == Verdict::Holds {
            prop_assert_eq!(c0, Verdict::Holds);
        }
        if c0 == Verdict::Holds {
            prop_assert_eq!(l2, Verdict::Holds);
        }
        if l2 == Verdict::Fails {
            let r = density_at(&m, &ClassPoint::angle(0.3).clone(), &TruncationPolicy::default());
            if m.spectrum().kind() != liecid::GroupKind::Torus(1)
                && m.spectrum().kind() != liecid::GroupKind::Torus(2)
                && m.spectrum().kind() != liecid::GroupKind::Torus(3)
            {
                prop_assert!(matches!(r, Err(Error::Refused { .. })), "{r:?}");
            }
        }
    }

    #[test]
    fn trace_full_dominates_central(spec in builtin(), e in exponential_type(), t in 0.05f64..2.0) {
        let is_torus = matches!(spec.kind(), liecid::GroupKind::Torus(_));
        let m = CentralMeasure::new(Arc::new(spec), e, t).unwrap();
        let p = TruncationPolicy::default();
        let full = trace_full(&m, &p).unwrap();
        let central = trace_central(&m, &p).unwrap();
        if is_torus {
            prop_assert!(rel(full.value, central.value) <= 1e-14);
        } else {
            prop_assert!(full.value > central.value);
        }
    }

    #[test]
    fn operator_semigroup_law(f in class_function(Arc::new(GroupSpectrum::so3()), 30), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let spec = Arc::new(GroupSpectrum::so3());
        let e = Exponent::Cauchy { sigma: 0.8 };
        let ms = CentralMeasure::new(spec.clone(), e.clone(), s).unwrap();
        let two = apply_semigroup(&ms.at_time(t).unwrap(), &apply_semigroup(&ms, &f).unwrap()).unwrap();
        let one = apply_semigroup(&ms.at_time(s + t).unwrap(), &f).unwrap();
        for ((r, a), (_, b)) in two.blocks().zip(one.blocks()) {
            let scale = ((s + t) * e.symbol_alpha(r.casimir)).abs().max(1.0);
            prop_assert!((a.data[0] - b.data[0]).norm() <= 4e-15 * scale * b.data[0].norm().max(1e-300));
        }
    }

    #[test]
    fn semigroup_contracts(f in class_function(Arc::new(GroupSpectrum::su2()), 30), t in 0.0f64..5.0) {
        let m = CentralMeasure::new(Arc::new(GroupSpectrum::su2()), Exponent::Stable { b: 1.0, alpha: 1.2 }, t).unwrap();
        let g = apply_semigroup(&m, &f).unwrap();
        prop_assert!(sobolev_norm(&g, 0).value <= sobolev_norm(&f, 0).value);
        prop_assert_eq!(g.class_flag(), f.class_flag());
    }

    #[test]
    fn generator_commutes_with_semigroup(f in class_function(Arc::new(GroupSpectrum::su2()), 30), t in 0.0f64..2.0) {
        let e = Exponent::Gaussian { variance: 0.7 };
        let m = CentralMeasure::new(Arc::new(GroupSpectrum::su2()), e.clone(), t).unwrap();
        let a = apply_generator(&e, &apply_semigroup(&m, &f).unwrap());
        let b = apply_semigroup(&m, &apply_generator(&e, &f)).unwrap();
        for ((_, x), (_, y)) in a.blocks().zip(b.blocks()) {
            // the two products differ only in rounding order
            prop_assert!((x.data[0] - y.data[0]).norm() <= 2.0 * f64::EPSILON * y.data[0].norm());
        }
    }

    #[test]
    fn resolvent_identities(f in class_function(Arc::new(GroupSpectrum::su2()), 30), l in 0.1f64..5.0, mu in 0.1f64..5.0) {
        let e = Exponent::Cauchy { sigma: 1.3 };
        let rl = apply_resolvent(&e, l, &f).unwrap();
        let rm = apply_resolvent(&e, mu, &f).unwrap();
        let rlm = apply_resolvent(&e, l, &rm).unwrap();
        for (((_, a), (_, b)), (_, c)) in rl.blocks().zip(rm.blocks()).zip(rlm.blocks()) {
            let lhs = a.data[0] - b.data[0];
            let rhs = c.data[0] * (mu - l);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * a.data[0].norm().max(b.data[0].norm()));
        }
        // R_λ (λ − 𝒜) f = f
        let g = f.combine(l, &apply_generator(&e, &f), -1.0).unwrap();
        let back = apply_resolvent(&e, l, &g).unwrap();
        for ((_, a), (_, b)) in back.blocks().zip(f.blocks()) {
            prop_assert!((a.data[0] - b.data[0]).norm() <= 1e-12 * b.data[0].norm().max(1.0));
        }
    }

    #[test]
    fn multipliers_are_real(f in class_function(Arc::new(GroupSpectrum::su2()), 10), t in 0.0f64..2.0) {
        let e = Exponent::Laplace { beta: 1.0 };
        let m = CentralMeasure::new(Arc::new(GroupSpectrum::su2()), e.clone(), t).unwrap();
        let g = apply_semigroup(&m, &f).unwrap();
        for ((_, a), (_, b)) in g.blocks().zip(f.blocks()) {
            let ratio = a.data[0] / b.data[0];
            prop_assert!(b.data[0].norm() == 0.0 || ratio.im.abs() <= 1e-15 * ratio.re.abs());
        }
    }

    #[test]
    fn eigencomponents_recombine(f in class_function(Arc::new(GroupSpectrum::su2()), 25), t in 0.0f64..2.0) {
        let m = CentralMeasure::new(Arc::new(GroupSpectrum::su2()), Exponent::Cauchy { sigma: 1.0 }, t).unwrap();
        let whole = apply_semigroup(&m, &f).unwrap();
        let mut acc: Option<FourierFunction> = None;
        for c in f.eigencomponents() {
            let (r, _) = c.blocks().next().unwrap();
            let image = apply_semigroup(&m, &c).unwrap();
            prop_assert_eq!(&image, &c.map_symbol(|_| m.coefficient(r)));
            acc = Some(match acc {
                None => image,
                Some(a) => a.combine(1.0, &image, 1.0).unwrap(),
            });
        }
        let acc = acc.unwrap();
        for ((_, a), (_, b)) in acc.blocks().zip(whole.blocks()) {
            prop_assert!((a.data[0] - b.data[0]).norm() <= 1e-14 * b.data[0].norm().max(1e-300));
        }
    }

    #[test]
    fn torus_elements_commute(a in prop::collection::vec(0.0f64..1.0, 2), b in prop::collection::vec(0.0f64..1.0, 2)) {
        let (g, h) = (GroupElement::torus(&a), GroupElement::torus(&b));
        let c = g.multiply(&h).unwrap().multiply(&g.invert()).unwrap().multiply(&h.invert()).unwrap();
        prop_assert!(c.approx_eq(&GroupElement::identity(g.kind()).unwrap(), 0.0));
    }
}
