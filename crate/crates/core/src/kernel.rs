//! Densities `k_t`, transition kernels, traces and quadrature identities.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, map_range, pairwise_sum, sum_range, sum_range_counted, Execution};
use crate::exponents::DecayClass;
use crate::lattice;
use crate::measures::{decide_regularity, CentralMeasure, Level, Verdict};
use crate::output::sig17;
use crate::quadrature::IntervalRule;
use crate::series::{self, logarithmic_converges, Plan};
use crate::spectrum::{
    so3_casimir, su2_casimir, torus_casimir, ClassPoint, GroupElement, GroupKind, GroupSpectrum,
    Quaternion,
};
use crate::tail::SeriesShape;

/// Truncation budget for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Absolute error budget for the discarded remainder.
    pub target_tail: f64,
    /// Safety cap on the number of series terms.
    pub hard_max_terms: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            target_tail: 1e-12,
            hard_max_terms: 10_000_000,
            execution: Execution::default(),
        }
    }
}

impl TruncationPolicy {
    pub fn new(target_tail: f64, hard_max_terms: u64) -> Result<Self> {
        let p = Self {
            target_tail,
            hard_max_terms,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_tail > 0.0 && self.target_tail.is_finite()) {
            return Err(Error::InvalidParameter("target tail must be positive".into()));
        }
        if self.hard_max_terms == 0 {
            return Err(Error::InvalidParameter("max terms must be positive".into()));
        }
        Ok(())
    }
}

/// A truncated series value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub terms_used: u64,
    /// Bound on the discarded remainder; `None` when uncertified.
    pub tail_bound: Option<f64>,
    /// `|value − exact| ≤ tail_bound ≤ target_tail` is guaranteed.
    pub certified: bool,
}

impl KernelValue {
    fn from_plan(value: f64, terms_used: u64, plan: &Plan) -> Self {
        Self {
            value,
            terms_used,
            tail_bound: plan.tail_bound,
            certified: plan.certified,
        }
    }

    /// Tail bound or `+∞`.
    pub fn slack(&self) -> f64 {
        self.tail_bound.unwrap_or(f64::INFINITY)
    }
}

/// Whether pointwise evaluation may bypass a missing continuity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Override {
    #[default]
    Checked,
    ForceUncertified,
}

fn admit(m: &CentralMeasure, off_identity: bool, ov: Override) -> Result<()> {
    if m.t() == 0.0 {
        return Err(Error::PointMass);
    }
    if off_identity && !m.spectrum().supports_characters() {
        return Err(Error::Capability(
            "tabulated spectra only provide characters at the identity".into(),
        ));
    }
    let (verdict, witness) = decide_regularity(m, Level::C0)?;
    if verdict == Verdict::Holds || ov == Override::ForceUncertified {
        return Ok(());
    }
    Err(Error::Refused {
        criterion: Level::C0.criterion(m.spectrum().dim()),
        verdict: format!("{verdict}: {witness}"),
    })
}

fn uncertify(mut v: KernelValue, m: &CentralMeasure) -> KernelValue {
    if decide_regularity(m, Level::C0).map(|(v, _)| v) != Ok(Verdict::Holds) {
        v.certified = false;
    }
    v
}

/// Prepared evaluator for `k_t` at class points; the truncation plan and the
/// weighted coefficients are computed once.
#[derive(Debug, Clone)]
pub struct DensityEvaluator {
    measure: CentralMeasure,
    plan: Plan,
    exec: Execution,
    identity: KernelValue,
    /// `d_n c_n` for SU(2)/SO(3) labels, `c` per squared norm for tori.
    weights: Vec<f64>,
}

impl DensityEvaluator {
    pub fn new(m: &CentralMeasure, policy: &TruncationPolicy) -> Result<Self> {
        Self::with_override(m, policy, Override::Checked)
    }

    pub fn with_override(m: &CentralMeasure, policy: &TruncationPolicy, ov: Override) -> Result<Self> {
        policy.validate()?;
        admit(m, false, ov)?;
        let plan = series::plan(m, SeriesShape::FULL, m.t(), policy);
        let identity = uncertify(full_series(m, &plan, policy.execution), m);
        let weights = match m.spectrum().kind() {
            GroupKind::Su2 => map_range(policy.execution, plan.cutoff + 1, |n| {
                (n + 1) as f64 * m.coefficient_at(su2_casimir(n))
            }),
            GroupKind::So3 => map_range(policy.execution, plan.cutoff + 1, |n| {
                (2 * n + 1) as f64 * m.coefficient_at(so3_casimir(n))
            }),
            GroupKind::Torus(_) => map_range(policy.execution, plan.cutoff + 1, |j| {
                m.coefficient_at(torus_casimir(j))
            }),
            GroupKind::Generic => Vec::new(),
        };
        Ok(Self {
            measure: m.clone(),
            plan,
            exec: policy.execution,
            identity,
            weights,
        })
    }

    pub fn measure(&self) -> &CentralMeasure {
        &self.measure
    }

    pub fn at_identity(&self) -> KernelValue {
        self.identity
    }

    pub fn eval(&self, point: &ClassPoint) -> Result<KernelValue> {
        let spec = self.measure.spectrum();
        spec.check_point(point)?;
        if point.is_identity() {
            return Ok(self.identity);
        }
        let j = self.plan.cutoff;
        let (value, terms) = match spec.kind() {
            GroupKind::Su2 => {
                let theta = point.coords[0];
                let s = theta.sin();
                let at_pi = theta == PI;
                let v = sum_range(self.exec, 0, j, |n| {
                    let d = (n + 1) as f64;
                    let chi = if at_pi {
                        if n % 2 == 0 { d } else { -d }
                    } else {
                        (d * theta).sin() / s
                    };
                    self.weights[n as usize] * chi
                });
                (v, j + 1)
            }
            GroupKind::So3 => {
                let phi = point.coords[0];
                let s = (0.5 * phi).sin();
                let v = sum_range(self.exec, 0, j, |n| {
                    self.weights[n as usize] * (((2 * n + 1) as f64) * 0.5 * phi).sin() / s
                });
                (v, j + 1)
            }
            GroupKind::Torus(d) => {
                let r = lattice::isqrt(j);
                let theta = &point.coords;
                sum_range_counted(self.exec, 0, 2 * r, |i| {
                    let first = i as i64 - r as i64;
                    let mut acc = 0.0;
                    let mut count = 0;
                    lattice::for_each_point(d, first, j, |n, norm_sq| {
                        let phase: f64 = n.iter().zip(theta).map(|(&k, &x)| k as f64 * x).sum();
                        acc += self.weights[norm_sq as usize] * (2.0 * PI * phase.rem_euclid(1.0)).cos();
                        count += 1;
                    });
                    (acc, count)
                })
            }
            GroupKind::Generic => unreachable!("admission rejects tabulated spectra off the identity"),
        };
        Ok(KernelValue {
            value,
            terms_used: terms,
            ..self.identity
        })
    }
}

fn full_series(m: &CentralMeasure, plan: &Plan, exec: Execution) -> KernelValue {
    let (value, terms) = series::radial_sum(m.spectrum(), exec, plan.cutoff, |d, k| {
        SeriesShape::FULL.term(d, k, m.coefficient_at(k))
    });
    KernelValue::from_plan(value, terms, plan)
}

/// `k_t` at a class point.
pub fn density_at(m: &CentralMeasure, point: &ClassPoint, policy: &TruncationPolicy) -> Result<KernelValue> {
    density_at_with(m, point, policy, Override::Checked)
}

pub fn density_at_with(
    m: &CentralMeasure,
    point: &ClassPoint,
    policy: &TruncationPolicy,
    ov: Override,
) -> Result<KernelValue> {
    m.spectrum().check_point(point)?;
    admit(m, !point.is_identity(), ov)?;
    DensityEvaluator::with_override(m, policy, ov)?.eval(point)
}

/// `k_t(e) = Σ d_π² c_π`; available for tabulated spectra too.
pub fn density_at_identity(m: &CentralMeasure, policy: &TruncationPolicy) -> Result<KernelValue> {
    density_at_identity_with(m, policy, Override::Checked)
}

pub fn density_at_identity_with(
    m: &CentralMeasure,
    policy: &TruncationPolicy,
    ov: Override,
) -> Result<KernelValue> {
    policy.validate()?;
    admit(m, false, ov)?;
    let plan = series::plan(m, SeriesShape::FULL, m.t(), policy);
    Ok(uncertify(full_series(m, &plan, policy.execution), m))
}

fn check_element_kind(spec: &GroupSpectrum, g: &GroupElement) -> Result<()> {
    if g.kind() != spec.kind() {
        return Err(Error::KindMismatch {
            expected: spec.kind().name(),
            found: g.kind().name(),
        });
    }
    Ok(())
}

/// `h_t(σ, ρ) = k_t(σ^{-1} ρ)`.
pub fn transition_kernel(
    m: &CentralMeasure,
    sigma: &GroupElement,
    rho: &GroupElement,
    policy: &TruncationPolicy,
) -> Result<KernelValue> {
    check_element_kind(m.spectrum(), sigma)?;
    check_element_kind(m.spectrum(), rho)?;
    let class = sigma.invert().multiply(rho)?.class_of();
    density_at(m, &class, policy)
}

fn trace_series(m: &CentralMeasure, shape: SeriesShape, policy: &TruncationPolicy) -> Result<KernelValue> {
    policy.validate()?;
    if m.t() == 0.0 {
        return Err(Error::PointMass);
    }
    match m.exponent().decay_class() {
        DecayClass::Bounded { sup } => {
            return Err(Error::DivergentTrace(format!(
                "eta is bounded by {sup}, so the coefficients do not tend to zero"
            )))
        }
        DecayClass::Logarithmic { .. } if !logarithmic_converges(m.spectrum(), shape, m.t()) => {
            return Err(Error::DivergentTrace(format!(
                "coefficients decay only polynomially and the series fails the lattice test at t = {}",
                m.t()
            )))
        }
        _ => {}
    }
    let plan = series::plan(m, shape, m.t(), policy);
    let (value, terms) = series::radial_sum(m.spectrum(), policy.execution, plan.cutoff, |d, k| {
        shape.term(d, k, m.coefficient_at(k))
    });
    Ok(KernelValue::from_plan(value, terms, &plan))
}

/// Trace of `T_t` on class functions, `Σ c_π`.
pub fn trace_central(m: &CentralMeasure, policy: &TruncationPolicy) -> Result<KernelValue> {
    trace_series(m, SeriesShape::CENTRAL, policy)
}

/// Trace of `T_t` on `L²(G)`, `Σ d_π² c_π`; same summation as
/// [`density_at_identity`].
pub fn trace_full(m: &CentralMeasure, policy: &TruncationPolicy) -> Result<KernelValue> {
    trace_series(m, SeriesShape::FULL, policy)
}

/// `∫_{fundamental domain} f(class) · weight` for a class function, by a
/// Gauss–Legendre product rule of the given order per coordinate.
pub fn weyl_integrate<F>(spec: &GroupSpectrum, order: usize, exec: Execution, f: F) -> Result<f64>
where
    F: Fn(&ClassPoint) -> Result<f64> + Sync + Send,
{
    let domain = spec.class_domain()?;
    let rules: Vec<IntervalRule> = domain
        .iter()
        .map(|&(a, b)| IntervalRule::gauss_legendre(order, a, b))
        .collect::<Result<_>>()?;
    let n = order.pow(domain.len() as u32) as u64;
    let terms = map_range(exec, n, |flat| -> Result<f64> {
        let mut rest = flat as usize;
        let mut coords = Vec::with_capacity(rules.len());
        let mut w = 1.0;
        for rule in &rules {
            let i = rest % order;
            rest /= order;
            coords.push(rule.nodes[i]);
            w *= rule.weights[i];
        }
        let p = ClassPoint::new(coords);
        Ok(w * spec.weyl_weight(&p)? * f(&p)?)
    });
    let terms: Vec<f64> = terms.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

/// `∫_G k_t`, which is 1 for every probability density.
pub fn normalization(m: &CentralMeasure, order: usize) -> Result<f64> {
    normalization_with(m, order, &TruncationPolicy::default())
}

pub fn normalization_with(m: &CentralMeasure, order: usize, policy: &TruncationPolicy) -> Result<f64> {
    admit(m, true, Override::Checked)?;
    let ev = DensityEvaluator::new(m, &policy.with_execution(Execution::Sequential))?;
    weyl_integrate(m.spectrum(), order, policy.execution, |p| Ok(ev.eval(p)?.value))
}

/// `⟨k_s, k_t⟩_{L²(G)}` by Weyl quadrature.
pub fn weyl_inner_product(m1: &CentralMeasure, m2: &CentralMeasure, order: usize) -> Result<f64> {
    if m1.spectrum() != m2.spectrum() {
        return Err(Error::SpectrumMismatch("inner product needs a common spectrum".into()));
    }
    admit(m1, true, Override::Checked)?;
    admit(m2, true, Override::Checked)?;
    let policy = TruncationPolicy::default().with_execution(Execution::Sequential);
    let e1 = DensityEvaluator::new(m1, &policy)?;
    let e2 = DensityEvaluator::new(m2, &policy)?;
    weyl_integrate(m1.spectrum(), order, Execution::default(), |p| {
        Ok(e1.eval(p)?.value * e2.eval(p)?.value)
    })
}

/// `Σ d_π² c_π(s) c_π(t)`, the Plancherel form of `⟨k_s, k_t⟩`.
pub fn plancherel_product(
    m1: &CentralMeasure,
    m2: &CentralMeasure,
    policy: &TruncationPolicy,
) -> Result<KernelValue> {
    policy.validate()?;
    if !m1.same_family(m2) {
        return Err(Error::SpectrumMismatch(
            "plancherel product needs the same spectrum and exponent".into(),
        ));
    }
    for m in [m1, m2] {
        let (verdict, witness) = decide_regularity(m, Level::L2)?;
        if verdict != Verdict::Holds {
            return Err(Error::Refused {
                criterion: Level::L2.criterion(m.spectrum().dim()),
                verdict: format!("{verdict}: {witness}"),
            });
        }
    }
    let joint = m1.at_time(m1.t() + m2.t())?;
    let plan = series::plan(&joint, SeriesShape::FULL, joint.t(), policy);
    let (value, terms) = series::radial_sum(m1.spectrum(), policy.execution, plan.cutoff, |d, k| {
        let dd = d as f64;
        dd * dd * m1.coefficient_at(k) * m2.coefficient_at(k)
    });
    Ok(KernelValue::from_plan(value, terms, &plan))
}

/// Numerical value of `∫_G ∫_G k_t(ρ^{-1} g ρ g^{-1}) dg dρ`.
///
/// The outer integral runs over classes of `g` with the Weyl weight. For
/// SU(2) and SO(3) the conjugator `ρ` is sampled on Hopf coordinates
/// `ρ = cos η (cos ξ₁ + sin ξ₁ k) + sin η (cos ξ₂ i + sin ξ₂ j)`, where Haar
/// measure is uniform in `cos 2η`; that coordinate gets a Gauss–Legendre rule
/// of the same order and each `ξ` a fixed two-point equispaced rule.
pub fn conjugation_average(m: &CentralMeasure, order: usize) -> Result<f64> {
    admit(m, true, Override::Checked)?;
    let spec = m.spectrum();
    let policy = TruncationPolicy::default().with_execution(Execution::Sequential);
    let ev = DensityEvaluator::new(m, &policy)?;
    let exec = Execution::default();
    match spec.kind() {
        GroupKind::Su2 | GroupKind::So3 => {
            let so3 = spec.kind() == GroupKind::So3;
            let u_rule = IntervalRule::gauss_legendre(order, -1.0, 1.0)?;
            let xis = [0.0, PI];
            let conjugators: Vec<(Quaternion, f64)> = u_rule
                .nodes
                .iter()
                .zip(&u_rule.weights)
                .flat_map(|(&u, &w)| {
                    let eta = 0.5 * u.clamp(-1.0, 1.0).acos();
                    xis.into_iter().flat_map(move |x1| {
                        xis.into_iter().map(move |x2| {
                            let q = Quaternion::new(
                                eta.cos() * x1.cos(),
                                eta.sin() * x2.cos(),
                                eta.sin() * x2.sin(),
                                eta.cos() * x1.sin(),
                            );
                            (q.normalized(), 0.5 * w / 4.0)
                        })
                    })
                })
                .collect();
            let wrap = |q: Quaternion| {
                if so3 {
                    GroupElement::So3(q)
                } else {
                    GroupElement::Su2(q)
                }
            };
            weyl_integrate(spec, order, exec, |class| {
                let angle = class.coords[0];
                let half = if so3 { 0.5 * angle } else { angle };
                let g = wrap(Quaternion::new(half.cos(), 0.0, 0.0, half.sin()));
                let g_inv = g.invert();
                let mut acc = 0.0;
                for (q, w) in &conjugators {
                    let rho = wrap(*q);
                    let comm = rho.invert().multiply(&g)?.multiply(&rho)?.multiply(&g_inv)?;
                    acc += w * ev.eval(&clamp_class(comm.class_of()))?.value;
                }
                Ok(acc)
            })
        }
        GroupKind::Torus(d) => {
            let rule = IntervalRule::gauss_legendre(order, 0.0, 1.0)?;
            let rhos: Vec<GroupElement> = rule.nodes.iter().map(|&x| GroupElement::torus(&vec![x; d])).collect();
            weyl_integrate(spec, order, exec, |class| {
                let g = GroupElement::torus(&class.coords);
                let g_inv = g.invert();
                let mut acc = 0.0;
                for (rho, w) in rhos.iter().zip(&rule.weights) {
                    let comm = rho.invert().multiply(&g)?.multiply(rho)?.multiply(&g_inv)?;
                    acc += w * ev.eval(&comm.class_of())?.value;
                }
                Ok(acc)
            })
        }
        GroupKind::Generic => unreachable!("admission rejects tabulated spectra"),
    }
}

fn clamp_class(mut p: ClassPoint) -> ClassPoint {
    for c in &mut p.coords {
        *c = c.clamp(0.0, PI);
    }
    p
}

/// `count` equispaced class points spanning the fundamental domain (a
/// product grid on tori).
pub fn class_grid(spec: &GroupSpectrum, count: usize) -> Result<Vec<ClassPoint>> {
    if count == 0 {
        return Err(Error::InvalidParameter("grid size must be positive".into()));
    }
    match spec.kind() {
        GroupKind::Su2 | GroupKind::So3 => Ok((0..count)
            .map(|i| {
                let x = if count == 1 { 0.0 } else { PI * i as f64 / (count - 1) as f64 };
                ClassPoint::angle(x)
            })
            .collect()),
        GroupKind::Torus(d) => {
            let total = count.pow(d as u32);
            Ok((0..total)
                .map(|flat| {
                    let mut rest = flat;
                    let coords = (0..d)
                        .map(|_| {
                            let i = rest % count;
                            rest /= count;
                            i as f64 / count as f64
                        })
                        .collect::<Vec<_>>();
                    ClassPoint::new(coords.into_iter().rev().collect())
                })
                .collect())
        }
        GroupKind::Generic => Ok(vec![ClassPoint::identity(GroupKind::Generic)]),
    }
}

/// One row of a kernel table.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    pub t: f64,
    pub point: ClassPoint,
    pub value: KernelValue,
}

/// Evaluates `k_t` over every `(t, point)` pair, rows ordered by `t` then by
/// point.
pub fn kernel_table(
    m: &CentralMeasure,
    times: &[f64],
    points: &[ClassPoint],
    policy: &TruncationPolicy,
    ov: Override,
) -> Result<Vec<KernelRow>> {
    let mut rows = Vec::with_capacity(times.len() * points.len());
    for &t in times {
        let mt = m.at_time(t)?;
        for p in points {
            mt.spectrum().check_point(p)?;
            admit(&mt, !p.is_identity(), ov)?;
        }
        let ev = DensityEvaluator::with_override(&mt, &policy.with_execution(Execution::Sequential), ov)?;
        let values = map_ordered(policy.execution, points, |p| ev.eval(p));
        for (p, v) in points.iter().zip(values) {
            rows.push(KernelRow {
                t,
                point: p.clone(),
                value: v?,
            });
        }
    }
    Ok(rows)
}

/// CSV `t,x1,..,xd,value,tail_bound,certified`.
pub fn write_kernel_csv<W: Write>(mut out: W, rows: &[KernelRow]) -> Result<()> {
    let dims = rows.first().map_or(1, |r| r.point.coords.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=dims).map(|i| format!("x{i}")));
    header.extend(["value", "tail_bound", "certified"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let mut fields = vec![sig17(r.t)];
        fields.extend(r.point.coords.iter().map(|&c| sig17(c)));
        fields.push(sig17(r.value.value));
        fields.push(r.value.tail_bound.map_or_else(|| "uncertified".to_string(), sig17));
        fields.push(r.value.certified.to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
