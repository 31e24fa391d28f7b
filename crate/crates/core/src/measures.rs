//! Central measures `μ_t` with coefficients `c_π(t) = e^{t α_π}` and the
//! regularity classification of their densities.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{sum_range, Execution};
use crate::exponents::{DecayClass, Exponent};
use crate::kernel::TruncationPolicy;
use crate::series::{self, logarithmic_converges};
use crate::spectrum::{Cutoff, GroupKind, GroupSpectrum, IrrepDatum};
use crate::tail::SeriesShape;

/// A spectrum, an exponent and a time.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralMeasure {
    spectrum: Arc<GroupSpectrum>,
    exponent: Exponent,
    t: f64,
}

impl CentralMeasure {
    pub fn new(spectrum: Arc<GroupSpectrum>, exponent: Exponent, t: f64) -> Result<Self> {
        exponent.validate()?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
        }
        Ok(Self { spectrum, exponent, t })
    }

    pub fn spectrum(&self) -> &GroupSpectrum {
        &self.spectrum
    }

    pub fn spectrum_arc(&self) -> &Arc<GroupSpectrum> {
        &self.spectrum
    }

    pub fn exponent(&self) -> &Exponent {
        &self.exponent
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Same spectrum and exponent at another time.
    pub fn at_time(&self, t: f64) -> Result<Self> {
        Self::new(self.spectrum.clone(), self.exponent.clone(), t)
    }

    pub fn coefficient(&self, irrep: &IrrepDatum) -> f64 {
        self.coefficient_at(irrep.casimir)
    }

    /// `e^{-t η(√κ)}` for a Casimir value.
    pub fn coefficient_at(&self, casimir: f64) -> f64 {
        (self.t * self.exponent.symbol_alpha(casimir)).exp()
    }

    /// Whether two measures share spectrum and exponent.
    pub fn same_family(&self, other: &CentralMeasure) -> bool {
        (Arc::ptr_eq(&self.spectrum, &other.spectrum) || self.spectrum == other.spectrum)
            && self.exponent == other.exponent
    }
}

/// Regularity level of a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Level {
    L2,
    C0,
    Ck(u32),
}

impl Level {
    /// Smallest integer `p` with `p > k + dim/2`.
    pub fn sobolev_power(k: u32, group_dim: usize) -> u32 {
        k + (group_dim as u32) / 2 + 1
    }

    pub fn shape(&self, group_dim: usize) -> SeriesShape {
        match *self {
            Level::L2 => SeriesShape::SQUARE,
            Level::C0 => SeriesShape::FULL,
            Level::Ck(k) => SeriesShape::sobolev(Self::sobolev_power(k, group_dim)),
        }
    }

    pub fn criterion(&self, group_dim: usize) -> String {
        match *self {
            Level::L2 => "sum d^2 |c|^2 < inf (square-integrable density)".to_string(),
            Level::C0 => "sum d^2 |c| < inf (continuous density)".to_string(),
            Level::Ck(k) => format!(
                "sum d^2 (1+kappa)^{p} |c|^2 < inf with p = {p} > k + dim/2 (C^{k} density)",
                p = Self::sobolev_power(k, group_dim)
            ),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::L2 => f.write_str("L2"),
            Level::C0 => f.write_str("C0"),
            Level::Ck(k) => write!(f, "C{k}"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_uppercase().as_str() {
            "L2" => Ok(Level::L2),
            "C0" => Ok(Level::C0),
            other => other
                .strip_prefix('C')
                .map(|k| k.trim_start_matches('^'))
                .and_then(|k| k.parse().ok())
                .map(Level::Ck)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown regularity level `{s}`"))),
        }
    }
}

impl From<Level> for String {
    fn from(l: Level) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for Level {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub level: Level,
    pub verdict: Verdict,
    pub criterion: String,
    /// How the verdict was reached.
    pub witness: String,
    pub partial_sum: f64,
    pub terms_used: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_bound: Option<f64>,
}

impl RegularityVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

pub fn classify_regularity(m: &CentralMeasure, level: Level) -> Result<RegularityVerdict> {
    classify_regularity_with(m, level, &TruncationPolicy::default())
}

pub fn classify_regularity_with(
    m: &CentralMeasure,
    level: Level,
    policy: &TruncationPolicy,
) -> Result<RegularityVerdict> {
    if m.t() == 0.0 {
        return Err(Error::PointMass);
    }
    let spec = m.spectrum();
    let shape = level.shape(spec.dim());
    let (verdict, witness) = decide_regularity(m, level)?;
    let plan = series::plan(m, shape, m.t(), policy);
    let (partial_sum, terms_used) = series::radial_sum(spec, policy.execution, plan.cutoff, |d, k| {
        shape.term(d, k, m.coefficient_at(k))
    });
    Ok(RegularityVerdict {
        level,
        verdict,
        criterion: level.criterion(spec.dim()),
        witness,
        partial_sum,
        terms_used,
        tail_bound: plan.tail_bound,
    })
}

/// Verdict and witness for a level, without computing partial sums.
pub fn decide_regularity(m: &CentralMeasure, level: Level) -> Result<(Verdict, String)> {
    if m.t() == 0.0 {
        return Err(Error::PointMass);
    }
    let spec = m.spectrum();
    let shape = level.shape(spec.dim());
    let builtin = spec.is_builtin();
    Ok(match m.exponent().decay_class() {
        DecayClass::ExponentialType { gamma, scale, offset, .. } => (
            Verdict::Holds,
            format!(
                "eta(u) >= {scale}*u^{gamma} - {offset}; the comparison series \
                 sum_j j^m (2 sqrt(j)+1)^r (1+j)^p exp(-c j^(gamma/2)) converges"
            ),
        ),
        DecayClass::Bounded { sup } => (
            Verdict::Fails,
            format!(
                "eta <= {sup}, so c_pi >= exp(-{sup} t) and the terms d^2 c^2 do not tend to 0 \
                 (no square-integrable density)"
            ),
        ),
        DecayClass::Logarithmic { beta } => {
            let l2 = SeriesShape::SQUARE;
            // C0 also follows from the C^0 Sobolev series by embedding
            let converges = logarithmic_converges(spec, shape, m.t())
                || (level == Level::C0
                    && logarithmic_converges(spec, Level::Ck(0).shape(spec.dim()), m.t()));
            let bound_text = |sh: SeriesShape| {
                format!(
                    "c = (1+{beta}^2 kappa)^(-t): terms ~ |lambda|^({a}m + 2p - 2qt) with m = {m}, \
                     p = {p}, q = {q}, t = {t}, rank {r}",
                    a = sh.dim_power,
                    m = spec.m(),
                    p = sh.sobolev_power,
                    q = sh.coeff_power,
                    t = m.t(),
                    r = spec.rank()
                )
            };
            if converges {
                (Verdict::Holds, format!("{}; exponent < -rank", bound_text(shape)))
            } else if builtin && !logarithmic_converges(spec, l2, m.t()) {
                (
                    Verdict::Fails,
                    format!(
                        "{}; exponent >= -rank so the square series diverges by limit comparison",
                        bound_text(l2)
                    ),
                )
            } else if !builtin {
                match table_term_test(m) {
                    Some(min_term) => (
                        Verdict::Fails,
                        format!(
                            "term test: d^2 c^2 >= {min_term} over the upper half of the table, \
                             terms do not tend to 0"
                        ),
                    ),
                    None => (
                        Verdict::Undetermined,
                        format!("{}; sufficient condition not met", bound_text(shape)),
                    ),
                }
            } else {
                (
                    Verdict::Undetermined,
                    format!(
                        "{}; the criterion is only sufficient at this level",
                        bound_text(shape)
                    ),
                )
            }
        }
    })
}

/// Minimum of `d² c²` over the upper half (by Casimir) of a tabulated
/// spectrum, when that minimum is at least one.
fn table_term_test(m: &CentralMeasure) -> Option<f64> {
    let rows = m.spectrum().table();
    let upper = &rows[rows.len() / 2..];
    if upper.len() < 2 {
        return None;
    }
    let min = upper
        .iter()
        .map(|r| SeriesShape::SQUARE.term(r.dim, r.casimir, m.coefficient(r)))
        .fold(f64::INFINITY, f64::min);
    (min >= 1.0).then_some(min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaVerdict {
    Converges,
    Diverges,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub partial_sum: f64,
    pub terms_used: u64,
    pub verdict: ZetaVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_bound: Option<f64>,
}

/// Partial sums of `Σ_{λ ≠ 0} ⟨λ, λ⟩^{-s}`.
///
/// `⟨λ, λ⟩` is recovered from the Casimir value as
/// `(√(κ + |ρ|²) − |ρ|)²`, which is exact for rank one and for tori and lies
/// between `κ − 2|ρ||λ|` and `κ` in general.
pub fn sugiura_zeta(spectrum: &GroupSpectrum, s: f64, cutoff: Cutoff) -> Result<ZetaReport> {
    let irreps = spectrum.enumerate(cutoff)?.irreps;
    let rho = spectrum.rho_sq().sqrt();
    let nontrivial: Vec<f64> = irreps
        .iter()
        .filter(|r| !r.is_trivial())
        .map(|r| ((r.casimir + rho * rho).sqrt() - rho).powi(2))
        .collect();
    let verdict = if s > 0.0 && 2.0 * s > spectrum.rank() as f64 {
        ZetaVerdict::Converges
    } else {
        ZetaVerdict::Diverges
    };
    let partial_sum = sum_range(Execution::default(), 0, nontrivial.len() as u64, |i| {
        nontrivial
            .get(i as usize)
            .map_or(0.0, |&l2| l2.powf(-s))
    });
    // |λ| = n exactly for SU(2) and SO(3); integral comparison beyond the last label
    let tail_bound = match spectrum.kind() {
        GroupKind::Su2 | GroupKind::So3 if verdict == ZetaVerdict::Converges => {
            let last = nontrivial.len() as f64;
            (last > 0.0).then(|| last.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0))
        }
        _ => None,
    };
    Ok(ZetaReport {
        partial_sum,
        terms_used: nontrivial.len() as u64,
        verdict,
        tail_bound,
    })
}
