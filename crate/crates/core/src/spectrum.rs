//! Irreducible-representation spectra of compact groups.
//!
//! Built-in spectra are the tori `T^d`, `SU(2)` and `SO(3)`. Casimir
//! eigenvalues use the normalization
//!
//! | group  | irrep label     | `d_π`   | `κ_π`        |
//! |--------|-----------------|---------|--------------|
//! | `T^d`  | `n ∈ Z^d`       | 1       | `4π²|n|²`    |
//! | `SU(2)`| `n = 0, 1, ...` | `n + 1` | `n(n + 2)`   |
//! | `SO(3)`| `n = 0, 1, ...` | `2n + 1`| `n(n + 1)`   |
//!
//! Any other group can be supplied as a tabulated (generic) spectrum, which
//! only knows characters at the identity.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;

/// Below this value of `|sin θ|` characters are evaluated as Dirichlet sums.
pub const SINGULAR_SIN: f64 = 1e-4;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    Torus(usize),
    Su2,
    So3,
    Generic,
}

impl GroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::Torus(_) => "torus",
            GroupKind::Su2 => "su2",
            GroupKind::So3 => "so3",
            GroupKind::Generic => "generic",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Torus(d) => write!(f, "torus:{d}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Spectral data of one irreducible representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrepDatum {
    pub index: Vec<i64>,
    pub dim: u64,
    pub casimir: f64,
}

impl IrrepDatum {
    pub fn is_trivial(&self) -> bool {
        self.casimir == 0.0
    }

    /// Index tuple as semicolon-separated integers.
    pub fn label(&self) -> String {
        index_label(&self.index)
    }
}

pub fn index_label(index: &[i64]) -> String {
    index
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn parse_index_label(s: &str) -> Option<Vec<i64>> {
    s.split(';').map(|p| p.trim().parse().ok()).collect()
}

/// Enumeration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    MaxCasimir(f64),
    MaxCount(usize),
}

/// Result of [`GroupSpectrum::enumerate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub irreps: Vec<IrrepDatum>,
    /// Set when a tabulated spectrum ran out of rows before the cutoff.
    pub truncated: bool,
}

/// Coordinates of a conjugacy class in the fundamental domain of its group.
///
/// Torus: `θ ∈ [0,1)^d`; SU(2): `θ ∈ [0, π]` with the class of
/// `diag(e^{iθ}, e^{-iθ})`; SO(3): rotation angle `φ ∈ [0, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPoint {
    pub coords: Vec<f64>,
}

impl ClassPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn angle(theta: f64) -> Self {
        Self { coords: vec![theta] }
    }

    pub fn identity(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Torus(d) => Self { coords: vec![0.0; d] },
            _ => Self { coords: vec![0.0] },
        }
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }
}

/// Spectrum of a compact group together with its structural constants.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpectrum {
    kind: GroupKind,
    dim: usize,
    rank: usize,
    weyl_order: usize,
    rho_sq: f64,
    table: Vec<IrrepDatum>,
}

/// Structural constants of a tabulated group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Structure {
    pub dim: usize,
    pub rank: usize,
    pub weyl_order: usize,
    pub rho_sq: f64,
}

impl GroupSpectrum {
    pub fn torus(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("torus dimension must be positive".into()));
        }
        Ok(Self {
            kind: GroupKind::Torus(d),
            dim: d,
            rank: d,
            weyl_order: 1,
            rho_sq: 0.0,
            table: Vec::new(),
        })
    }

    pub fn su2() -> Self {
        Self {
            kind: GroupKind::Su2,
            dim: 3,
            rank: 1,
            weyl_order: 2,
            rho_sq: 1.0,
            table: Vec::new(),
        }
    }

    pub fn so3() -> Self {
        Self {
            kind: GroupKind::So3,
            dim: 3,
            rank: 1,
            weyl_order: 2,
            rho_sq: 0.25,
            table: Vec::new(),
        }
    }

    /// Tabulated spectrum. Rows are sorted by Casimir value, ties broken by
    /// index.
    pub fn generic(structure: Structure, mut rows: Vec<IrrepDatum>) -> Result<Self> {
        if structure.dim == 0 || structure.rank == 0 || structure.weyl_order == 0 {
            return Err(Error::InvalidParameter(
                "group dimension, rank and Weyl group order must be positive".into(),
            ));
        }
        if structure.rank > structure.dim {
            return Err(Error::InvalidParameter("rank exceeds group dimension".into()));
        }
        if !(structure.rho_sq >= 0.0 && structure.rho_sq.is_finite()) {
            return Err(Error::InvalidParameter("rho_sq must be non-negative".into()));
        }
        let trivial: Vec<_> = rows.iter().filter(|r| r.casimir == 0.0).collect();
        match trivial.as_slice() {
            [] => return Err(Error::NoTrivialRepresentation),
            [t] if t.dim == 1 => {}
            [_] => {
                return Err(Error::InvalidParameter(
                    "the representation with zero Casimir must be one-dimensional".into(),
                ))
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "more than one representation has zero Casimir".into(),
                ))
            }
        }
        sort_irreps(&mut rows);
        for w in rows.windows(2) {
            if w[0].index == w[1].index {
                return Err(Error::InvalidParameter(format!(
                    "duplicate index {}",
                    w[0].label()
                )));
            }
        }
        Ok(Self {
            kind: GroupKind::Generic,
            dim: structure.dim,
            rank: structure.rank,
            weyl_order: structure.weyl_order,
            rho_sq: structure.rho_sq,
            table: rows,
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Dimension of the group as a manifold.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl_order
    }

    pub fn rho_sq(&self) -> f64 {
        self.rho_sq
    }

    /// `m = (dim - rank) / 2`, the growth exponent of dimensions in `|λ|`.
    pub fn m(&self) -> f64 {
        (self.dim - self.rank) as f64 / 2.0
    }

    pub fn is_builtin(&self) -> bool {
        self.kind != GroupKind::Generic
    }

    pub fn supports_characters(&self) -> bool {
        self.is_builtin()
    }

    /// Rows of a tabulated spectrum (empty for built-ins).
    pub fn table(&self) -> &[IrrepDatum] {
        &self.table
    }

    pub fn trivial(&self) -> IrrepDatum {
        match self.kind {
            GroupKind::Torus(d) => IrrepDatum {
                index: vec![0; d],
                dim: 1,
                casimir: 0.0,
            },
            GroupKind::Su2 | GroupKind::So3 => IrrepDatum {
                index: vec![0],
                dim: 1,
                casimir: 0.0,
            },
            GroupKind::Generic => self.table[0].clone(),
        }
    }

    /// Looks up the representation with the given label.
    pub fn irrep(&self, index: &[i64]) -> Result<IrrepDatum> {
        let bad = || Error::InvalidParameter(format!("no irrep with index {}", index_label(index)));
        match self.kind {
            GroupKind::Torus(d) => {
                if index.len() != d {
                    return Err(bad());
                }
                Ok(torus_irrep(index.to_vec()))
            }
            GroupKind::Su2 | GroupKind::So3 => match index {
                [n] if *n >= 0 => Ok(if self.kind == GroupKind::Su2 {
                    su2_irrep(*n as u64)
                } else {
                    so3_irrep(*n as u64)
                }),
                _ => Err(bad()),
            },
            GroupKind::Generic => self
                .table
                .iter()
                .find(|r| r.index == index)
                .cloned()
                .ok_or_else(bad),
        }
    }

    /// All irreps up to the cutoff, sorted by Casimir value and then by index.
    pub fn enumerate(&self, cutoff: Cutoff) -> Result<Enumeration> {
        match cutoff {
            Cutoff::MaxCasimir(x) if x.is_nan() || x <= 0.0 => {
                return Err(Error::InvalidParameter("casimir cutoff must be positive".into()))
            }
            Cutoff::MaxCount(0) => {
                return Err(Error::InvalidParameter("count cutoff must be positive".into()))
            }
            _ => {}
        }
        let builtin = |irreps| Ok(Enumeration { irreps, truncated: false });
        match (self.kind, cutoff) {
            (GroupKind::Su2, Cutoff::MaxCount(c)) => builtin((0..c as u64).map(su2_irrep).collect()),
            (GroupKind::So3, Cutoff::MaxCount(c)) => builtin((0..c as u64).map(so3_irrep).collect()),
            (GroupKind::Su2, Cutoff::MaxCasimir(x)) => builtin(
                (0..)
                    .map(su2_irrep)
                    .take_while(|r| r.casimir <= x)
                    .collect(),
            ),
            (GroupKind::So3, Cutoff::MaxCasimir(x)) => builtin(
                (0..)
                    .map(so3_irrep)
                    .take_while(|r| r.casimir <= x)
                    .collect(),
            ),
            (GroupKind::Torus(d), Cutoff::MaxCasimir(x)) => {
                let max_norm_sq = (x / (4.0 * PI * PI)).floor() as u64;
                let mut irreps: Vec<_> = torus_points(d, max_norm_sq)
                    .into_iter()
                    .map(torus_irrep)
                    .filter(|r| r.casimir <= x)
                    .collect();
                sort_irreps(&mut irreps);
                builtin(irreps)
            }
            (GroupKind::Torus(d), Cutoff::MaxCount(c)) => {
                let mut radius = 1u64;
                loop {
                    let pts = torus_points(d, radius * radius);
                    if pts.len() >= c {
                        let mut irreps: Vec<_> = pts.into_iter().map(torus_irrep).collect();
                        sort_irreps(&mut irreps);
                        irreps.truncate(c);
                        return builtin(irreps);
                    }
                    radius *= 2;
                }
            }
            (GroupKind::Generic, Cutoff::MaxCount(c)) => Ok(Enumeration {
                irreps: self.table.iter().take(c).cloned().collect(),
                truncated: c > self.table.len(),
            }),
            (GroupKind::Generic, Cutoff::MaxCasimir(x)) => {
                let max_tab = self.table.last().map_or(0.0, |r| r.casimir);
                Ok(Enumeration {
                    irreps: self
                        .table
                        .iter()
                        .take_while(|r| r.casimir <= x)
                        .cloned()
                        .collect(),
                    truncated: x > max_tab,
                })
            }
        }
    }

    /// Character `χ_π` at a conjugacy class.
    ///
    /// Torus characters are complex exponentials; SU(2) and SO(3)
    /// characters are real and returned with zero imaginary part.
    pub fn character(&self, irrep: &IrrepDatum, point: &ClassPoint) -> Result<Complex64> {
        self.check_point(point)?;
        match self.kind {
            GroupKind::Torus(_) => {
                let phase: f64 = irrep
                    .index
                    .iter()
                    .zip(&point.coords)
                    .map(|(&n, &x)| n as f64 * x)
                    .sum();
                Ok(Complex64::from_polar(1.0, 2.0 * PI * phase))
            }
            GroupKind::Su2 => Ok(su2_character(irrep.index[0] as u64, point.coords[0]).into()),
            GroupKind::So3 => Ok(so3_character(irrep.index[0] as u64, point.coords[0]).into()),
            GroupKind::Generic => {
                if point.is_identity() {
                    Ok((irrep.dim as f64).into())
                } else {
                    Err(Error::Capability(
                        "tabulated spectra only provide characters at the identity".into(),
                    ))
                }
            }
        }
    }

    /// Validates that a class point lies in this group's fundamental domain.
    pub fn check_point(&self, point: &ClassPoint) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match self.kind {
            GroupKind::Torus(d) => {
                if point.coords.len() != d {
                    return bad("torus class point has the wrong number of coordinates");
                }
                if point.coords.iter().any(|&x| !(0.0..1.0).contains(&x)) {
                    return bad("torus coordinates must lie in [0, 1)");
                }
            }
            GroupKind::Su2 | GroupKind::So3 | GroupKind::Generic => {
                if point.coords.len() != 1 {
                    return bad("class point must have exactly one angle");
                }
                if !(0.0..=PI).contains(&point.coords[0]) {
                    return bad("class angle must lie in [0, π]");
                }
            }
        }
        Ok(())
    }

    /// Weyl integration density on the fundamental domain, normalized to
    /// unit mass.
    pub fn weyl_weight(&self, point: &ClassPoint) -> Result<f64> {
        self.check_point(point)?;
        match self.kind {
            GroupKind::Torus(_) => Ok(1.0),
            GroupKind::Su2 => Ok(2.0 / PI * point.coords[0].sin().powi(2)),
            GroupKind::So3 => Ok(2.0 / PI * (0.5 * point.coords[0]).sin().powi(2)),
            GroupKind::Generic => Err(Error::Capability(
                "tabulated spectra carry no class geometry".into(),
            )),
        }
    }

    /// Intervals spanning the fundamental domain, one per class coordinate.
    pub fn class_domain(&self) -> Result<Vec<(f64, f64)>> {
        match self.kind {
            GroupKind::Torus(d) => Ok(vec![(0.0, 1.0); d]),
            GroupKind::Su2 | GroupKind::So3 => Ok(vec![(0.0, PI)]),
            GroupKind::Generic => Err(Error::Capability(
                "tabulated spectra carry no class geometry".into(),
            )),
        }
    }
}

fn sort_irreps(irreps: &mut [IrrepDatum]) {
    irreps.sort_by(|a, b| {
        a.casimir
            .total_cmp(&b.casimir)
            .then_with(|| a.index.cmp(&b.index))
    });
}

fn torus_points(d: usize, max_norm_sq: u64) -> Vec<Vec<i64>> {
    let r = lattice::isqrt(max_norm_sq) as i64;
    let mut out = Vec::new();
    for first in -r..=r {
        lattice::for_each_point(d, first, max_norm_sq, |p, _| out.push(p.to_vec()));
    }
    out
}

pub(crate) fn su2_casimir(n: u64) -> f64 {
    let n = n as f64;
    n * (n + 2.0)
}

pub(crate) fn so3_casimir(n: u64) -> f64 {
    let n = n as f64;
    n * (n + 1.0)
}

pub(crate) fn torus_casimir(norm_sq: u64) -> f64 {
    4.0 * PI * PI * norm_sq as f64
}

fn su2_irrep(n: u64) -> IrrepDatum {
    IrrepDatum {
        index: vec![n as i64],
        dim: n + 1,
        casimir: su2_casimir(n),
    }
}

fn so3_irrep(n: u64) -> IrrepDatum {
    IrrepDatum {
        index: vec![n as i64],
        dim: 2 * n + 1,
        casimir: so3_casimir(n),
    }
}

fn torus_irrep(index: Vec<i64>) -> IrrepDatum {
    let norm_sq: i64 = index.iter().map(|x| x * x).sum();
    IrrepDatum {
        index,
        dim: 1,
        casimir: torus_casimir(norm_sq as u64),
    }
}

/// `χ_n(θ) = sin((n+1)θ) / sin θ`, with the Dirichlet form
/// `Σ_{k=0}^{n} cos((n-2k)θ)` near the poles.
pub fn su2_character(n: u64, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() < SINGULAR_SIN {
        (0..=n)
            .map(|k| ((n as f64 - 2.0 * k as f64) * theta).cos())
            .sum()
    } else {
        ((n + 1) as f64 * theta).sin() / s
    }
}

/// `χ_n(φ) = sin((2n+1)φ/2) / sin(φ/2)`, with the Dirichlet form
/// `1 + 2 Σ_{k=1}^{n} cos(kφ)` near the identity.
pub fn so3_character(n: u64, phi: f64) -> f64 {
    let s = (0.5 * phi).sin();
    if s.abs() < SINGULAR_SIN {
        1.0 + 2.0 * (1..=n).map(|k| (k as f64 * phi).cos()).sum::<f64>()
    } else {
        ((2 * n + 1) as f64 * 0.5 * phi).sin() / s
    }
}

/// Unit quaternion `w + xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// `cos θ + sin θ · axis` for a unit axis.
    pub fn from_angle_axis(theta: f64, axis: [f64; 3]) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let s = theta.sin() / n;
        Self::new(theta.cos(), s * axis[0], s * axis[1], s * axis[2])
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn mul(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    fn vector_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

const TORUS_SCALE: f64 = 18446744073709551616.0; // 2^64

/// A group element. Torus coordinates are stored as 64-bit fixed-point
/// fractions of the circle so that group arithmetic is exact modulo 1.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Torus(Vec<u64>),
    Su2(Quaternion),
    /// Unit quaternion modulo sign.
    So3(Quaternion),
}

impl GroupElement {
    pub fn identity(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Torus(d) => Ok(GroupElement::Torus(vec![0; d])),
            GroupKind::Su2 => Ok(GroupElement::Su2(Quaternion::IDENTITY)),
            GroupKind::So3 => Ok(GroupElement::So3(Quaternion::IDENTITY)),
            GroupKind::Generic => Err(Error::Capability(
                "tabulated spectra have no group elements".into(),
            )),
        }
    }

    /// Torus element from real coordinates, reduced modulo 1.
    pub fn torus(coords: &[f64]) -> Self {
        GroupElement::Torus(
            coords
                .iter()
                .map(|&x| {
                    let frac = x.rem_euclid(1.0);
                    // frac < 1, so the product fits after rounding except at the
                    // very top of the range, which wraps to 0 as it should.
                    ((frac * TORUS_SCALE).round() as u128 % (1u128 << 64)) as u64
                })
                .collect(),
        )
    }

    pub fn su2(q: Quaternion) -> Result<Self> {
        check_unit(&q)?;
        Ok(GroupElement::Su2(q))
    }

    pub fn so3(q: Quaternion) -> Result<Self> {
        check_unit(&q)?;
        Ok(GroupElement::So3(q))
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::Torus(c) => GroupKind::Torus(c.len()),
            GroupElement::Su2(_) => GroupKind::Su2,
            GroupElement::So3(_) => GroupKind::So3,
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) if a.len() == b.len() => Ok(
                GroupElement::Torus(a.iter().zip(b).map(|(x, y)| x.wrapping_add(*y)).collect()),
            ),
            (GroupElement::Su2(a), GroupElement::Su2(b)) => {
                Ok(GroupElement::Su2(a.mul(b).normalized()))
            }
            (GroupElement::So3(a), GroupElement::So3(b)) => {
                Ok(GroupElement::So3(a.mul(b).normalized()))
            }
            _ => Err(Error::KindMismatch {
                expected: self.kind().name(),
                found: other.kind().name(),
            }),
        }
    }

    pub fn invert(&self) -> GroupElement {
        match self {
            GroupElement::Torus(c) => GroupElement::Torus(c.iter().map(|x| x.wrapping_neg()).collect()),
            GroupElement::Su2(q) => GroupElement::Su2(q.conj()),
            GroupElement::So3(q) => GroupElement::So3(q.conj()),
        }
    }

    /// Conjugacy class of the element.
    pub fn class_of(&self) -> ClassPoint {
        match self {
            GroupElement::Torus(c) => {
                ClassPoint::new(c.iter().map(|&x| x as f64 / TORUS_SCALE).map(|x| if x >= 1.0 { 0.0 } else { x }).collect())
            }
            GroupElement::Su2(q) => ClassPoint::angle(q.vector_norm().atan2(q.w)),
            GroupElement::So3(q) => ClassPoint::angle(2.0 * q.vector_norm().atan2(q.w.abs())),
        }
    }

    /// Whether two elements coincide (SO(3) up to quaternion sign).
    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) => a == b,
            (GroupElement::Su2(a), GroupElement::Su2(b)) => quat_dist(a, b) <= tol,
            (GroupElement::So3(a), GroupElement::So3(b)) => {
                quat_dist(a, b) <= tol || quat_dist(a, &Quaternion::new(-b.w, -b.x, -b.y, -b.z)) <= tol
            }
            _ => false,
        }
    }
}

fn quat_dist(a: &Quaternion, b: &Quaternion) -> f64 {
    Quaternion::new(a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z).norm()
}

fn check_unit(q: &Quaternion) -> Result<()> {
    if (q.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!(
            "quaternion norm {} is not 1",
            q.norm()
        )));
    }
    Ok(())
}

fn parse_structure_comment(line: &str, structure: &mut [Option<f64>; 4]) {
    let body = line.trim_start_matches('#').trim();
    let Some((key, value)) = body.split_once(':').or_else(|| body.split_once('=')) else {
        return;
    };
    let slot = match key.trim() {
        "group_dim" => 0,
        "rank" => 1,
        "weyl_order" => 2,
        "rho_sq" => 3,
        _ => return,
    };
    if let Ok(v) = value.trim().parse::<f64>() {
        structure[slot] = Some(v);
    }
}

/// Reads a tabulated spectrum.
///
/// Format: UTF-8 CSV with header `index,dim,casimir`, index as
/// semicolon-separated integers, `#` comments. Structural constants come from
/// `# group_dim: 8`, `# rank: 2`, `# weyl_order: 6`, `# rho_sq: 1` comment
/// lines unless `structure` overrides them.
pub fn load_spectrum<R: Read>(mut source: R, structure: Option<Structure>) -> Result<GroupSpectrum> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let mut meta = [None; 4];
    for line in text.lines().filter(|l| l.trim_start().starts_with('#')) {
        parse_structure_comment(line, &mut meta);
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: e.position().map_or(1, |p| p.line()),
            message: e.to_string(),
        })?
        .clone();
    let header_line = reader.position().line().max(1);
    if headers.iter().collect::<Vec<_>>() != ["index", "dim", "casimir"] {
        if headers.is_empty() {
            return Err(Error::NoTrivialRepresentation);
        }
        return Err(Error::Parse {
            line: header_line,
            message: "expected header `index,dim,casimir`".into(),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Parse { line, message };
        if record.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", record.len())));
        }
        let index = parse_index_label(&record[0]).ok_or_else(|| err(format!("bad index `{}`", &record[0])))?;
        let dim: u64 = record[1]
            .parse()
            .map_err(|_| err(format!("bad dim `{}`", &record[1])))?;
        if dim == 0 {
            return Err(err("dim must be at least 1".into()));
        }
        let casimir: f64 = record[2]
            .parse()
            .map_err(|_| err(format!("bad casimir `{}`", &record[2])))?;
        if !(casimir >= 0.0 && casimir.is_finite()) {
            return Err(err("casimir must be a non-negative number".into()));
        }
        rows.push(IrrepDatum { index, dim, casimir });
    }
    if rows.is_empty() {
        return Err(Error::NoTrivialRepresentation);
    }

    let structure = match structure {
        Some(s) => s,
        None => {
            let get = |i: usize, name: &str| {
                meta[i].ok_or_else(|| {
                    Error::InvalidParameter(format!("spectrum table lacks a `# {name}: ...` line"))
                })
            };
            Structure {
                dim: get(0, "group_dim")? as usize,
                rank: get(1, "rank")? as usize,
                weyl_order: meta[2].unwrap_or(1.0) as usize,
                rho_sq: meta[3].unwrap_or(0.0),
            }
        }
    };
    GroupSpectrum::generic(structure, rows)
}
