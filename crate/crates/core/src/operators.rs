//! Fourier multipliers on finite Fourier data: the semigroup `T_t`, its
//! generator, resolvents and Sobolev norms.
//!
//! A function is stored through its coefficient blocks `f̂(π)`, a `d_π × d_π`
//! complex matrix per irrep, with `f = Σ d_π tr(f̂(π) π)`. Under this
//! convention the character `χ_π` has block `I / d_π`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exponents::Exponent;
use crate::measures::CentralMeasure;
use crate::spectrum::{index_label, parse_index_label, ClassPoint, GroupSpectrum, IrrepDatum};

const SCALAR_TOL: f64 = 1e-12;

/// Dense row-major `dim × dim` block.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Block {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn scalar(dim: usize, s: Complex64) -> Self {
        let mut b = Self::zeros(dim);
        for i in 0..dim {
            b.data[i * dim + i] = s;
        }
        b
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// `tr(B B*)`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// The scalar `s` if the block equals `s·I` within tolerance.
    pub fn as_scalar(&self) -> Option<Complex64> {
        let s = self.get(0, 0);
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expect = if i == j { s } else { Complex64::new(0.0, 0.0) };
                if (self.get(i, j) - expect).norm() > SCALAR_TOL * scale {
                    return None;
                }
            }
        }
        Some(s)
    }
}

/// Finite Fourier data on a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFunction {
    spectrum: Arc<GroupSpectrum>,
    blocks: BTreeMap<Vec<i64>, (IrrepDatum, Block)>,
    class_flag: bool,
}

impl FourierFunction {
    pub fn new(spectrum: Arc<GroupSpectrum>, blocks: Vec<(Vec<i64>, Block)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (index, block) in blocks {
            let irrep = spectrum.irrep(&index)?;
            if block.dim as u64 != irrep.dim || block.data.len() != block.dim * block.dim {
                return Err(Error::InvalidParameter(format!(
                    "block for irrep {} must be {d}x{d}",
                    irrep.label(),
                    d = irrep.dim
                )));
            }
            if map.insert(index, (irrep, block)).is_some() {
                return Err(Error::InvalidParameter("duplicate irrep block".into()));
            }
        }
        let class_flag = map.values().all(|(_, b)| b.as_scalar().is_some());
        Ok(Self {
            spectrum,
            blocks: map,
            class_flag,
        })
    }

    /// `Σ a_π χ_π`.
    pub fn class_function(spectrum: Arc<GroupSpectrum>, coeffs: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(coeffs.len());
        for (index, a) in coeffs {
            let d = spectrum.irrep(index)?.dim as usize;
            blocks.push((index.clone(), Block::scalar(d, a / d as f64)));
        }
        Self::new(spectrum, blocks)
    }

    pub fn character(spectrum: Arc<GroupSpectrum>, index: &[i64]) -> Result<Self> {
        Self::class_function(spectrum, &[(index.to_vec(), Complex64::new(1.0, 0.0))])
    }

    /// Matrix coefficient `π_ij`, whose block is `E_ji / d_π`.
    pub fn coordinate(spectrum: Arc<GroupSpectrum>, index: &[i64], i: usize, j: usize) -> Result<Self> {
        let d = spectrum.irrep(index)?.dim as usize;
        if i >= d || j >= d {
            return Err(Error::InvalidParameter("matrix coefficient index out of range".into()));
        }
        let mut b = Block::zeros(d);
        b.data[j * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        Self::new(spectrum, vec![(index.to_vec(), b)])
    }

    pub fn spectrum(&self) -> &GroupSpectrum {
        &self.spectrum
    }

    pub fn class_flag(&self) -> bool {
        self.class_flag
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&IrrepDatum, &Block)> {
        self.blocks.values().map(|(r, b)| (r, b))
    }

    pub fn block(&self, index: &[i64]) -> Option<&Block> {
        self.blocks.get(index).map(|(_, b)| b)
    }

    /// Applies a real multiplier `s(κ_π)` blockwise.
    pub fn map_symbol<F: Fn(&IrrepDatum) -> f64>(&self, symbol: F) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(k, (r, b))| (k.clone(), (r.clone(), b.scaled(symbol(r)))))
            .collect();
        Self {
            spectrum: self.spectrum.clone(),
            blocks,
            class_flag: self.class_flag,
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &FourierFunction, b: f64) -> Result<Self> {
        self.check_same(other.spectrum())?;
        let mut out: BTreeMap<Vec<i64>, (IrrepDatum, Block)> = self
            .blocks
            .iter()
            .map(|(k, (r, blk))| (k.clone(), (r.clone(), blk.scaled(a))))
            .collect();
        for (k, (r, blk)) in &other.blocks {
            let entry = out
                .entry(k.clone())
                .or_insert_with(|| (r.clone(), Block::zeros(blk.dim)));
            for (x, y) in entry.1.data.iter_mut().zip(&blk.data) {
                *x += y * b;
            }
        }
        let class_flag = out.values().all(|(_, b)| b.as_scalar().is_some());
        Ok(Self {
            spectrum: self.spectrum.clone(),
            blocks: out,
            class_flag,
        })
    }

    /// Single-irrep pieces whose sum is `self`; each is an eigenvector of every
    /// multiplier.
    pub fn eigencomponents(&self) -> Vec<FourierFunction> {
        self.blocks
            .iter()
            .map(|(k, v)| {
                let mut blocks = BTreeMap::new();
                blocks.insert(k.clone(), v.clone());
                FourierFunction {
                    spectrum: self.spectrum.clone(),
                    class_flag: v.1.as_scalar().is_some(),
                    blocks,
                }
            })
            .collect()
    }

    fn check_same(&self, other: &GroupSpectrum) -> Result<()> {
        if *self.spectrum != *other {
            return Err(Error::SpectrumMismatch(
                "fourier data and operator live on different spectra".into(),
            ));
        }
        Ok(())
    }

    /// `{"<index>": [[re, im], ...]}` with blocks row-major.
    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        for (k, (_, b)) in &self.blocks {
            let entries = b
                .data
                .iter()
                .map(|z| Value::from(vec![z.re, z.im]))
                .collect::<Vec<_>>();
            map.insert(index_label(k), Value::Array(entries));
        }
        Value::Object(map).to_string()
    }

    pub fn from_json(spectrum: Arc<GroupSpectrum>, text: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidParameter(format!("fourier json: {m}"));
        let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| bad("expected an object".into()))?;
        let mut blocks = Vec::with_capacity(obj.len());
        for (key, entries) in obj {
            let index = parse_index_label(key).ok_or_else(|| bad(format!("bad index `{key}`")))?;
            let entries = entries.as_array().ok_or_else(|| bad("block must be an array".into()))?;
            let data = entries
                .iter()
                .map(|e| match e.as_array().map(|a| a.as_slice()) {
                    Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                        _ => Err(bad("entries must be numbers".into())),
                    },
                    _ => Err(bad("entries must be [re, im] pairs".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            let dim = (data.len() as f64).sqrt().round() as usize;
            blocks.push((index, Block { dim, data }));
        }
        Self::new(spectrum, blocks)
    }
}

/// `T_t f`, blockwise multiplication by `e^{t α_π}`.
pub fn apply_semigroup(m: &CentralMeasure, f: &FourierFunction) -> Result<FourierFunction> {
    f.check_same(m.spectrum())?;
    Ok(f.map_symbol(|r| m.coefficient(r)))
}

/// `𝒜 f`, blockwise multiplication by `α_π = −η(√κ_π)`.
pub fn apply_generator(e: &Exponent, f: &FourierFunction) -> FourierFunction {
    f.map_symbol(|r| e.symbol_alpha(r.casimir))
}

/// `(λ − 𝒜)^{-1} f`, blockwise multiplication by `(λ − α_π)^{-1}`.
pub fn apply_resolvent(e: &Exponent, lambda: f64, f: &FourierFunction) -> Result<FourierFunction> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter("resolvent parameter must be positive".into()));
    }
    Ok(f.map_symbol(|r| 1.0 / (lambda - e.symbol_alpha(r.casimir))))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SobolevNorm {
    pub p: u32,
    pub value: f64,
}

/// `|||f|||_p² = Σ d_π (1+κ_π)^p tr(f̂(π) f̂(π)*)`.
pub fn sobolev_norm(f: &FourierFunction, p: u32) -> SobolevNorm {
    let sq: f64 = f
        .blocks()
        .map(|(r, b)| r.dim as f64 * (1.0 + r.casimir).powi(p as i32) * b.hs_norm_sq())
        .sum();
    SobolevNorm { p, value: sq.sqrt() }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorBound {
    pub lhs: f64,
    pub rhs: f64,
    pub k: f64,
    pub holds: bool,
}

/// Checks `|||𝒜f|||²_{p−2} ≤ K² |||f|||²_p` with `K` from
/// [`Exponent::growth_bound`], the inequality behind `𝒜 : H_p → H_{p−2}`.
pub fn generator_bound_check(e: &Exponent, f: &FourierFunction, p: u32) -> Result<GeneratorBound> {
    if p < 2 {
        return Err(Error::InvalidParameter("generator bound needs p >= 2".into()));
    }
    let k = e.growth_bound();
    let lhs = sobolev_norm(&apply_generator(e, f), p - 2).value.powi(2);
    let rhs = k * k * sobolev_norm(f, p).value.powi(2);
    Ok(GeneratorBound {
        lhs,
        rhs,
        k,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// `Σ_π a_π χ_π(point)` for a class function.
pub fn synthesize_class(f: &FourierFunction, point: &ClassPoint) -> Result<Complex64> {
    if !f.class_flag() {
        return Err(Error::Capability(
            "point synthesis needs a class function (scalar blocks)".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, b) in f.blocks() {
        let a = b.get(0, 0) * r.dim as f64;
        acc += a * f.spectrum().character(r, point)?;
    }
    Ok(acc)
}
