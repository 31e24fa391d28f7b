//! Central Lévy-type measures on compact Lie groups through their spectral
//! data: Fourier coefficients `e^{-t η(√κ_π)}`, regularity classification,
//! certified density evaluation, Fourier multipliers and small-time
//! asymptotics of the density at the identity.
//!
//! Heavy sums run on rayon when the `parallel` feature is on (the default);
//! every reduction uses a fixed blocked order so sequential and parallel
//! results agree bit for bit.

pub mod asymptotics;
pub mod error;
pub mod exec;
pub mod exponents;
pub mod kernel;
pub mod lattice;
pub mod measures;
pub mod operators;
pub mod output;
pub mod quadrature;
pub mod selfcheck;
pub mod series;
pub mod spectrum;
pub mod tail;

pub use error::{Error, Result};
pub use exec::Execution;
pub use exponents::{Atom, DecayClass, Exponent};
pub use kernel::{KernelValue, Override, TruncationPolicy};
pub use measures::{CentralMeasure, Level, RegularityVerdict, Verdict};
pub use operators::FourierFunction;
pub use spectrum::{ClassPoint, Cutoff, GroupElement, GroupKind, GroupSpectrum, IrrepDatum};
