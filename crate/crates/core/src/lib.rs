//! Local operator entanglement (LOE) of chaotic spin chains.
//!
//! A local operator `O` evolved in the Heisenberg picture is a pure state of the
//! doubled Hilbert space once vectorized. Cutting the chain into `A|B` cuts the
//! doubled space into `A⊗A'|B⊗B'`, and the 2-Rényi entropy of that cut is the LOE.
//! This crate computes its infinite-time average two ways:
//!
//! * from exact eigenstates, through a six-term eigenstate sum evaluated with
//!   pairwise overlap tables ([`latetime`]);
//! * from Haar-random eigenstates, through Weingarten calculus reduced to 13
//!   weights multiplying 13 operator statistics ([`haar`]).
//!
//! The analytic pieces (Weingarten tables, weight derivation, Page weights,
//! asymptotic formulas) are generic over the scalar type through [`Field`] and
//! [`Real`], so the same code runs in `f32`, `f64` or exact rationals. The
//! exact-diagonalization pipeline is `f64` only.

#![forbid(unsafe_code)]

pub mod dynamics;
pub mod eth;
pub mod haar;
pub mod latetime;
pub mod liouville;
pub mod scalar;
pub mod spectral;
pub mod spin_chain;

mod dense;
mod error;

pub use dense::Dense;
pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use faer::Mat;
/// Double precision complex number; identical to `num_complex::Complex64`.
pub use num_complex::Complex64 as C64;

/// Exact rational scalar used to cross-check the floating point Haar algebra.
pub type Rational = num_rational::BigRational;

/// Weingarten table in double precision.
pub type WeingartenTable = haar::weingarten::WeingartenTable<f64>;
/// Weingarten table in exact rational arithmetic.
pub type ExactWeingartenTable = haar::weingarten::WeingartenTable<Rational>;
/// The 13 Haar weights in double precision.
pub type WeightTable = haar::weights::WeightTable<f64>;
/// The 13 Haar weights in exact rational arithmetic.
pub type ExactWeightTable = haar::weights::WeightTable<Rational>;
/// Page-law matrix elements of the partial swap in double precision.
pub type PageWeights = latetime::page::PageWeights<f64>;

pub use dynamics::{renyi, ReducedOperatorState};
pub use eth::EthStatistics;
pub use latetime::PurityBreakdown;
pub use liouville::{OmegaBasis, OperatorInEnergyBasis};
pub use spectral::{EnergyWindow, SpectralData};
pub use spin_chain::{Cut, HermitianOperator, HilbertGeometry, MfimParams, PauliAxis};
