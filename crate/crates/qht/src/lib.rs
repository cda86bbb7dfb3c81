//! # qht
//!
//! Quantum hypothesis testing at desk scale: sandwiched Rényi divergences,
//! the Hoeffding anti-divergence, generalized cutoff rates, and finite-n
//! optimal Neyman–Pearson tests for pairs of density operators.
//!
//! The library is organized around the identity between the strong-converse
//! exponent of binary state discrimination and the Hoeffding anti-divergence
//!
//! ```text
//! B_r(ρ‖η) = H*_r(ρ‖η) = sup_{α>1} (α−1)/α · (r − D*_α(ρ‖η)),
//! ```
//!
//! which the `exponents` module probes empirically: finite-n exponents
//! b_n(r) = −(1/n) ln(max type-I success at type-II budget e^{−nr}) are
//! computed by exact test solvers and swept against H*_r.
//!
//! ## Modules
//!
//! - [`operator_core`] — validated Hermitian/density/test types, spectral
//!   decomposition, Loewner order, tensor powers.
//! - [`divergence`] — Q*_α, sandwiched and Petz Rényi divergences, Umegaki
//!   and max-relative entropy, H*_r, cutoff rates.
//! - [`binning`] — geometric spectral binning with certified sandwich and
//!   divergence-perturbation bounds.
//! - [`types_pinch`] — pinching maps, type-class enumeration, cp-order-index
//!   checks, and the pinched-pair reduction to commuting algebras.
//! - [`np_testing`] — optimal tests: dense Neyman–Pearson with dual
//!   certificate, exact likelihood-ratio tests over type classes, and the
//!   scaling/block test combinators.
//! - [`exponents`] — finite-n exponent records, convergence sweeps, and
//!   envelope estimates.
//! - [`cli_io`] — pair-file format, built-in fixtures, CSV emission, and
//!   the property-suite runner behind the `qht` binary.
//!
//! All public values are immutable after construction and every operation
//! is pure, so everything is safe to use concurrently.
//!
//! ## Conventions
//!
//! All divergences are returned in nats. The normalization tying the
//! α-norm to the divergence is `ln Q*_α = ((α−1)/α) · D*_α`, so
//! `D*_α = (1/(α−1)) · ln tr[(η^{(1−α)/2α} ρ η^{(1−α)/2α})^α]`.
//!
//! ## Quick start
//!
//! ```rust
//! use qht::divergence::{cutoff_rate, sandwiched_renyi};
//! use qht::{DensityOperator, StatePair};
//!
//! // (1/2, 1/2) against (1/4, 3/4), embedded as diagonal densities
//! let rho = DensityOperator::from_probabilities(&[0.5, 0.5]).unwrap();
//! let eta = DensityOperator::from_probabilities(&[0.25, 0.75]).unwrap();
//! let pair = StatePair::new(rho, eta).unwrap();
//!
//! let d2 = sandwiched_renyi(&pair, 2.0).unwrap();
//! assert!((d2 - (4.0f64 / 3.0).ln()).abs() < 1e-12);
//!
//! // the cutoff rate at kappa = 1/2 recovers D*_2
//! let c = cutoff_rate(&pair, 0.5, 1e-6).unwrap();
//! assert!((c - d2).abs() < 1e-6);
//! ```

pub mod binning;
pub mod cli_io;
pub mod divergence;
pub mod error;
pub mod exponents;
pub mod logspace;
pub mod np_testing;
pub mod operator_core;
#[cfg(test)]
pub(crate) mod testutil;
pub mod types_pinch;

pub use error::{Error, Result};
pub use operator_core::{DensityOperator, HermitianOperator, StatePair, TestOperator};
