//! Superradiant resonance energy transfer in vacuum.
//!
//! A cloud of donors coherently sharing one excitation can transfer it to a
//! single acceptor faster than the same donors acting independently. This
//! crate computes the reduced transfer rates and the superradiant fidelity
//! `F = Gamma_SR / (N Gamma_0)` for arbitrary discrete donor arrangements
//! ([`rates`]) and for continuous donor densities ([`continuum`]), built on
//! the dimensionless vacuum dyadic Green's tensor ([`greens`]) and validated
//! against closed forms ([`analytic`]).
//!
//! Positions are dimensionless (`k*r` with `k = omega/c`) and all physical
//! prefactors are dropped; the fidelity is a ratio in which they cancel.
//!
//! ```
//! use superret::geometry::Vec3;
//! use superret::greens::Regime;
//! use superret::rates::{fidelity, DonorEnsemble};
//!
//! // Two donors on opposite sides of the acceptor transfer as one ideal
//! // superradiant pair, regardless of the distance.
//! let ens = DonorEnsemble::isotropic(
//!     vec![Vec3::new(5.0, 0.0, 0.0), Vec3::new(-5.0, 0.0, 0.0)],
//!     Regime::Full,
//! )?;
//! let f = fidelity(&ens, Vec3::ZERO)?;
//! assert!((f.fidelity - 1.0).abs() < 1e-12);
//! # Ok::<(), superret::Error>(())
//! ```
//!
//! The accompanying guide (`book/` in the repository) walks through the
//! physics chapter by chapter; its code samples are compiled and run as part
//! of the test suite.

pub mod analytic;
pub mod continuum;
pub mod error;
pub mod geometry;
pub mod greens;
pub mod quadrature;
pub mod rates;
pub mod tensor;

pub use error::{Error, Result};
