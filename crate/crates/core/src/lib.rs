// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Open-system dynamics of uniformly accelerated two-level atoms.
//!
//! Atoms coupled to a massless scalar field relax under a Lindblad generator
//! whose rates are set by the Unruh temperature. When the cross-atom factor
//! `f_ab` approaches one, a conserved quantity emerges and the atoms linger in
//! a generalized Gibbs state before thermalizing.
//!
//! * [`rates`] turns physical parameters into dissipator coefficients.
//! * [`state`] and [`measures`] hold density matrices and their functionals.
//! * [`liouvillian`] builds the vectorized generator, its spectrum, steady
//!   states and propagator.
//! * [`bloch`] is the reduced three-observable model with closed-form fixed
//!   points.
//! * [`dicke`] treats the permutation-symmetric large-`N` regime.
//! * [`scenario`] runs bundled scenario files and writes CSV/JSON output.
//!
//! ```
//! use unruh_preth::rates::rates_from_gammas;
//! use unruh_preth::liouvillian::build_lindbladian;
//!
//! let rates = rates_from_gammas(0.8, 0.2, 1.0)?;
//! let spectrum = build_lindbladian(&rates, 2)?.spectrum(1e-10)?;
//! assert_eq!(spectrum.zero_count, 2);
//! # Ok::<(), unruh_preth::Error>(())
//! ```

pub mod bloch;
pub mod dicke;
mod error;
pub mod fit;
pub mod integrate;
pub mod linalg;
pub mod liouvillian;
pub mod measures;
pub mod operators;
pub mod rates;
pub mod scenario;
pub mod state;

pub use error::{Error, Result};
pub use faer::c64;
