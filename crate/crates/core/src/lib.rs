//! Fidelity of dynamically decoupled single-qubit gates under temporally
//! correlated, nonclassical Gaussian dephasing noise with interspersed resets.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`pulse`]: switching functions, DD sequences, protocols and filter functions.
//! * [`noise`]: spectral densities, spectra, correlators and discrete baths.
//! * [`fidelity`]: decay factor, quantum phases and gate fidelity, by two routes.
//! * [`asymptotics`]: repetition kernels, plateau limits and order-of-magnitude formulas.
//! * [`bathstat`]: post-reset bath statistics and re-equilibration.
//! * [`oracle`]: brute-force qubit plus truncated bosonic bath simulation.
//!
//! Numerical infrastructure lives in [`quad`], [`cheb`], [`special`] and [`exec`];
//! [`sweep`] evaluates independent grid points through [`exec::Exec`].

pub mod asymptotics;
pub mod bathstat;
pub mod cheb;
pub mod error;
pub mod exec;
pub mod fidelity;
pub mod noise;
pub mod oracle;
pub mod pulse;
pub mod quad;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
