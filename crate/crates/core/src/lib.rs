//! Quantum simulation of transport PDEs through Hamiltonian embedding.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`]: exact algebra over weighted Pauli strings.
//! * [`discretize`]: finite-difference, spectral and polynomial coefficient matrices.
//! * [`embed`]: one-hot, unary, circulant-unary and standard-binary encodings.
//! * [`circuits`]: product-formula lowering, QFT, Laplace state preparation,
//!   gate-level parallelisation and resource accounting.
//! * [`simulate`]: statevector execution and the dense reference oracles.
//! * [`dynamics`]: Schrödingerization and hybrid LCHS pipelines.
//! * [`extrapolate`]: Richardson extrapolation over Trotter step sizes.
//! * [`experiments`]: the drivers behind the `hembed` command line tool.

pub mod circuits;
pub mod discretize;
pub mod dynamics;
pub mod embed;
pub mod error;
pub mod experiments;
pub mod extrapolate;
pub mod linalg;
pub mod pauli;
pub mod simulate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
