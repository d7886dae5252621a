//! Statevector execution and the dense reference oracles.

pub mod characteristics;
pub mod oracle;
pub mod statevector;

pub use characteristics::characteristics_solve;
pub use oracle::{expm_evolve, integrate, OracleMethod, OracleResult};
pub use statevector::StateVector;
