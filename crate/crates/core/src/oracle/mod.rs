//! Brute-force density-matrix references in small Hilbert spaces.

pub mod bosonic;
pub mod checks;
pub mod dense;
pub mod fermionic;
pub mod sparse;

pub use bosonic::DenseBosonicEngine;
pub use dense::{DenseIntegrator, DenseLiouvillian, DenseOperator};
pub use fermionic::DenseFermionicEngine;
