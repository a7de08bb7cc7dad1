//! Gaussian open-system dynamics for generalized Lindblad master equations
//! with quadratic Hamiltonians and linear decoherence operators.

pub mod bosonic;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod fermionic;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod propagate;
pub mod reservoir;

pub use error::{GlmeError, Result};
