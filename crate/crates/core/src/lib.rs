//! Double-mode squeezing of the initial state in quenches of the
//! transverse-field XY chain: Loschmidt amplitudes, rate functions, Fisher
//! zeros, the critical condition `Δ`, Pancharatnam phases, the dynamical
//! topological order parameter and the mode-pair entanglement entropy,
//! together with brute-force oracles for all of them.

pub mod cli;
pub mod dqpt;
pub mod error;
pub mod model;
pub mod numeric;
pub mod observables;
pub mod oracle;
pub mod pauli;
pub mod quench;
pub mod squeeze;

pub use error::{Error, Result};
