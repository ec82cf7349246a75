//! Exact diagonalization, free-fermion spectra, adiabatic dynamics and
//! entanglement diagnostics for XX/XXZ spin rings in a uniform field.

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod phases;
pub mod spectra;

pub use error::{Error, Result};
