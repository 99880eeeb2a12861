//! Four-way interferometer for pure three-qubit states.
//!
//! The crate simulates the interferometer that measures the local character
//! `S_A` of one qubit and its entanglement `C_A(BC)` with the remaining pair,
//! and checks the relation `C² + S² = 1` both directly (from reduced density
//! matrices) and interferometrically (from fringe visibilities).
//!
//! Qubit 0 (particle A) is the most significant bit of a basis index, so the
//! three-qubit basis runs `|000⟩, |001⟩, …, |111⟩`.

pub mod cli;
pub mod eig;
pub mod entanglement;
pub mod error;
mod extremum;
pub mod harness;
pub mod interferometer;
pub mod prep;
pub mod quantum;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use eig::{hermitian_eig, EigenDecomposition};
pub use entanglement::{
    concurrence_bipartition, concurrence_two_qubit, fidelity, predictability, preferred_basis,
    single_particle_character, single_visibility_direct, theta_angles, PreferredBasis,
    ThetaAngles,
};
pub use interferometer::{Interferogram, PhaseGrid, SweepMode};
pub use prep::{FamilyParams, StateClassTag};
pub use quantum::{CMatrix, CVector, DensityMatrix, PureState, UnitaryMatrix};
