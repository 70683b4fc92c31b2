//! Driven quantum harmonic oscillator in four equivalent pictures.
//!
//! The Hamiltonian is `H = p²/2 + q²/2 − f(t)·q` in units where ℏ = m = ω = 1.
//! A state can be carried as a wavefunction on a position grid, as a Wigner
//! quasiprobability on a phase-space grid, or as symplectic/optical tomograms,
//! which are ordinary probability densities of the rotated quadrature
//! `X = μq + νp`. The modules mirror that split:
//!
//! * [`dynamics`]: forces, drive integrals, classical trajectories and the
//!   Liouville evolution of phase-space densities.
//! * [`states`]: Hermite polynomials, coherent and Fock wavefunctions.
//! * [`propagator`]: the Green function and wavefunction propagation.
//! * [`phasespace`]: Wigner functions and their evolution.
//! * [`tomography`]: symplectic/optical tomograms, their evolution and the
//!   Radon link with the Wigner function.
//! * [`scenario`] and [`verify`]: the command-line front end.

pub mod dynamics;
pub mod error;
pub mod grid;
pub mod phasespace;
pub mod propagator;
pub mod quadrature;
pub mod scenario;
pub mod states;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Formats a number the way every CSV writer in this crate does:
/// 17 significant digits in scientific notation.
pub(crate) fn fmt_num(v: f64) -> String {
    // -0 and 0 must produce the same bytes across platforms.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}
