//! Singular spaces, positive Lagrangians and Gabor wave front sets for the
//! semigroups `e^{-t q^w(x,D)}` generated by complex quadratic forms with
//! `Re q >= 0`.
//!
//! The algebraic side (Hamilton map, singular space, propagation bounds,
//! Lagrangian normal forms) works in any dimension. The numerical side
//! (Hermite–Galerkin propagator, STFT wave front detector) works in d = 1.

pub mod data;
pub mod detector;
pub mod error;
pub mod hamiltonian;
pub mod lagrangian;
pub mod linalg;
pub mod par;
pub mod propagation;
pub mod propagator;
pub mod random;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64;
