//! Controllability analysis for finite-dimensional affine quantum
//! control systems: dynamical Lie algebra closures, commutants, cyclic
//! vectors, spectral-resonance checks, and a truncated Fock-space
//! simulator of a Mach-Zehnder interferometer with a Kerr arm.

pub mod ctrl;
pub mod fock;
pub mod lie;
pub mod mat;
pub mod mzk;
pub mod numerics;
pub mod systems;

#[cfg(test)]
pub(crate) mod testutil;

pub use numerics::NumericsConfig;
