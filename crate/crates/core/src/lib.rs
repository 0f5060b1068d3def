//! Core library for a periodic-domain pseudo-spectral simulator of compressible
//! barotropic Navier-Stokes flow with anisotropic fourth-order viscous-stress
//! tensors, together with a diagnostics engine for the associated energy and
//! Hoff-type functionals.
//!
//! The library is organised bottom-up:
//!
//! * [`scalar_laws`] — barotropic pressure law and relative-entropy functionals;
//! * [`quad`] — adaptive Gauss-Kronrod quadrature (oracle for the closed forms);
//! * [`tensor4`] — fourth-order viscous-stress tensors, coercivity spectra and
//!   hypothesis checks;
//! * [`spectral`] — discrete calculus on the torus `[0,2π)^d`: transforms,
//!   derivatives, inverse-Laplacian multipliers, mollifier, dealiasing and the
//!   DiPerna-Lions commutator;
//! * [`solver`] — SSP-RK3 time integration of the mollified system in
//!   conservative variables, plus initial-data regularization;
//! * [`diagnostics`] — energy/Hoff/density functionals, effective viscous flux,
//!   identity residuals and the bootstrap monitor;
//! * [`verify`] — batch property suite used by the command-line `verify`
//!   subcommand.

pub mod diagnostics;
pub mod error;
pub mod initial;
pub mod quad;
pub mod scalar_laws;
pub mod solver;
pub mod spectral;
pub mod tensor4;
pub mod verify;

pub use error::{Error, Result};
pub use scalar_laws::PressureLaw;
pub use solver::{FluidState, SolverConfig};
pub use spectral::{ScalarField, SpectralGrid, TensorField, VectorField};
pub use tensor4::{CoercivitySpectrum, ViscosityTensor};
