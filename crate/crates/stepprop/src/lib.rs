//! Real-time Feynman propagators for smooth (Woods-Saxon) and sharp
//! (Heaviside) step potentials, with the classical and complex saddles
//! that reconstruct them semiclassically.

pub mod caustics;
pub mod classical;
pub mod eigenstates;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod propagator;
pub mod quadrature;
pub mod specfun;
pub mod spectroscopy;
pub mod wkb;

pub use error::{Error, Result};
pub use potential::{Family, StepModel};
pub use specfun::C64;
