//! Numerical laboratory for self-similar non-uniqueness in the forced 2D Euler
//! equations.
//!
//! The crate builds unstable radial vortices, computes their linearized
//! spectrum, evolves the self-similar perturbation equation on a periodic
//! box, and compares two weak solutions that share initial data and forcing.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod lab;
pub mod norms;
pub mod profiles;
pub mod quadrature;
pub mod scalar;
pub mod scaling;
pub mod spectral;

pub use error::{Error, Result};
pub use profiles::{
    build_class_c_profile, verify_class_c, BumpAmplitude, BumpShape, ClassCReport, ProfileParams,
    RadialVortexProfile,
};
pub use lab::{Lab, LabConfig};
pub use norms::{NormKind, NormSpec};
pub use scalar::Real;

/// The scaling family in double precision.
pub type Family = scaling::ScalingFamily<f64>;
pub type F64NormSpec = norms::NormSpec<f64>;
pub type F64Rearrangement = norms::Rearrangement<f64>;
