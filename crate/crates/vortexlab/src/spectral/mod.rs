//! Linearized spectrum of the radial vortices.
//!
//! The unstable eigenvalues `mu` solve `(R - mu)(-psi'' + m^2 psi) + A psi = 0`
//! in the log radius; the physical growth exponent is `lambda = -i m mu`.

pub mod greens;
pub mod grid;
pub mod hs;
pub mod moments;
pub mod operator;
pub mod pencil;
pub mod stream;
pub mod tridiag;

pub use greens::{greens_apply, greens_apply_complex};
pub use grid::SpectralGrid;
pub use hs::hs_norm_a_l;
pub use moments::{moment_functional, tail_fit, tail_slope, MomentTail, MomentVariant, TailFit};
pub use operator::{assemble_mode_operator, kappa_continuation, self_consistent_gamma, GammaMode, KappaTrajectory};
pub use pencil::{
    assemble_ode_eigenproblem, eigen_residual_integral, unstable_spectrum, EigenMode, Normalization, Pencil,
    SpectrumFilter,
};
pub use stream::{stream_from_vorticity, velocity_from_vorticity, RadialStream};
