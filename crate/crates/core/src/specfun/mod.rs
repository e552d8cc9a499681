//! Special functions and quadrature shared by the analytic modules.

mod bernoulli;
mod gamma;
mod hankel;
mod hurwitz;
mod quad;

pub use bernoulli::{bernoulli_f64, bernoulli_numbers, MAX_BERNOULLI_INDEX};
pub use gamma::{cos_pi, digamma, gamma, nonpositive_integer, rgamma, sin_pi, EULER_GAMMA};
pub use hankel::{hankel_extrapolated, hankel_gamma_check, hankel_pieces, HankelPieces};
pub use hurwitz::hurwitz_zeta;
pub use quad::{
    integrate, integrate_ray, QuadOptions, QuadratureResult, RayOptions, DEFAULT_QUAD_TOL,
};

/// Default relative tolerance of the special-function kernels.
pub const DEFAULT_SPECFUN_TOL: f64 = 1e-12;
