//! Scalar special functions: Laguerre polynomials and their oscillatory
//! asymptotics, Kummer's Φ, complex Γ, Legendre polynomials, spherical
//! harmonics, and even Mathieu functions.

mod gamma;
mod hyper;
mod laguerre;
mod legendre;
mod mathieu;

pub use gamma::{gamma_complex, ln_gamma_complex};
pub use hyper::{hyp2f1_terminating, kummer_phi, kummer_phi_real};
pub use laguerre::{
    laguerre, laguerre_damped, laguerre_log, laguerre_oscillation_asym, laguerre_oscillation_at_theta,
    tricomi_a1, tricomi_window_error, LaguerreRegime, Regime, TricomiOrder, DELTA_EXPONENT,
};
pub use legendre::{legendre_p, spherical_harmonic};
pub use mathieu::{fix_zm_forward, fix_zm_inverse, mathieu_ce, MathieuEven};
