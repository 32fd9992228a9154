//! Coupling of collinear type-I down-converted photon pairs into
//! single-mode optical fibers.
//!
//! The library evaluates the two mode functions whose overlap defines the
//! fiber coupling coefficient — the lens-image diffraction field of a
//! uniformly irradiated circular aperture and the Gaussian fiber mode —
//! and carries that coefficient through to the normalized two-photon
//! coincidence rate. Every closed-form expression is paired with an
//! independent quadrature route so the analytic results can be
//! cross-validated:
//!
//! * [`coupling::closed_form`] vs. [`coupling::overlap_numeric`] (the
//!   2D mode-overlap integral),
//! * [`pair_rate::count_rate_closed`] vs. [`pair_rate::count_rate_numeric`]
//!   (spectral integral of the two-photon amplitude) and
//!   [`pair_rate::count_rate_full_numeric`] (coupling-coefficient product
//!   pipeline).
//!
//! The headline design quantities are the focusing parameter
//! `y = k²w₀²R²/(2f²)`, the saturation law `C(y) = (1 - e^{-y})⁴`, and the
//! fiber-mode radius that reaches a requested fraction of the maximal
//! count rate ([`pair_rate::optimal_fiber_radius`]).

pub mod coupling;
pub mod error;
pub mod numerics;
pub mod optics;
pub mod pair_rate;
pub mod validation;

pub use coupling::CouplingResult;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{Quadrature, QuadratureSpec};
pub use optics::{OpticalSystem, SourceParams, SPEED_OF_LIGHT};
pub use pair_rate::{AbCoefficients, RateCurve, RateRow};
