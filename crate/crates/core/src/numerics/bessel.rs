//! Bessel functions of the first kind, orders zero and one.
//!
//! Backed by the libm ports of the classic FreeBSD routines; absolute
//! accuracy is a few ulp over the |x| <= 100 range the optics needs
//! (the angular reduction of the diffraction integral produces arguments
//! up to k·rho·R/d').

/// J0(x) for any finite x.
pub fn bessel_j0(x: f64) -> f64 {
    debug_assert!(x.is_finite());
    libm::j0(x)
}

/// J1(x) for any finite x.
pub fn bessel_j1(x: f64) -> f64 {
    debug_assert!(x.is_finite());
    libm::j1(x)
}
