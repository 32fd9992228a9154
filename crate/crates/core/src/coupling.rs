//! Fiber coupling coefficient, computed two independent ways: the closed
//! Gaussian-integral form and a direct 2D quadrature of the mode-overlap
//! integral. The two routes agree up to one global constant (the
//! plane-wave input normalization left open by the diffraction prefactor),
//! so all cross-checks compare ratios, never absolute values.

use std::cell::{Cell, RefCell};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_polar, QuadratureSpec};
use crate::optics::OpticalSystem;

/// First positive root of J1; locates the first dark ring of the aperture
/// diffraction pattern at rho = root * d'/(kR).
pub const FIRST_J1_ROOT: f64 = 3.8317059702075123;

/// Closed-form coupling coefficient together with its exponent
/// diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct CouplingResult {
    /// Coupling coefficient, defined up to one global constant.
    pub beta: Complex64,
    /// Gaussian decay coefficient A_k (1/m²); positive for any physical
    /// geometry.
    pub a_k: f64,
    /// Phase-curvature coefficient B_k (1/m²).
    pub b_k: f64,
    /// Focusing parameter of the system at the degenerate wavenumber.
    pub y: f64,
}

/// Dimensionless focusing parameter `y = k*²w₀²R²/(2f²)`.
///
/// `y = 2` corresponds to a fiber-mode radius equal to the Rayleigh width
/// `fλ/(πR)` of the aperture diffraction pattern.
pub fn y_parameter(sys: &OpticalSystem) -> f64 {
    let t = sys.wavenumber_degenerate() * sys.fiber_mode_radius() * sys.aperture_radius()
        / sys.focal_length();
    0.5 * t * t
}

/// Closed form of the coupling coefficient at wavenumber `k`:
///
/// ```text
/// beta = (w₀²d'² + ikw₀⁴d') / (kd'w₀(d'² + k²w₀⁴))
///        · (1 - e^{(-A_k + iB_k)R²}) / (-A_k + iB_k)
/// A_k = k²w₀² / (2(d'² + k²w₀⁴))
/// B_k = (1/(2d') - 1/(2f))k - k³w₀⁴ / (2d'(d'² + k²w₀⁴))
/// ```
pub fn closed_form(sys: &OpticalSystem, k: f64) -> CouplingResult {
    assert!(k > 0.0 && k.is_finite(), "wavenumber must be positive");
    let w0 = sys.fiber_mode_radius();
    let d_image = sys.image_distance();
    let focal = sys.focal_length();
    let w0sq = w0 * w0;
    let w0q = w0sq * w0sq;
    let denom = d_image * d_image + k * k * w0q;

    let a_k = k * k * w0sq / (2.0 * denom);
    let b_k = (0.5 / d_image - 0.5 / focal) * k - k.powi(3) * w0q / (2.0 * d_image * denom);

    let z = Complex64::new(-a_k, b_k);
    let r_sq = sys.aperture_radius() * sys.aperture_radius();
    let prefactor =
        Complex64::new(w0sq * d_image * d_image, k * w0q * d_image) / (k * d_image * w0 * denom);
    let bracket = (Complex64::new(1.0, 0.0) - (z * r_sq).exp()) / z;

    CouplingResult {
        beta: prefactor * bracket,
        a_k,
        b_k,
        y: y_parameter(sys),
    }
}

/// Large-aperture limit of [`closed_form`]: as `A_k R² → ∞` the aperture
/// bracket saturates to `1/(-A_k + iB_k)`. Used to normalize the
/// coupling-product rate pipeline against its plateau.
pub fn closed_form_full_aperture(sys: &OpticalSystem, k: f64) -> Complex64 {
    assert!(k > 0.0 && k.is_finite(), "wavenumber must be positive");
    let w0 = sys.fiber_mode_radius();
    let d_image = sys.image_distance();
    let focal = sys.focal_length();
    let w0sq = w0 * w0;
    let w0q = w0sq * w0sq;
    let denom = d_image * d_image + k * k * w0q;

    let a_k = k * k * w0sq / (2.0 * denom);
    let b_k = (0.5 / d_image - 0.5 / focal) * k - k.powi(3) * w0q / (2.0 * d_image * denom);
    let z = Complex64::new(-a_k, b_k);
    let prefactor =
        Complex64::new(w0sq * d_image * d_image, k * w0q * d_image) / (k * d_image * w0 * denom);
    prefactor / z
}

/// Mode-overlap integral `∫∫ U_in(x,y) U_f(x,y) dx dy` by 2D polar
/// quadrature over the image plane. The fiber mode is real, so the
/// conjugation in the projection is vacuous (for complex fiber modes the
/// convention would matter).
///
/// The domain is truncated at `max(8w₀, 4 · first dark ring)`: past 8w₀
/// the fiber-mode envelope has fallen below e^{-32} ≈ 1.3e-14 of its peak
/// while the diffraction field stays bounded, so the discarded tail is
/// below 1e-13 of the integral. Internally the integrand is rescaled to
/// order one so the default tolerances remain meaningful for
/// mode-function magnitudes of order 1e-10 /m.
pub fn overlap_numeric(sys: &OpticalSystem, k: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let w0 = sys.fiber_mode_radius();
    let dark_ring = FIRST_J1_ROOT * sys.image_distance() / (k * sys.aperture_radius());
    let r_trunc = (8.0 * w0).max(4.0 * dark_ring);

    let on_axis = sys.incident_mode(k, 0.0, 0.0, spec)?;
    let scale = on_axis.norm() * sys.fiber_mode(0.0, 0.0);
    if !(scale > 0.0) {
        return Err(Error::InvalidInput {
            name: "overlap scale",
            reason: "on-axis incident field vanished; cannot normalize".into(),
        });
    }

    // The incident field depends on (x, y) only through the radius, so the
    // value can be reused across the angular nodes at a fixed radius.
    let memo: Cell<Option<(u64, Complex64)>> = Cell::new(None);
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let integrand = |u: f64, theta: f64| -> Complex64 {
        if failure.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        let r = u * r_trunc;
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let incident = match memo.get() {
            Some((bits, value)) if bits == u.to_bits() => value,
            _ => match sys.incident_mode(k, x, y, spec) {
                Ok(value) => {
                    memo.set(Some((u.to_bits(), value)));
                    value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    return Complex64::new(0.0, 0.0);
                }
            },
        };
        incident * (sys.fiber_mode(x, y) / scale)
    };

    let quad = integrate_polar(integrand, 1.0, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(quad?.value * scale * (r_trunc * r_trunc))
}
