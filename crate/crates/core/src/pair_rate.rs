//! Two-photon coincidence rate in the fiber pair, from the spectral
//! amplitude through to the closed saturation law and the fiber-radius
//! optimizer.
//!
//! All rates are normalized to the large-focusing plateau, so returned
//! values live in [0, 1) and absolute photon fluxes are out of scope. The
//! closed form is
//!
//! ```text
//! C(y) = 1 - 4e^{-y} + 6e^{-2y} - 4e^{-3y} + e^{-4y} = (1 - e^{-y})^4
//! ```
//!
//! with the focusing parameter `y = k*²w₀²R²/(2f²)`, and it is
//! cross-validated here against two quadrature pipelines: the spectral
//! integral of the two-photon amplitude (via the `a`, `b` exponent
//! coefficients) and the full coupling-coefficient product.

use num_complex::Complex64;

use crate::coupling::{closed_form, closed_form_full_aperture, y_parameter};
use crate::error::{Error, Result};
use crate::numerics::{
    find_root, integrate_1d, integrate_1d_real, QuadratureSpec, GAUSSIAN_TAIL_FLOOR,
};
use crate::optics::{OpticalSystem, SourceParams};

/// Exponent coefficients of the spectral two-photon amplitude: the
/// aperture bracket at the degenerate wavenumber (`a`, dimensionless) and
/// its first-order dispersion derivative (`b`, seconds).
#[derive(Debug, Clone, Copy)]
pub struct AbCoefficients {
    pub a: Complex64,
    pub b: Complex64,
}

/// One sweep sample: fiber-mode radius, focusing parameter, closed-form
/// and numeric rates, and their relative discrepancy.
#[derive(Debug, Clone, Copy)]
pub struct RateRow {
    pub w0: f64,
    pub y: f64,
    pub c_closed: f64,
    pub c_numeric: f64,
    pub rel_err: f64,
}

/// Tabulated rate curve, sorted strictly increasing in `w0`.
#[derive(Debug, Clone)]
pub struct RateCurve {
    pub rows: Vec<RateRow>,
}

/// Transverse pump spectral factor
/// `exp(-¼ w_p² ν² (ω₁-ω₂)² sin²θ*)`, in (0, 1]. Identically one in the
/// collinear geometry (θ* = 0) and at degenerate frequencies.
pub fn pump_spectral_factor(src: &SourceParams, omega1: f64, omega2: f64) -> f64 {
    let spread = src.pump_waist() * src.dispersion_coeff() * (omega1 - omega2)
        * src.cone_angle().sin();
    (-0.25 * spread * spread).exp()
}

/// Longitudinal phase-matching factor `sinc(Δ_kz · d/2)` for a crystal of
/// length `d`; unity at perfect phase matching.
pub fn phase_matching_sinc(delta_kz: f64, crystal_length: f64) -> f64 {
    assert!(crystal_length > 0.0, "crystal length must be positive");
    let u = 0.5 * delta_kz * crystal_length;
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

fn require_focal_plane(sys: &OpticalSystem) -> Result<()> {
    if sys.image_distance() != sys.focal_length() {
        return Err(Error::Configuration(format!(
            "fiber must sit in the focal plane: image_distance = {} m but focal_length = {} m",
            sys.image_distance(),
            sys.focal_length()
        )));
    }
    Ok(())
}

/// Exponent coefficients with the fiber in the focal plane (d' = f),
/// derived exactly from the closed coupling form:
///
/// * `a = (-A_k + iB_k) R²` at the degenerate wavenumber `k*`,
/// * `b = d/dx [(-A_k(x) + iB_k(x)) R²]` at `x = 0`, with the first-order
///   dispersion expansion `k(x) = k* + n_g x / c`, evaluated analytically.
///
/// In the paraxial regime `k*²w₀⁴ ≪ f²` these reduce to `Re a = -y`,
/// `Re b = -k* w₀² n_g R²/(c f²)` and `Im b = -3 n_g k*² w₀⁴ R²/(2c f³)`.
pub fn ab_coefficients(sys: &OpticalSystem, src: &SourceParams) -> Result<AbCoefficients> {
    require_focal_plane(sys)?;
    let k = sys.wavenumber_degenerate();
    let focal = sys.focal_length();
    let w0sq = sys.fiber_mode_radius().powi(2);
    let w0q = w0sq * w0sq;
    let r_sq = sys.aperture_radius().powi(2);
    let denom = focal * focal + k * k * w0q;

    let a_k = k * k * w0sq / (2.0 * denom);
    let b_k = -k.powi(3) * w0q / (2.0 * focal * denom);
    let a = Complex64::new(-a_k, b_k) * r_sq;

    let da_dk = k * w0sq * focal * focal / (denom * denom);
    let db_dk = -k * k * w0q * (3.0 * focal * focal + k * k * w0q) / (2.0 * focal * denom * denom);
    let dispersion = src.group_index() / src.light_speed();
    let b = Complex64::new(-da_dk, db_dk) * (r_sq * dispersion);

    Ok(AbCoefficients { a, b })
}

/// Variant of [`ab_coefficients`] with one factor of the degenerate
/// wavenumber removed from `a` and from `Im b`:
///
/// ```text
/// a = (-k*w₀²/(2f²) - i k*w₀⁴/(2f³)) R²
/// b = (-k*w₀²n_g/(cf²) - i 3n_g k*w₀⁴/(2cf³)) R²
/// ```
///
/// Kept for comparison studies only; the main pipeline uses the exact
/// derivation, which is the one consistent with the `C(y)` saturation law.
pub fn ab_coefficients_compat(sys: &OpticalSystem, src: &SourceParams) -> Result<AbCoefficients> {
    require_focal_plane(sys)?;
    let k = sys.wavenumber_degenerate();
    let focal = sys.focal_length();
    let w0sq = sys.fiber_mode_radius().powi(2);
    let w0q = w0sq * w0sq;
    let r_sq = sys.aperture_radius().powi(2);
    let f2 = focal * focal;
    let f3 = f2 * focal;

    let a = Complex64::new(-k * w0sq / (2.0 * f2), -k * w0q / (2.0 * f3)) * r_sq;
    let ng_c = src.group_index() / src.light_speed();
    let b = Complex64::new(
        -k * w0sq * ng_c / f2,
        -1.5 * k * w0q * ng_c / f3,
    ) * r_sq;
    Ok(AbCoefficients { a, b })
}

/// Spectral two-photon amplitude at detection-time difference `tau`:
///
/// ```text
/// A(τ) = ∫ e^{-ixτ} e^{-x²/Δ²} (1 - e^{a + bx})² dx
/// ```
///
/// over the detuning `x`, truncated where the Gaussian filter falls below
/// [`GAUSSIAN_TAIL_FLOOR`] of its peak.
pub fn pair_amplitude(
    ab: &AbCoefficients,
    bandwidth: f64,
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::InvalidInput {
            name: "bandwidth",
            reason: format!("must be positive and finite, got {bandwidth}"),
        });
    }
    // Integrate in s = x/Δ so panel values are order one.
    let s_max = (-GAUSSIAN_TAIL_FLOOR.ln()).sqrt();
    let quad = integrate_1d(
        |s| {
            let x = s * bandwidth;
            let bracket = Complex64::new(1.0, 0.0) - (ab.a + ab.b * x).exp();
            Complex64::new(-s * s, -x * tau).exp() * bracket * bracket
        },
        -s_max,
        s_max,
        spec,
    )?;
    Ok(quad.value * bandwidth)
}

/// Normalized pair count rate from the spectral amplitude pipeline:
/// the detector window is much longer than the photon coherence time, so
/// the τ-integrated squared amplitude collapses (Parseval) to
///
/// ```text
/// C = ∫ e^{-2x²/Δ²} |1 - e^{a + bx}|⁴ dx / (Δ√(π/2))
/// ```
///
/// where the denominator is the deep-coupling limit (a → -∞, b → 0), so
/// the result lies in [0, 1).
pub fn count_rate_numeric(
    ab: &AbCoefficients,
    bandwidth: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::InvalidInput {
            name: "bandwidth",
            reason: format!("must be positive and finite, got {bandwidth}"),
        });
    }
    let s_max = (-GAUSSIAN_TAIL_FLOOR.ln() / 2.0).sqrt();
    let quad = integrate_1d_real(
        |s| {
            let bracket = Complex64::new(1.0, 0.0) - (ab.a + ab.b * (s * bandwidth)).exp();
            let sq = bracket.norm_sqr();
            (-2.0 * s * s).exp() * sq * sq
        },
        -s_max,
        s_max,
        spec,
    )?;
    Ok(quad.value.re / (0.5 * std::f64::consts::PI).sqrt())
}

/// Closed saturation law `C(y) = (1 - e^{-y})⁴`, normalized so the
/// `y → ∞` plateau is one. Equal to the five-term exponential polynomial
/// `1 - 4e^{-y} + 6e^{-2y} - 4e^{-3y} + e^{-4y}` by the binomial theorem.
pub fn count_rate_closed(y: f64) -> f64 {
    assert!(y >= 0.0, "focusing parameter must be non-negative");
    let base = 1.0 - (-y).exp();
    base.powi(4)
}

/// Fiber-mode radius reaching `target_fraction` of the plateau rate:
/// solves `C(y) = t` by bisection (analytically `y = -ln(1 - t^{1/4})`)
/// and maps back through `w₀ = √(2y)·f/(k*R)`.
///
/// The result is exactly linear in focal length and wavelength and
/// inversely proportional to the aperture radius.
pub fn optimal_fiber_radius(sys: &OpticalSystem, target_fraction: f64) -> Result<f64> {
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(Error::InvalidInput {
            name: "target_fraction",
            reason: format!("must lie strictly inside (0, 1), got {target_fraction}"),
        });
    }
    let y = find_root(
        |y| count_rate_closed(y) - target_fraction,
        0.0,
        64.0,
        1e-11,
    )?;
    Ok((2.0 * y).sqrt() * sys.focal_length()
        / (sys.wavenumber_degenerate() * sys.aperture_radius()))
}

/// Tabulates closed vs. numeric rates over a uniform grid of fiber-mode
/// radii. Numerical failures are reported with the offending row attached.
pub fn sweep_rate_curve(
    sys: &OpticalSystem,
    src: &SourceParams,
    w0_min: f64,
    w0_max: f64,
    steps: usize,
    spec: &QuadratureSpec,
) -> Result<RateCurve> {
    if !(w0_min > 0.0 && w0_min < w0_max) || !w0_min.is_finite() || !w0_max.is_finite() {
        return Err(Error::InvalidInput {
            name: "sweep range",
            reason: format!("need 0 < w0_min < w0_max, got [{w0_min}, {w0_max}]"),
        });
    }
    if steps < 2 {
        return Err(Error::InvalidInput {
            name: "steps",
            reason: format!("need at least 2, got {steps}"),
        });
    }
    require_focal_plane(sys)?;

    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let fraction = i as f64 / (steps - 1) as f64;
        let w0 = w0_min + (w0_max - w0_min) * fraction;
        let row = (|| -> Result<RateRow> {
            let sys_i = sys.with_fiber_mode_radius(w0)?;
            let y = y_parameter(&sys_i);
            let c_closed = count_rate_closed(y);
            let ab = ab_coefficients(&sys_i, src)?;
            let c_numeric = count_rate_numeric(&ab, src.bandwidth(), spec)?;
            Ok(RateRow {
                w0,
                y,
                c_closed,
                c_numeric,
                rel_err: (c_numeric - c_closed).abs() / c_closed,
            })
        })()
        .map_err(|e| Error::SweepRow {
            index: i,
            w0,
            source: Box::new(e),
        })?;
        rows.push(row);
    }
    Ok(RateCurve { rows })
}

/// Independent rate oracle that bypasses the `a`, `b` expansion entirely:
/// the coupling coefficients of signal and idler are evaluated at
/// `k(±x) = k* ± n_g x/c` from the closed form, multiplied with the pump
/// spectral factor at the configured cone angle and the phase-matching
/// sinc at zero mismatch, and integrated against the squared Gaussian
/// filter. Normalized by the same construction with both coupling factors
/// replaced by their large-aperture plateau.
pub fn count_rate_full_numeric(
    sys: &OpticalSystem,
    src: &SourceParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    require_focal_plane(sys)?;
    let k_star = sys.wavenumber_degenerate();
    let bandwidth = src.bandwidth();
    let dispersion = src.group_index() / src.light_speed();
    let s_max = (-GAUSSIAN_TAIL_FLOOR.ln() / 2.0).sqrt();
    if k_star - dispersion * bandwidth * s_max <= 0.0 {
        return Err(Error::InvalidInput {
            name: "bandwidth",
            reason: "detuning range reaches non-positive wavenumbers".into(),
        });
    }

    let weight = |s: f64, plateau: bool| -> f64 {
        let x = s * bandwidth;
        let mut product = Complex64::new(1.0, 0.0);
        for sign in [1.0, -1.0] {
            let k = k_star + sign * dispersion * x;
            product *= if plateau {
                closed_form_full_aperture(sys, k)
            } else {
                closed_form(sys, k).beta
            };
        }
        // Pump factor at frequencies ω* ± x: only the difference 2x enters.
        let pump = pump_spectral_factor(src, x, -x);
        let sinc = phase_matching_sinc(0.0, src.crystal_length());
        (-2.0 * s * s).exp() * product.norm_sqr() * (pump * pump) * (sinc * sinc)
    };

    // Normalize each integrand by its center value to keep panel sums at
    // order one (the raw |β|⁴ magnitudes sit near 1e-68 in SI units).
    let center_full = weight(0.0, false);
    let center_plateau = weight(0.0, true);
    if !(center_full > 0.0 && center_plateau > 0.0) {
        return Err(Error::InvalidInput {
            name: "rate integrand",
            reason: "vanishing center weight; cannot normalize".into(),
        });
    }
    let numerator = integrate_1d_real(|s| weight(s, false) / center_full, -s_max, s_max, spec)?;
    let denominator =
        integrate_1d_real(|s| weight(s, true) / center_plateau, -s_max, s_max, spec)?;
    Ok(numerator.value.re / denominator.value.re * (center_full / center_plateau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn default_system() -> OpticalSystem {
        OpticalSystem::new(0.8e-6, 0.01, 0.002, 0.01, 0.05, 1.885e-6).unwrap()
    }

    fn default_source() -> SourceParams {
        SourceParams::new(1e-3, 1e-4, 1e-9, 0.0, 1.6, 1e12).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn pump_factor_is_unity_when_collinear() {
        let src = default_source();
        assert_eq!(pump_spectral_factor(&src, 2.356e15, 2.358e15), 1.0);
    }

    #[test]
    fn pump_factor_is_unity_at_degeneracy() {
        let src = default_source()
            .with_cone_angle(std::f64::consts::FRAC_PI_4)
            .unwrap();
        assert_eq!(pump_spectral_factor(&src, 2.356e15, 2.356e15), 1.0);
    }

    #[test]
    fn pump_factor_reference_value() {
        // w_p = 1e-4, ν = 1e-9, ω₁-ω₂ = 1e12, θ* = π/2 → exp(-2.5e-3).
        let src = default_source()
            .with_cone_angle(std::f64::consts::FRAC_PI_2)
            .unwrap();
        let got = pump_spectral_factor(&src, 1e12, 0.0);
        assert!((got - 0.9975031223974601).abs() < 1e-12);
    }

    #[test]
    fn sinc_special_values() {
        assert_eq!(phase_matching_sinc(0.0, 1e-3), 1.0);
        // Δ·d/2 = π: first zero.
        let d = 1e-3;
        let delta = 2.0 * std::f64::consts::PI / d;
        assert!(phase_matching_sinc(delta, d).abs() < 1e-15);
        // Δ·d/2 = π/2 → 2/π.
        let half = std::f64::consts::PI / d;
        assert!((phase_matching_sinc(half, d) - 0.6366197723675814).abs() < 1e-14);
    }

    #[test]
    fn ab_coefficients_reference_values() {
        let ab = ab_coefficients(&default_system(), &default_source()).unwrap();
        // Frozen from 25-digit evaluation of the exact derivative form.
        assert!((ab.a.re - (-4.383581497984781)).abs() < 1e-12);
        assert!((ab.a.im - (-0.012233245057917829)).abs() < 1e-14);
        assert!((ab.b.re - (-5.9575143480573896e-15)).abs() < 1e-27);
        assert!((ab.b.im - (-2.493848540906794e-17)).abs() < 1e-29);
    }

    #[test]
    fn ab_real_part_tracks_negative_y() {
        let sys = default_system();
        let ab = ab_coefficients(&sys, &default_source()).unwrap();
        let y = y_parameter(&sys);
        assert!(((-ab.a.re) - y).abs() / y < 1e-5);
        // Paraxial form of Re b: -2y n_g/(c k*).
        let approx = -2.0 * y * 1.6 / (crate::optics::SPEED_OF_LIGHT * sys.wavenumber_degenerate());
        assert!((ab.b.re - approx).abs() / approx.abs() < 1e-4);
    }

    #[test]
    fn ab_vanishes_with_fiber_radius() {
        let sys = default_system().with_fiber_mode_radius(1e-10).unwrap();
        let ab = ab_coefficients(&sys, &default_source()).unwrap();
        assert!(ab.a.norm() < 1e-7);
        assert!(ab.b.norm() < 1e-22);
    }

    #[test]
    fn ab_requires_focal_plane() {
        let sys = default_system().with_image_distance(0.011).unwrap();
        assert!(matches!(
            ab_coefficients(&sys, &default_source()),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn compat_form_differs_by_one_wavenumber_factor() {
        let sys = default_system();
        let src = default_source();
        let k = sys.wavenumber_degenerate();
        let exact = ab_coefficients(&sys, &src).unwrap();
        let compat = ab_coefficients_compat(&sys, &src).unwrap();
        // Paraxially: Re a gains k*, Im a gains k*², Re b is unchanged,
        // Im b gains k*.
        assert!((k * compat.a.re - exact.a.re).abs() / exact.a.re.abs() < 1e-4);
        assert!((k * k * compat.a.im - exact.a.im).abs() / exact.a.im.abs() < 1e-4);
        assert!((compat.b.re - exact.b.re).abs() / exact.b.re.abs() < 1e-4);
        assert!((k * compat.b.im - exact.b.im).abs() / exact.b.im.abs() < 1e-4);
    }

    #[test]
    fn amplitude_factorizes_without_dispersion() {
        // b = 0, τ = 0 → √π Δ (1 - e^a)².
        let ab0 = AbCoefficients {
            a: Complex64::new(-4.383581497984781, -0.012233245057917829),
            b: Complex64::new(0.0, 0.0),
        };
        let bandwidth = 1e12;
        let got = pair_amplitude(&ab0, bandwidth, 0.0, &spec()).unwrap();
        let bracket = Complex64::new(1.0, 0.0) - ab0.a.exp();
        let expect = std::f64::consts::PI.sqrt() * bandwidth * bracket * bracket;
        assert!((got - expect).norm() < 1e-10 * expect.norm());
    }

    #[test]
    fn amplitude_deep_coupling_is_gaussian_transform() {
        // a → -∞, b = 0 → √π Δ e^{-Δ²τ²/4}.
        let ab = AbCoefficients {
            a: Complex64::new(-1e3, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let bandwidth = 1e12;
        let tau = 2e-12;
        let got = pair_amplitude(&ab, bandwidth, tau, &spec()).unwrap();
        let expect = std::f64::consts::PI.sqrt()
            * bandwidth
            * (-bandwidth * bandwidth * tau * tau / 4.0).exp();
        assert!((got.re - expect).abs() < 1e-9 * expect);
        assert!(got.im.abs() < 1e-9 * expect);
        // Frozen cross-check of the magnitude.
        assert!((got.re - 652049332173.2922).abs() < 1e-2);
    }

    #[test]
    fn amplitude_dispersion_correction_is_small_at_defaults() {
        let sys = default_system();
        let src = default_source();
        let ab = ab_coefficients(&sys, &src).unwrap();
        let with_b = pair_amplitude(&ab, src.bandwidth(), 0.0, &spec()).unwrap();
        let without_b = pair_amplitude(
            &AbCoefficients { a: ab.a, b: Complex64::new(0.0, 0.0) },
            src.bandwidth(),
            0.0,
            &spec(),
        )
        .unwrap();
        let rel = (with_b.norm() - without_b.norm()).abs() / without_b.norm();
        assert!(rel < 1e-2, "rel = {rel}");
        // Frozen modulus from 25-digit quadrature.
        assert!((with_b.norm() - 1728490362893.114).abs() < 1.0);
    }

    #[test]
    fn rate_without_dispersion_is_closed_bracket() {
        let ab = AbCoefficients {
            a: Complex64::new(-1.7, 0.4),
            b: Complex64::new(0.0, 0.0),
        };
        let got = count_rate_numeric(&ab, 1e12, &spec()).unwrap();
        let expect = (Complex64::new(1.0, 0.0) - ab.a.exp()).norm_sqr().powi(2);
        assert!((got - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn rate_vanishes_at_zero_coupling() {
        let ab = AbCoefficients {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        assert_eq!(count_rate_numeric(&ab, 1e12, &spec()).unwrap(), 0.0);
        // With the physical dispersion coefficient the rate stays tiny.
        let ab_b = AbCoefficients {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(-5.96e-15, -2.49e-17),
        };
        assert!(count_rate_numeric(&ab_b, 1e12, &spec()).unwrap() < 1e-8);
    }

    #[test]
    fn rate_matches_closed_form_at_defaults() {
        let sys = default_system();
        let src = default_source();
        let ab = ab_coefficients(&sys, &src).unwrap();
        let numeric = count_rate_numeric(&ab, src.bandwidth(), &spec()).unwrap();
        let closed = count_rate_closed(y_parameter(&sys));
        assert!((numeric - closed).abs() / closed < 1e-3);
        // Frozen independent quadrature of the same integral.
        assert!((numeric - 0.9510079576214967).abs() < 1e-8);
    }

    #[test]
    fn rate_reduces_to_closed_as_dispersion_vanishes() {
        let sys = default_system();
        let ab = ab_coefficients(&sys, &default_source()).unwrap();
        let y = y_parameter(&sys);
        let forced = AbCoefficients {
            a: Complex64::new(-y, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let numeric = count_rate_numeric(&forced, 1e12, &spec()).unwrap();
        let closed = count_rate_closed(y);
        assert!((numeric - closed).abs() / closed < 1e-8);
        drop(ab);
    }

    #[test]
    fn closed_rate_reference_values() {
        assert_eq!(count_rate_closed(0.0), 0.0);
        assert!((count_rate_closed(2.0) - 0.5589731543071914).abs() < 1e-15);
        assert!((count_rate_closed(4.4) - 0.9517876591539687).abs() < 1e-15);
        assert!(count_rate_closed(1e4) <= 1.0);
    }

    #[test]
    fn optimizer_reference_targets() {
        let sys = default_system();
        let w95 = optimal_fiber_radius(&sys, 0.95).unwrap();
        let coefficient = w95 * std::f64::consts::PI * sys.aperture_radius()
            / (sys.focal_length() * sys.wavelength());
        assert!((w95 - 1.8805395540252528e-6).abs() < 1e-14);
        assert!((coefficient - 1.47697231192769).abs() < 1e-7);

        // The Rayleigh-width rate maps back to exactly the Rayleigh width.
        let target = count_rate_closed(2.0);
        let w_back = optimal_fiber_radius(&sys, target).unwrap();
        let rayleigh =
            sys.focal_length() * sys.wavelength() / (std::f64::consts::PI * sys.aperture_radius());
        assert!((w_back - rayleigh).abs() < 1e-9 * rayleigh);

        let w99 = optimal_fiber_radius(&sys, 0.99).unwrap();
        let coefficient99 = w99 * std::f64::consts::PI * sys.aperture_radius()
            / (sys.focal_length() * sys.wavelength());
        assert!((coefficient99 - 1.7302744893272351).abs() < 1e-7);
    }

    #[test]
    fn optimizer_shrinks_with_target() {
        let sys = default_system();
        let w_small = optimal_fiber_radius(&sys, 1e-6).unwrap();
        let w_mid = optimal_fiber_radius(&sys, 1e-3).unwrap();
        let w_half = optimal_fiber_radius(&sys, 0.5).unwrap();
        assert!(w_small < w_mid && w_mid < w_half);
        assert!(w_small < 0.2 * w_half);
    }

    #[test]
    fn optimizer_rejects_out_of_range_targets() {
        let sys = default_system();
        for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(optimal_fiber_radius(&sys, bad).is_err(), "target {bad}");
        }
    }

    #[test]
    fn sweep_is_monotone_and_accurate() {
        let sys = default_system();
        let src = default_source();
        let curve = sweep_rate_curve(&sys, &src, 0.5e-6, 4e-6, 8, &spec()).unwrap();
        assert_eq!(curve.rows.len(), 8);
        for pair in curve.rows.windows(2) {
            assert!(pair[1].w0 > pair[0].w0);
            assert!(pair[1].c_closed > pair[0].c_closed);
        }
        let worst = curve.rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
        assert!(worst < 1e-2, "worst rel_err = {worst}");
    }

    #[test]
    fn sweep_interpolates_rayleigh_width_rate() {
        let sys = default_system();
        let src = default_source();
        let rayleigh =
            sys.focal_length() * sys.wavelength() / (std::f64::consts::PI * sys.aperture_radius());
        let curve = sweep_rate_curve(&sys, &src, 1.0e-6, 1.6e-6, 61, &spec()).unwrap();
        let after = curve
            .rows
            .iter()
            .position(|r| r.w0 >= rayleigh)
            .expect("grid spans the Rayleigh width");
        let (lo, hi) = (&curve.rows[after - 1], &curve.rows[after]);
        let t = (rayleigh - lo.w0) / (hi.w0 - lo.w0);
        let interpolated = lo.c_closed + t * (hi.c_closed - lo.c_closed);
        assert!(
            (interpolated - 0.559).abs() < 1e-3,
            "interpolated = {interpolated}"
        );
    }

    #[test]
    fn sweep_validates_inputs() {
        let sys = default_system();
        let src = default_source();
        let s = spec();
        assert!(sweep_rate_curve(&sys, &src, 0.0, 1e-6, 4, &s).is_err());
        assert!(sweep_rate_curve(&sys, &src, 2e-6, 1e-6, 4, &s).is_err());
        assert!(sweep_rate_curve(&sys, &src, 1e-6, 2e-6, 1, &s).is_err());
        let off_focus = sys.with_image_distance(0.02).unwrap();
        assert!(matches!(
            sweep_rate_curve(&off_focus, &src, 1e-6, 2e-6, 4, &s),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn sweep_tags_failing_row() {
        let sys = default_system();
        let src = default_source();
        let hopeless = QuadratureSpec::new(1e-300, 1e-300, 2).unwrap();
        let err = sweep_rate_curve(&sys, &src, 1e-6, 2e-6, 4, &hopeless).unwrap_err();
        match err {
            Error::SweepRow { index, w0, source } => {
                assert_eq!(index, 0);
                assert!((w0 - 1e-6).abs() < 1e-18);
                assert!(matches!(*source, Error::QuadratureNotConverged { .. }));
            }
            other => panic!("expected SweepRow, got {other:?}"),
        }
    }

    #[test]
    fn full_pipeline_matches_closed_form() {
        let sys = default_system();
        let src = default_source();
        let full = count_rate_full_numeric(&sys, &src, &spec()).unwrap();
        let closed = count_rate_closed(y_parameter(&sys));
        assert!((full - closed).abs() / closed < 2e-2);
        // Frozen from 25-digit quadrature of the same construction.
        assert!((full - 0.951007971954945).abs() < 1e-7);
    }

    #[test]
    fn full_pipeline_tracks_rayleigh_doubling() {
        let sys = default_system();
        let src = default_source();
        let s = spec();
        let rayleigh =
            sys.focal_length() * sys.wavelength() / (std::f64::consts::PI * sys.aperture_radius());
        let at = count_rate_full_numeric(&sys.with_fiber_mode_radius(rayleigh).unwrap(), &src, &s)
            .unwrap();
        let doubled = count_rate_full_numeric(
            &sys.with_fiber_mode_radius(2.0 * rayleigh).unwrap(),
            &src,
            &s,
        )
        .unwrap();
        let expect = count_rate_closed(8.0) / count_rate_closed(2.0);
        assert!(((doubled / at) - expect).abs() / expect < 2e-2);
    }

    #[test]
    fn full_pipeline_ignores_pump_and_crystal_when_collinear() {
        let sys = default_system();
        let src = default_source();
        let s = spec();
        let base = count_rate_full_numeric(&sys, &src, &s).unwrap();
        let wide_pump = src.with_pump_waist(1e-3).unwrap();
        let long_crystal = src.with_crystal_length(1e-2).unwrap();
        let a = count_rate_full_numeric(&sys, &wide_pump, &s).unwrap();
        let b = count_rate_full_numeric(&sys, &long_crystal, &s).unwrap();
        assert!((a - base).abs() / base < 1e-6);
        assert!((b - base).abs() / base < 1e-6);
    }

    proptest! {
        #[test]
        fn binomial_identity(y in 0.0f64..30.0) {
            let five_term = 1.0 - 4.0 * (-y).exp() + 6.0 * (-2.0 * y).exp()
                - 4.0 * (-3.0 * y).exp() + (-4.0 * y).exp();
            prop_assert!((five_term - count_rate_closed(y)).abs() < 1e-12);
        }

        #[test]
        fn closed_rate_is_monotone_and_bounded(
            y1 in 1e-3f64..30.0,
            delta in 1e-3f64..5.0,
        ) {
            let (c1, c2) = (count_rate_closed(y1), count_rate_closed(y1 + delta));
            prop_assert!(c1 >= 0.0 && c1 < 1.0);
            prop_assert!(c2 > c1);
        }

        #[test]
        fn ab_real_part_is_negative(
            w0 in 0.5e-6..5e-6f64,
            focal in 5e-3..5e-2f64,
            r_ap in 0.5e-3..5e-3f64,
        ) {
            let sys = OpticalSystem::new(0.8e-6, focal, r_ap, focal, 0.05, w0).unwrap();
            let ab = ab_coefficients(&sys, &default_source()).unwrap();
            prop_assert!(ab.a.re < 0.0);
        }

        #[test]
        fn optimizer_round_trip(t in 0.01f64..0.995) {
            let sys = default_system();
            let w_opt = optimal_fiber_radius(&sys, t).unwrap();
            let y = y_parameter(&sys.with_fiber_mode_radius(w_opt).unwrap());
            prop_assert!((count_rate_closed(y) - t).abs() < 1e-9);
        }
    }
}
