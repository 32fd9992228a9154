//! Optical geometry and source parameters, and the two mode functions the
//! coupling coefficient overlaps: the lens-image diffraction field of a
//! uniformly irradiated circular aperture and the Gaussian fiber mode.
//!
//! Units are SI throughout; both mode functions carry 1/m so that 2D
//! overlap integrals over the transverse plane are dimensionless.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{bessel_j0, integrate_1d, QuadratureSpec};

/// Vacuum speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidInput {
            name,
            reason: format!("must be positive and finite, got {value}"),
        });
    }
    Ok(())
}

fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::InvalidInput {
            name,
            reason: format!("must be non-negative and finite, got {value}"),
        });
    }
    Ok(())
}

/// Lens/aperture/fiber geometry and the degenerate wavenumber.
///
/// `wavelength` is the in-medium value; the degenerate wavenumber
/// `k* = 2π/λ` is derived on construction and kept consistent by the
/// `with_*` builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSystem {
    wavelength: f64,
    wavenumber_degenerate: f64,
    focal_length: f64,
    aperture_radius: f64,
    image_distance: f64,
    lens_distance: f64,
    fiber_mode_radius: f64,
}

impl OpticalSystem {
    /// `image_distance` is lens-to-image-plane (d'), `lens_distance` is
    /// crystal-center-to-lens (d, a global phase only).
    pub fn new(
        wavelength: f64,
        focal_length: f64,
        aperture_radius: f64,
        image_distance: f64,
        lens_distance: f64,
        fiber_mode_radius: f64,
    ) -> Result<Self> {
        require_positive("wavelength", wavelength)?;
        require_positive("focal_length", focal_length)?;
        require_positive("aperture_radius", aperture_radius)?;
        require_positive("image_distance", image_distance)?;
        require_positive("lens_distance", lens_distance)?;
        require_positive("fiber_mode_radius", fiber_mode_radius)?;
        Ok(Self {
            wavelength,
            wavenumber_degenerate: std::f64::consts::TAU / wavelength,
            focal_length,
            aperture_radius,
            image_distance,
            lens_distance,
            fiber_mode_radius,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// k* = 2π/λ (rad/m).
    pub fn wavenumber_degenerate(&self) -> f64 {
        self.wavenumber_degenerate
    }

    pub fn focal_length(&self) -> f64 {
        self.focal_length
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }

    pub fn image_distance(&self) -> f64 {
        self.image_distance
    }

    pub fn lens_distance(&self) -> f64 {
        self.lens_distance
    }

    pub fn fiber_mode_radius(&self) -> f64 {
        self.fiber_mode_radius
    }

    pub fn with_fiber_mode_radius(&self, w0: f64) -> Result<Self> {
        require_positive("fiber_mode_radius", w0)?;
        Ok(Self {
            fiber_mode_radius: w0,
            ..*self
        })
    }

    pub fn with_focal_length(&self, f: f64) -> Result<Self> {
        require_positive("focal_length", f)?;
        Ok(Self {
            focal_length: f,
            ..*self
        })
    }

    pub fn with_aperture_radius(&self, r: f64) -> Result<Self> {
        require_positive("aperture_radius", r)?;
        Ok(Self {
            aperture_radius: r,
            ..*self
        })
    }

    pub fn with_image_distance(&self, d_image: f64) -> Result<Self> {
        require_positive("image_distance", d_image)?;
        Ok(Self {
            image_distance: d_image,
            ..*self
        })
    }

    /// Rebuilds the system at a new wavelength, rederiving k*.
    pub fn with_wavelength(&self, wavelength: f64) -> Result<Self> {
        require_positive("wavelength", wavelength)?;
        Ok(Self {
            wavelength,
            wavenumber_degenerate: std::f64::consts::TAU / wavelength,
            ..*self
        })
    }

    /// Gaussian fiber mode `(1/(w₀√π)) exp(-(x²+y²)/(2w₀²))`, L²-normalized
    /// over the transverse plane (1/m).
    pub fn fiber_mode(&self, x: f64, y: f64) -> f64 {
        let w0 = self.fiber_mode_radius;
        (-(x * x + y * y) / (2.0 * w0 * w0)).exp() / (w0 * std::f64::consts::PI.sqrt())
    }

    /// Diffraction field at the image plane for a plane wave of wavenumber
    /// `k` filling the aperture:
    ///
    /// ```text
    /// U(x,y) = (1/(ikd')) e^{ik(d'+d)} e^{ik ρ²/(2d')}
    ///          · 2π ∫_0^R r J0(kρr/d') e^{i(k/(2d') - k/(2f)) r²} dr
    /// ```
    ///
    /// with ρ = √(x²+y²); the angular integration has been done in closed
    /// form (it reduces to J0). The radial integral is evaluated
    /// adaptively in the normalized variable r/R so the default tolerances
    /// act relative to the aperture area.
    pub fn incident_mode(
        &self,
        k: f64,
        x: f64,
        y: f64,
        spec: &QuadratureSpec,
    ) -> Result<Complex64> {
        require_positive("wavenumber", k)?;
        let d_image = self.image_distance;
        let radius = self.aperture_radius;
        let rho = x.hypot(y);
        let bessel_scale = k * rho * radius / d_image;
        let curvature = 0.5 * k * (1.0 / d_image - 1.0 / self.focal_length) * radius * radius;

        let radial = integrate_1d(
            |u| {
                let phase = Complex64::new(0.0, curvature * u * u).exp();
                phase * (bessel_j0(bessel_scale * u) * u)
            },
            0.0,
            1.0,
            spec,
        )?;

        let prefactor = Complex64::new(0.0, -1.0) / (k * d_image)
            * Complex64::new(0.0, k * (d_image + self.lens_distance)).exp()
            * Complex64::new(0.0, 0.5 * k * rho * rho / d_image).exp();
        Ok(prefactor * std::f64::consts::TAU * radius * radius * radial.value)
    }

    /// Regime ratio `k²w₀⁴/f²`; the closed-form count rate assumes this is
    /// far below one, and callers are expected to warn when it exceeds
    /// about 1e-2.
    pub fn paraxial_validity(&self, k: f64) -> f64 {
        let w0sq = self.fiber_mode_radius * self.fiber_mode_radius;
        let ratio = k * w0sq / self.focal_length;
        ratio * ratio
    }
}

/// Crystal, pump, and dispersion parameters of the photon-pair source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    crystal_length: f64,
    pump_waist: f64,
    dispersion_coeff: f64,
    cone_angle: f64,
    group_index: f64,
    bandwidth: f64,
    light_speed: f64,
}

impl SourceParams {
    /// `dispersion_coeff` is the first-order dispersion coefficient (s/m),
    /// `cone_angle` the emission cone angle relative to the pump axis
    /// (rad, 0 = collinear), `bandwidth` the spectral width of the filters
    /// selecting the down-converted light (rad/s).
    pub fn new(
        crystal_length: f64,
        pump_waist: f64,
        dispersion_coeff: f64,
        cone_angle: f64,
        group_index: f64,
        bandwidth: f64,
    ) -> Result<Self> {
        require_positive("crystal_length", crystal_length)?;
        require_positive("pump_waist", pump_waist)?;
        require_non_negative("dispersion_coeff", dispersion_coeff)?;
        require_non_negative("cone_angle", cone_angle)?;
        require_positive("group_index", group_index)?;
        require_positive("bandwidth", bandwidth)?;
        Ok(Self {
            crystal_length,
            pump_waist,
            dispersion_coeff,
            cone_angle,
            group_index,
            bandwidth,
            light_speed: SPEED_OF_LIGHT,
        })
    }

    pub fn crystal_length(&self) -> f64 {
        self.crystal_length
    }

    pub fn pump_waist(&self) -> f64 {
        self.pump_waist
    }

    pub fn dispersion_coeff(&self) -> f64 {
        self.dispersion_coeff
    }

    pub fn cone_angle(&self) -> f64 {
        self.cone_angle
    }

    pub fn group_index(&self) -> f64 {
        self.group_index
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Fixed at the vacuum value.
    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }

    pub fn with_crystal_length(&self, d: f64) -> Result<Self> {
        require_positive("crystal_length", d)?;
        Ok(Self {
            crystal_length: d,
            ..*self
        })
    }

    pub fn with_pump_waist(&self, wp: f64) -> Result<Self> {
        require_positive("pump_waist", wp)?;
        Ok(Self {
            pump_waist: wp,
            ..*self
        })
    }

    pub fn with_cone_angle(&self, theta: f64) -> Result<Self> {
        require_non_negative("cone_angle", theta)?;
        Ok(Self {
            cone_angle: theta,
            ..*self
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_polar;
    use num_complex::Complex64;
    use proptest::prelude::*;

    pub(crate) fn default_system() -> OpticalSystem {
        OpticalSystem::new(0.8e-6, 0.01, 0.002, 0.01, 0.05, 1.885e-6).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn construction_derives_wavenumber() {
        let sys = default_system();
        assert_eq!(
            sys.wavenumber_degenerate(),
            std::f64::consts::TAU / 0.8e-6
        );
        assert!((sys.wavenumber_degenerate() - 7.853981633974483e6).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_positive_lengths() {
        assert!(OpticalSystem::new(0.0, 0.01, 0.002, 0.01, 0.05, 1.9e-6).is_err());
        assert!(OpticalSystem::new(0.8e-6, 0.01, -0.002, 0.01, 0.05, 1.9e-6).is_err());
        assert!(OpticalSystem::new(0.8e-6, 0.01, 0.002, 0.01, 0.05, 0.0).is_err());
        assert!(default_system().with_fiber_mode_radius(f64::NAN).is_err());
    }

    #[test]
    fn fiber_mode_peak_value() {
        let sys = default_system().with_fiber_mode_radius(2e-6).unwrap();
        // 1/(2e-6 √π)
        assert!((sys.fiber_mode(0.0, 0.0) - 282094.79177387815).abs() < 1e-6);
    }

    #[test]
    fn fiber_mode_waist_ratio() {
        let sys = default_system();
        let w0 = sys.fiber_mode_radius();
        let ratio = sys.fiber_mode(w0, 0.0) / sys.fiber_mode(0.0, 0.0);
        assert!((ratio - (-0.5f64).exp()).abs() < 1e-14);
        assert!((ratio - 0.6065306597126334).abs() < 1e-12);
    }

    #[test]
    fn fiber_mode_is_square_normalized() {
        let sys = default_system();
        let w0 = sys.fiber_mode_radius();
        let norm = integrate_polar(
            |r, theta| {
                let (x, y) = (r * theta.cos(), r * theta.sin());
                let u = sys.fiber_mode(x, y);
                Complex64::new(u * u, 0.0)
            },
            10.0 * w0,
            &spec(),
        )
        .unwrap();
        assert!((norm.value.re - 1.0).abs() < 1e-9, "norm = {}", norm.value.re);
    }

    #[test]
    fn incident_mode_on_axis_focal_plane() {
        // At d' = f the quadratic phase cancels and the on-axis modulus is
        // the aperture area over kf: πR²/(kf).
        let sys = default_system();
        let k = sys.wavenumber_degenerate();
        let u0 = sys.incident_mode(k, 0.0, 0.0, &spec()).unwrap();
        let expect = std::f64::consts::PI * 0.002 * 0.002 / (k * 0.01);
        assert!(
            (u0.norm() - expect).abs() < 1e-9 * expect,
            "got {}, expected {}",
            u0.norm(),
            expect
        );
        assert!((expect - 1.6e-10).abs() < 1e-22);
    }

    #[test]
    fn incident_mode_first_dark_ring() {
        let sys = default_system();
        let k = sys.wavenumber_degenerate();
        let axial = sys.incident_mode(k, 0.0, 0.0, &spec()).unwrap().norm();
        let rho = 3.8317059702075123 * sys.focal_length() / (k * sys.aperture_radius());
        let dark = sys.incident_mode(k, rho, 0.0, &spec()).unwrap().norm();
        assert!(dark < 1e-6 * axial, "dark/axial = {}", dark / axial);
    }

    #[test]
    fn incident_mode_matches_reference_point() {
        // Frozen from 25-digit quadrature of the same integral.
        let sys = default_system();
        let k = sys.wavenumber_degenerate();
        let u = sys.incident_mode(k, 1e-6, 0.0, &spec()).unwrap();
        assert!((u.norm() - 1.154724551845501e-10).abs() < 1e-19);
    }

    #[test]
    fn incident_mode_defocused_reference_point() {
        let sys = default_system().with_image_distance(0.012).unwrap();
        let k = sys.wavenumber_degenerate();
        let u = sys.incident_mode(k, 1.5e-6, 0.0, &spec()).unwrap();
        assert!(
            (u.norm() - 5.822927848076620e-13).abs() < 1e-20,
            "got {}",
            u.norm()
        );
    }

    #[test]
    fn incident_mode_agrees_with_direct_polar_quadrature() {
        // Independent route: evaluate the aperture integral as a full 2D
        // polar quadrature without the Bessel reduction.
        let tight = QuadratureSpec::new(1e-24, 1e-11, 20_000).unwrap();
        for (sys, x, y) in [
            (default_system(), 1.0e-6, 0.5e-6),
            (default_system(), 0.0, 2.0e-6),
            (default_system().with_image_distance(0.012).unwrap(), 1.5e-6, -0.7e-6),
        ] {
            let k = sys.wavenumber_degenerate();
            let d_image = sys.image_distance();
            let curvature = 0.5 * k * (1.0 / d_image - 1.0 / sys.focal_length());
            let direct = integrate_polar(
                |r, th| {
                    let transverse = k * r * (x * th.cos() + y * th.sin()) / d_image;
                    Complex64::new(0.0, curvature * r * r - transverse).exp()
                },
                sys.aperture_radius(),
                &tight,
            )
            .unwrap();
            let prefactor = Complex64::new(0.0, -1.0) / (k * d_image)
                * Complex64::new(0.0, k * (d_image + sys.lens_distance())).exp()
                * Complex64::new(0.0, 0.5 * k * (x * x + y * y) / d_image).exp();
            let reference = prefactor * direct.value;
            let bessel_route = sys.incident_mode(k, x, y, &spec()).unwrap();
            let rel = (bessel_route - reference).norm() / reference.norm();
            assert!(rel < 1e-8, "routes disagree by {rel}");
        }
    }

    #[test]
    fn incident_modulus_ignores_lens_distance() {
        let near = default_system();
        let far = OpticalSystem::new(0.8e-6, 0.01, 0.002, 0.01, 0.083, 1.885e-6).unwrap();
        let k = near.wavenumber_degenerate();
        let a = near.incident_mode(k, 1.3e-6, 0.4e-6, &spec()).unwrap();
        let b = far.incident_mode(k, 1.3e-6, 0.4e-6, &spec()).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-12 * a.norm());
        assert!((a - b).norm() > 0.0, "phases must differ");
    }

    #[test]
    fn paraxial_validity_default() {
        let sys = default_system();
        let ratio = sys.paraxial_validity(sys.wavenumber_degenerate());
        assert!((ratio - 7.78798633634730e-6).abs() < 1e-16);
    }

    #[test]
    fn paraxial_validity_vanishes_with_fiber_radius() {
        let sys = default_system().with_fiber_mode_radius(1e-12).unwrap();
        assert!(sys.paraxial_validity(sys.wavenumber_degenerate()) < 1e-30);
    }

    #[test]
    fn paraxial_validity_quartic_scaling() {
        let sys = default_system();
        let quad = sys.with_fiber_mode_radius(4.0 * sys.fiber_mode_radius()).unwrap();
        let k = sys.wavenumber_degenerate();
        let ratio = quad.paraxial_validity(k) / sys.paraxial_validity(k);
        assert!((ratio - 256.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn incident_modulus_is_radially_symmetric(
            rho in 1e-8f64..6e-6,
            theta1 in 0.0f64..std::f64::consts::TAU,
            theta2 in 0.0f64..std::f64::consts::TAU,
        ) {
            let sys = default_system();
            let k = sys.wavenumber_degenerate();
            let s = spec();
            let a = sys
                .incident_mode(k, rho * theta1.cos(), rho * theta1.sin(), &s)
                .unwrap()
                .norm();
            let b = sys
                .incident_mode(k, rho * theta2.cos(), rho * theta2.sin(), &s)
                .unwrap()
                .norm();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(b).max(1e-300));
        }
    }
}
