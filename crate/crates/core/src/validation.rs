//! Cross-validation suite: runs every closed-form-vs-quadrature oracle and
//! invariant check against a concrete configuration, producing one record
//! per check for line-oriented reporting.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coupling::{closed_form, overlap_numeric, y_parameter, FIRST_J1_ROOT};
use crate::error::Result;
use crate::numerics::QuadratureSpec;
use crate::optics::{OpticalSystem, SourceParams};
use crate::pair_rate::{
    ab_coefficients, count_rate_closed, count_rate_full_numeric, count_rate_numeric,
    optimal_fiber_radius,
};

/// Outcome of a single named check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.measured - self.expected).abs() <= self.tolerance
    }
}

/// Full validation outcome: ordered checks plus any regime warnings.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    fn push(&mut self, name: &'static str, measured: f64, expected: f64, tolerance: f64) {
        self.checks.push(Check {
            name,
            measured,
            expected,
            tolerance,
        });
    }
}

/// Runs the whole oracle suite. Parameter-free checks (the saturation-law
/// figures and the binomial identity) ignore the configuration; the
/// quadrature oracles use its wavelength and focal length. When the
/// configured fiber radius leaves the paraxial regime
/// (`k*²w₀⁴/f² > 1e-2`) the closed-vs-spectral tolerance is widened
/// proportionally and a warning is recorded.
pub fn run_validation(
    sys: &OpticalSystem,
    src: &SourceParams,
    spec: &QuadratureSpec,
) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let k = sys.wavenumber_degenerate();

    // Saturation-law figure at the Rayleigh width (y = 2).
    report.push("rayleigh_width_rate", count_rate_closed(2.0), 0.5590, 5e-4);

    // Optimal-coupling rule: exact inversion at 95% of the plateau.
    let w95 = optimal_fiber_radius(sys, 0.95)?;
    let coefficient = w95 * std::f64::consts::PI * sys.aperture_radius()
        / (sys.focal_length() * sys.wavelength());
    let y95 = y_parameter(&sys.with_fiber_mode_radius(w95)?);
    report.push("optimal_rule_coefficient", coefficient, 1.477, 1e-3);
    report.push("optimal_rule_coefficient_rounded", coefficient, 1.5, 0.025);
    report.push("optimal_rule_y", y95, 4.363, 1e-3);
    report.push("optimal_rule_y_rounded", y95, 4.4, 0.04);

    // Binomial identity of the five-term exponential polynomial.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5bdc_0de5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let y: f64 = rng.gen_range(0.0..30.0);
        let five_term = 1.0 - 4.0 * (-y).exp() + 6.0 * (-2.0 * y).exp() - 4.0 * (-3.0 * y).exp()
            + (-4.0 * y).exp();
        worst = worst.max((five_term - count_rate_closed(y)).abs());
    }
    report.push("binomial_identity", worst, 0.0, 1e-12);

    // Coupling oracle: numeric overlap / closed form constant over a 5x5
    // grid of (w0, R) at d' = f.
    let grid_sys = sys.with_image_distance(sys.focal_length())?;
    let mut ratios = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            let w0 = 0.5e-6 + 3.5e-6 * (i as f64) / 4.0;
            let r_ap = 0.5e-3 + 3.5e-3 * (j as f64) / 4.0;
            let sys_ij = grid_sys
                .with_fiber_mode_radius(w0)?
                .with_aperture_radius(r_ap)?;
            let numeric = overlap_numeric(&sys_ij, k, spec)?;
            let closed = closed_form(&sys_ij, k).beta;
            ratios.push(numeric / closed);
        }
    }
    let mean_mod = ratios.iter().map(|r| r.norm()).sum::<f64>() / ratios.len() as f64;
    let mod_spread = ratios
        .iter()
        .map(|r| (r.norm() - mean_mod).abs() / mean_mod)
        .fold(0.0, f64::max);
    let phase0 = ratios[0].arg();
    let phase_spread = ratios
        .iter()
        .map(|r| (r.arg() - phase0).abs())
        .fold(0.0, f64::max);
    report.push("coupling_ratio_modulus_spread", mod_spread, 0.0, 1e-4);
    report.push("coupling_ratio_phase_spread", phase_spread, 0.0, 1e-3);

    // Rate oracle at the configured parameters, with the regime gate.
    let focal_sys = sys.with_image_distance(sys.focal_length())?;
    let paraxial = focal_sys.paraxial_validity(k);
    let mut rate_tol: f64 = 1e-3;
    if paraxial > 1e-2 {
        rate_tol = rate_tol.max(10.0 * paraxial);
        report.warnings.push(format!(
            "paraxial ratio k*^2 w0^4/f^2 = {paraxial:.3e} exceeds 1e-2; \
             closed-vs-spectral tolerance relaxed to {rate_tol:.3e}"
        ));
    }
    let ab = ab_coefficients(&focal_sys, src)?;
    let numeric = count_rate_numeric(&ab, src.bandwidth(), spec)?;
    let closed = count_rate_closed(y_parameter(&focal_sys));
    report.push(
        "rate_closed_vs_spectral",
        (numeric - closed).abs() / closed,
        0.0,
        rate_tol,
    );

    // Coupling-product pipeline across the fiber-radius range.
    let mut worst_full = 0.0f64;
    for i in 0..8 {
        let w0 = 0.5e-6 + 3.5e-6 * (i as f64) / 7.0;
        let sys_i = focal_sys.with_fiber_mode_radius(w0)?;
        let full = count_rate_full_numeric(&sys_i, src, spec)?;
        let closed_i = count_rate_closed(y_parameter(&sys_i));
        worst_full = worst_full.max((full - closed_i).abs() / closed_i);
    }
    report.push("rate_closed_vs_beta_product", worst_full, 0.0, 2e-2);

    // Collinear insensitivity: 10x pump waist and crystal length.
    let collinear = src.with_cone_angle(0.0)?;
    let base = count_rate_full_numeric(&focal_sys, &collinear, spec)?;
    let pump10 = count_rate_full_numeric(
        &focal_sys,
        &collinear.with_pump_waist(10.0 * src.pump_waist())?,
        spec,
    )?;
    let crystal10 = count_rate_full_numeric(
        &focal_sys,
        &collinear.with_crystal_length(10.0 * src.crystal_length())?,
        spec,
    )?;
    report.push(
        "collinear_pump_insensitivity",
        (pump10 - base).abs() / base,
        0.0,
        1e-6,
    );
    report.push(
        "collinear_crystal_insensitivity",
        (crystal10 - base).abs() / base,
        0.0,
        1e-6,
    );

    // Field sanity at the focal plane.
    let axial = focal_sys.incident_mode(k, 0.0, 0.0, spec)?.norm();
    let expect_axial = std::f64::consts::PI * focal_sys.aperture_radius().powi(2)
        / (k * focal_sys.focal_length());
    report.push(
        "axial_field_modulus",
        (axial - expect_axial).abs() / expect_axial,
        0.0,
        1e-9,
    );
    let dark_rho = FIRST_J1_ROOT * focal_sys.focal_length() / (k * focal_sys.aperture_radius());
    let dark = focal_sys.incident_mode(k, dark_rho, 0.0, spec)?.norm();
    report.push("first_dark_ring_contrast", dark / axial, 0.0, 1e-6);

    // Optimizer round trip and exact scaling laws.
    let mut worst_round_trip = 0.0f64;
    for target in [0.5, 0.9, 0.95, 0.99] {
        let w_opt = optimal_fiber_radius(sys, target)?;
        let y = y_parameter(&sys.with_fiber_mode_radius(w_opt)?);
        worst_round_trip = worst_round_trip.max((count_rate_closed(y) - target).abs());
    }
    report.push("optimizer_round_trip", worst_round_trip, 0.0, 1e-9);

    let w_ref = optimal_fiber_radius(sys, 0.95)?;
    let f2 = optimal_fiber_radius(&sys.with_focal_length(2.0 * sys.focal_length())?, 0.95)?;
    let l2 = optimal_fiber_radius(&sys.with_wavelength(2.0 * sys.wavelength())?, 0.95)?;
    let r2 = optimal_fiber_radius(&sys.with_aperture_radius(2.0 * sys.aperture_radius())?, 0.95)?;
    let scaling = (f2 / w_ref - 2.0)
        .abs()
        .max((l2 / w_ref - 2.0).abs())
        .max((r2 / w_ref - 0.5).abs());
    report.push("optimizer_scaling_laws", scaling, 0.0, 1e-14);

    Ok(report)
}
