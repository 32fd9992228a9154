//! Plain-text `key = value` run configuration.
//!
//! Keys carry their SI units in the name. `#` starts a comment, blank
//! lines are ignored, unknown or duplicate keys are rejected, and every
//! key except `image_distance_m` (defaults to the focal length),
//! `abs_tol`, `rel_tol` and `output_path` is required.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use spdc_coupling::{OpticalSystem, QuadratureSpec, SourceParams};

const NUMERIC_KEYS: &[&str] = &[
    "wavelength_m",
    "focal_length_m",
    "aperture_radius_m",
    "image_distance_m",
    "lens_distance_m",
    "fiber_mode_radius_m",
    "crystal_length_m",
    "pump_waist_m",
    "dispersion_coeff_s_per_m",
    "cone_angle_rad",
    "group_index",
    "bandwidth_rad_per_s",
    "abs_tol",
    "rel_tol",
];

const REQUIRED_KEYS: &[&str] = &[
    "wavelength_m",
    "focal_length_m",
    "aperture_radius_m",
    "lens_distance_m",
    "fiber_mode_radius_m",
    "crystal_length_m",
    "pump_waist_m",
    "dispersion_coeff_s_per_m",
    "cone_angle_rad",
    "group_index",
    "bandwidth_rad_per_s",
];

/// Parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: OpticalSystem,
    pub source: SourceParams,
    pub quadrature: QuadratureSpec,
    pub output_path: Option<PathBuf>,
    pub image_distance_defaulted: bool,
}

pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let mut numeric: HashMap<&str, f64> = HashMap::new();
    let mut output_path: Option<PathBuf> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();

        if key == "output_path" {
            if output_path.is_some() {
                return Err(format!("line {}: duplicate key output_path", lineno + 1));
            }
            if value.is_empty() {
                return Err(format!("line {}: empty output_path", lineno + 1));
            }
            output_path = Some(PathBuf::from(value));
            continue;
        }

        let canonical = NUMERIC_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| format!("line {}: unknown key `{key}`", lineno + 1))?;
        let parsed: f64 = value
            .parse()
            .map_err(|_| format!("line {}: invalid value for {key}: `{value}`", lineno + 1))?;
        if numeric.insert(canonical, parsed).is_some() {
            return Err(format!("line {}: duplicate key {key}", lineno + 1));
        }
    }

    for key in REQUIRED_KEYS {
        if !numeric.contains_key(key) {
            return Err(format!("missing required key: {key}"));
        }
    }

    let focal_length = numeric["focal_length_m"];
    let image_distance_defaulted = !numeric.contains_key("image_distance_m");
    let image_distance = *numeric.get("image_distance_m").unwrap_or(&focal_length);

    let system = OpticalSystem::new(
        numeric["wavelength_m"],
        focal_length,
        numeric["aperture_radius_m"],
        image_distance,
        numeric["lens_distance_m"],
        numeric["fiber_mode_radius_m"],
    )
    .map_err(|e| e.to_string())?;

    let source = SourceParams::new(
        numeric["crystal_length_m"],
        numeric["pump_waist_m"],
        numeric["dispersion_coeff_s_per_m"],
        numeric["cone_angle_rad"],
        numeric["group_index"],
        numeric["bandwidth_rad_per_s"],
    )
    .map_err(|e| e.to_string())?;

    let defaults = QuadratureSpec::default();
    let quadrature = QuadratureSpec::new(
        *numeric.get("abs_tol").unwrap_or(&defaults.abs_tol),
        *numeric.get("rel_tol").unwrap_or(&defaults.rel_tol),
        defaults.max_subdivisions,
    )
    .map_err(|e| e.to_string())?;

    Ok(RunConfig {
        system,
        source,
        quadrature,
        output_path,
        image_distance_defaulted,
    })
}
