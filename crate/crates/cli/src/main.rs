//! Command-line surface for the fiber-coupling calculations: closed-form
//! coupling diagnostics, rate-curve sweeps to CSV, fiber-radius
//! optimization, and the cross-validation suite.
//!
//! Exit codes: 0 success, 1 validation failure, 2 config/usage error,
//! 3 I/O error, 4 numerical failure.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spdc_coupling::coupling::{closed_form, y_parameter};
use spdc_coupling::pair_rate::{optimal_fiber_radius, sweep_rate_curve, RateCurve};
use spdc_coupling::validation::run_validation;
use spdc_coupling::Error as CoreError;

use config::{load_config, RunConfig};

#[derive(Parser)]
#[command(
    name = "spdc-coupling",
    version,
    about = "Coupling of collinear down-converted photon pairs into single-mode fibers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form coupling coefficient and its diagnostics.
    Coupling {
        /// Path to the `key = value` run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep fiber-mode radii and write the rate curve as CSV.
    Curve {
        #[arg(long)]
        config: PathBuf,
        /// Smallest fiber-mode radius (m).
        #[arg(long)]
        w0_min: f64,
        /// Largest fiber-mode radius (m).
        #[arg(long)]
        w0_max: f64,
        /// Number of grid rows (at least 2).
        #[arg(long)]
        steps: usize,
        /// Output CSV path; falls back to `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for the fiber-mode radius reaching a target rate fraction.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        /// Target fraction of the plateau count rate, in (0, 1).
        #[arg(long)]
        target: f64,
    },
    /// Run every closed-form-vs-quadrature cross-check and report results.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

enum CliError {
    /// Bad configuration or usage (exit 2).
    Config(String),
    /// Filesystem failure (exit 3).
    Io(String),
    /// Quadrature/root-finding failure (exit 4).
    Numeric(String),
    /// One or more validation checks failed (exit 1).
    ValidationFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::InvalidInput { .. } | CoreError::Configuration(_) => {
                CliError::Config(e.to_string())
            }
            CoreError::QuadratureNotConverged { .. } | CoreError::NoSignChange { .. } => {
                CliError::Numeric(e.to_string())
            }
            CoreError::SweepRow { source, .. } => match source.as_ref() {
                CoreError::InvalidInput { .. } | CoreError::Configuration(_) => {
                    CliError::Config(e.to_string())
                }
                _ => CliError::Numeric(e.to_string()),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Config(msg) | CliError::Io(msg) | CliError::Numeric(msg) => {
                    eprintln!("error: {msg}");
                }
                CliError::ValidationFailed => {}
            }
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Coupling { config } => cmd_coupling(&load(&config)?),
        Command::Curve {
            config,
            w0_min,
            w0_max,
            steps,
            out,
        } => cmd_curve(&load(&config)?, w0_min, w0_max, steps, out),
        Command::Optimize { config, target } => cmd_optimize(&load(&config)?, target),
        Command::Validate { config } => cmd_validate(&load(&config)?),
    }
}

fn load(path: &PathBuf) -> Result<RunConfig, CliError> {
    load_config(path).map_err(CliError::Config)
}

fn cmd_coupling(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = &cfg.system;
    let k = sys.wavenumber_degenerate();
    let result = closed_form(sys, k);
    let paraxial = sys.paraxial_validity(k);

    println!("beta_modulus    {:.11e}", result.beta.norm());
    println!("beta_phase_rad  {:.11e}", result.beta.arg());
    println!("a_k_per_m2      {:.11e}", result.a_k);
    println!("b_k_per_m2      {:.11e}", result.b_k);
    println!("y               {:.11e}", result.y);
    println!("paraxial_ratio  {:.11e}", paraxial);
    if cfg.image_distance_defaulted {
        println!("image_distance = focal_length (default)");
    }
    if paraxial > 1e-2 {
        eprintln!(
            "warning: paraxial ratio {paraxial:.3e} exceeds 1e-2; \
             the closed-form rate law is outside its regime"
        );
    }
    Ok(())
}

fn format_curve(curve: &RateCurve) -> String {
    let mut out = String::from("w0_m,y,c_closed,c_numeric,rel_err\n");
    for row in &curve.rows {
        out.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}\n",
            row.w0, row.y, row.c_closed, row.c_numeric, row.rel_err
        ));
    }
    out
}

fn cmd_curve(
    cfg: &RunConfig,
    w0_min: f64,
    w0_max: f64,
    steps: usize,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let out_path = out
        .or_else(|| cfg.output_path.clone())
        .ok_or_else(|| CliError::Config("no output path: pass --out or set output_path".into()))?;

    let curve = sweep_rate_curve(
        &cfg.system,
        &cfg.source,
        w0_min,
        w0_max,
        steps,
        &cfg.quadrature,
    )?;

    let mut file = std::fs::File::create(&out_path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_path.display())))?;
    file.write_all(format_curve(&curve).as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out_path.display())))?;
    println!("wrote {} rows to {}", curve.rows.len(), out_path.display());
    Ok(())
}

fn cmd_optimize(cfg: &RunConfig, target: f64) -> Result<(), CliError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(CliError::Config(format!(
            "target must lie strictly inside (0, 1), got {target}"
        )));
    }
    let sys = &cfg.system;
    let w0 = optimal_fiber_radius(sys, target)?;
    let y = y_parameter(&sys.with_fiber_mode_radius(w0)?);
    let coefficient = w0 * std::f64::consts::PI * sys.aperture_radius()
        / (sys.focal_length() * sys.wavelength());

    println!("target          {:.11e}", target);
    println!("y_target        {:.11e}", y);
    println!("w0_optimal_m    {:.11e}", w0);
    println!("coefficient     {:.11e}", coefficient);
    Ok(())
}

fn cmd_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let report = run_validation(&cfg.system, &cfg.source, &cfg.quadrature)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    for check in &report.checks {
        println!(
            "{} {} {:.11e} {:.11e} {:.3e}",
            check.name,
            if check.passed() { "pass" } else { "fail" },
            check.measured,
            check.expected,
            check.tolerance
        );
    }
    if report.all_passed() {
        println!("RESULT pass");
        Ok(())
    } else {
        println!("RESULT fail");
        Err(CliError::ValidationFailed)
    }
}
