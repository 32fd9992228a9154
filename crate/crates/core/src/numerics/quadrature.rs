//! Adaptive quadrature over real intervals with complex-valued integrands.
//!
//! The driver is a globally adaptive subdivision scheme built on the
//! 21-point Kronrod extension of 10-point Gauss-Legendre: each panel is
//! evaluated once with both embedded rules and the worst panel (by the
//! QUADPACK-style rescaled error) is bisected until the summed error bound
//! drops below `max(abs_tol, rel_tol * |estimate|)`.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target (scaled by the magnitude of the estimate).
    pub rel_tol: f64,
    /// Maximum number of panel bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::InvalidInput {
                name: "abs_tol",
                reason: format!("must be positive and finite, got {abs_tol}"),
            });
        }
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::InvalidInput {
                name: "rel_tol",
                reason: format!("must be positive and finite, got {rel_tol}"),
            });
        }
        if max_subdivisions < 1 {
            return Err(Error::InvalidInput {
                name: "max_subdivisions",
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

/// Converged integral estimate with its reported error bound.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

// Nodes and weights of the 21-point Kronrod rule with its embedded
// 10-point Gauss rule (positive abscissae; the last entry is the center).
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// QUADPACK error rescaling: sharpens the raw |K21 - G10| difference using
/// the integral of |f| (resabs) and of |f - mean| (resasc).
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss-Kronrod panel evaluation. Returns the Kronrod estimate and the
/// rescaled error bound, or an error if the integrand is non-finite.
fn gk21<F>(f: &F, lo: f64, hi: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];

    let f_center = f(center);
    let mut res_gauss = Complex64::new(0.0, 0.0);
    let mut res_kronrod = f_center * WGK21[10];
    let mut res_abs = res_kronrod.norm();

    // Odd Kronrod indices coincide with the Gauss abscissae.
    for (j, wg) in WG10.iter().enumerate() {
        let jtw = 2 * j + 1;
        let abscissa = half * XGK21[jtw];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let fsum = f1 + f2;
        res_gauss += fsum * *wg;
        res_kronrod += fsum * WGK21[jtw];
        res_abs += WGK21[jtw] * (f1.norm() + f2.norm());
    }
    for j in 0..5 {
        let jtw = 2 * j;
        let abscissa = half * XGK21[jtw];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_kronrod += (f1 + f2) * WGK21[jtw];
        res_abs += WGK21[jtw] * (f1.norm() + f2.norm());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK21[10] * (f_center - mean).norm();
    for j in 0..10 {
        res_asc += WGK21[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let err = ((res_kronrod - res_gauss) * half).norm();
    let value = res_kronrod * half;
    if !value.is_finite() {
        return Err(Error::InvalidInput {
            name: "integrand",
            reason: format!("non-finite value on [{lo}, {hi}]"),
        });
    }
    Ok((value, rescale_error(err, res_abs * half.abs(), res_asc * half.abs())))
}

struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[lo, hi]`, subdividing until the summed error bound
/// satisfies `max(abs_tol, rel_tol * |estimate|)`.
///
/// Deterministic for fixed inputs. Fails with
/// [`Error::QuadratureNotConverged`] (carrying the best estimate and its
/// bound) if the subdivision budget is exhausted.
pub fn integrate_1d<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput {
            name: "interval",
            reason: format!("need finite lo < hi, got [{lo}, {hi}]"),
        });
    }

    let (value, error) = gk21(&f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { lo, hi, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 0usize;

    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            return Ok(Quadrature {
                value: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }

        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval is at floating-point resolution: cannot refine further.
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        let (v1, e1) = gk21(&f, worst.lo, mid)?;
        let (v2, e2) = gk21(&f, mid, worst.hi)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Panel { lo: mid, hi: worst.hi, value: v2, error: e2 });
        subdivisions += 1;
    }
}

/// Real-valued convenience wrapper around [`integrate_1d`].
pub fn integrate_1d_real<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    integrate_1d(|x| Complex64::new(f(x), 0.0), lo, hi, spec)
}

/// Integrates `f(r, theta)` over the disk of radius `r_max`, including the
/// polar Jacobian: `∫_0^{r_max} ∫_0^{2π} f(r,θ) r dθ dr`.
///
/// The angular integral is evaluated adaptively at every radial node, so the
/// reported error bound adds a conservative `r_max²/2 * (worst inner bound)`
/// term for the nesting.
pub fn integrate_polar<F>(f: F, r_max: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> Complex64,
{
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidInput {
            name: "r_max",
            reason: format!("must be positive and finite, got {r_max}"),
        });
    }

    let inner_spec = QuadratureSpec {
        rel_tol: 0.5 * spec.rel_tol,
        ..*spec
    };
    let inner_failure = std::cell::RefCell::new(None);
    let worst_inner = std::cell::Cell::new(0.0f64);

    let radial = |r: f64| -> Complex64 {
        if inner_failure.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match integrate_1d(|theta| f(r, theta), 0.0, std::f64::consts::TAU, &inner_spec) {
            Ok(q) => {
                worst_inner.set(worst_inner.get().max(q.error_bound));
                q.value * r
            }
            Err(e) => {
                *inner_failure.borrow_mut() = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };

    let outer = integrate_1d(radial, 0.0, r_max, spec);
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let mut q = outer?;
    q.error_bound += 0.5 * r_max * r_max * worst_inner.get();
    Ok(q)
}

/// Radius at which a Gaussian envelope `exp(-(x/scale)^2)` falls to
/// `tail_floor` of its peak; used to truncate improper integrals.
pub fn gaussian_truncation_radius(scale: f64, tail_floor: f64) -> f64 {
    debug_assert!(scale > 0.0 && tail_floor > 0.0 && tail_floor < 1.0);
    scale * (-tail_floor.ln()).sqrt()
}

/// Relative level below which truncated Gaussian tails are discarded.
pub const GAUSSIAN_TAIL_FLOOR: f64 = 1e-18;
