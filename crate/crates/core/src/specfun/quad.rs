//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands on real
//! intervals and rays.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for ray integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn zero() -> Self {
        QuadratureResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 }
    }
}

impl std::ops::Add for QuadratureResult {
    type Output = QuadratureResult;
    fn add(self, rhs: Self) -> Self {
        QuadratureResult {
            value: self.value + rhs.value,
            error_estimate: self.error_estimate + rhs.error_estimate,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

// Kronrod 15-point nodes (non-negative half) and weights; Gauss 7-point weights
// sit on the odd-indexed Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        fv[j] = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j].0 - mean).norm() + (fv[j].1 - mean).norm());
    }
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value: kronrod * half, error: err }
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute tolerance.
    pub tol: f64,
    /// Relative tolerance; the target is max(tol, rel_tol·|value|).
    pub rel_tol: f64,
    pub max_evaluations: usize,
    /// Number of equal pieces the interval starts as.
    pub initial_pieces: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: DEFAULT_QUAD_TOL, rel_tol: 0.0, max_evaluations: 200_000, initial_pieces: 1 }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions { tol, ..Default::default() }
    }
}

/// Adaptive G7/K15 on the finite interval [a, b].
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integrate needs finite limits".into()));
    }
    if a == b {
        return Ok(QuadratureResult { evaluations: 1, ..QuadratureResult::zero() });
    }
    let pieces = opts.initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let seg = gk15(&f, lo, hi);
        evaluations += 15;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }
    loop {
        let target = opts.tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        if evaluations >= opts.max_evaluations {
            return Err(Error::NonConvergence { estimate: total_err, tol: target, evaluations });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::NonConvergence { estimate: total_err, tol: target, evaluations });
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // recompute sums to shed accumulated update roundoff
    let (value, error_estimate) = heap
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadratureResult { value, error_estimate, evaluations })
}

/// Options for [`integrate_ray`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RayOptions {
    pub quad: QuadOptions,
    /// Declared integrable endpoint behaviour t^{α-1} at the lower limit,
    /// α ∈ (0, 1]; triggers the substitution t = t_lo + u².
    pub endpoint_exponent: Option<f64>,
    /// Exponential decay rate of |f| at +∞; required for an infinite upper limit.
    pub decay_rate: Option<f64>,
}


impl RayOptions {
    pub fn with_tol(tol: f64) -> Self {
        RayOptions { quad: QuadOptions::with_tol(tol), ..Default::default() }
    }
}

/// ∫_{t_lo}^{t_hi} f(t) dt where `t_hi` may be `f64::INFINITY`.
///
/// An infinite upper limit is truncated where the caller-declared decay
/// e^{-rate·(t - t_lo)} falls below tol·1e-3.
pub fn integrate_ray<F>(f: F, t_lo: f64, t_hi: f64, opts: &RayOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(t_lo >= 0.0) || t_hi < t_lo {
        return Err(Error::Domain(format!("bad ray [{t_lo}, {t_hi}]")));
    }
    let (upper, truncation) = if t_hi.is_infinite() {
        let rate = opts
            .decay_rate
            .filter(|r| *r > 0.0)
            .ok_or_else(|| Error::Domain("infinite upper limit needs a positive decay rate".into()))?;
        let span = ((1e3 / opts.quad.tol).ln() / rate).max(1.0);
        (t_lo + span, opts.quad.tol * 1e-3)
    } else {
        (t_hi, 0.0)
    };
    let mut quad = opts.quad;
    if t_hi.is_infinite() && quad.initial_pieces < 8 {
        quad.initial_pieces = 8;
    }
    let mut result = match opts.endpoint_exponent {
        Some(alpha) => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::Domain(format!("endpoint exponent {alpha} outside (0, 1]")));
            }
            let u_hi = (upper - t_lo).sqrt();
            integrate(|u| f(t_lo + u * u) * (2.0 * u), 0.0, u_hi, &quad)?
        }
        None => integrate(&f, t_lo, upper, &quad)?,
    };
    result.error_estimate += truncation;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exponential_tail() {
        let opts = RayOptions { decay_rate: Some(1.0), ..RayOptions::with_tol(1e-13) };
        let r = integrate_ray(|t| c((-t).exp()), 1.0, f64::INFINITY, &opts).unwrap();
        assert!((r.value.re - (-1f64).exp()).abs() < 1e-12);
        assert!(r.error_estimate >= 0.0 && r.evaluations >= 1);
    }

    #[test]
    fn monomial() {
        let r = integrate_ray(c, 0.0, 1.0, &RayOptions::default()).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_with_declared_singularity() {
        let opts = RayOptions { endpoint_exponent: Some(0.5), ..RayOptions::with_tol(1e-13) };
        let r = integrate_ray(|t| c(1.0 / t.sqrt()), 0.0, 1.0, &opts).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_limit_without_rate_is_an_error() {
        let r = integrate_ray(|t| c((-t).exp()), 0.0, f64::INFINITY, &RayOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let opts = QuadOptions { tol: 1e-14, max_evaluations: 45, ..Default::default() };
        let r = integrate(|t: f64| c((50.0 * t).sin().abs()), 0.0, 3.0, &opts);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn oscillatory_complex() {
        // ∫_0^{2π} e^{3it} e^{-t} dt = (1 - e^{-2π}) / (1 - 3i)
        let opts = QuadOptions::with_tol(1e-13);
        let r = integrate(|t| Complex64::new(-t, 3.0 * t).exp(), 0.0, 2.0 * std::f64::consts::PI, &opts)
            .unwrap();
        let exact = (1.0 - (-2.0 * std::f64::consts::PI).exp()) / Complex64::new(1.0, -3.0);
        assert!((r.value - exact).norm() < 1e-13);
    }
}
