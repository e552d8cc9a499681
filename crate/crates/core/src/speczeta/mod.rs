//! Hurwitz-type spectral zeta functions ξ(s, z) = Σ_ρ (s - ρ)^{-z} of the
//! flow generator, their continuation in z, and zeta-regularized
//! determinants.
//!
//! Complex powers use the principal branch: λ^{-z} = |λ|^{-z} e^{-iz Arg λ},
//! -π < Arg λ ≤ π.
//!
//! The continuation splits the spectrum at ±T. Beyond the cutoff the sum is
//! the Mellin transform of a theta series,
//!
//! ```text
//! ξ^±(s, z) = e^{±iπz/2}/Γ(z) · ∫_0^∞ θ^±(t) t^{z-1} dt,
//! θ^+(t) = Σ_{Im ρ > T} e^{i(ρ - s)t},   θ^-(t) = Σ_{Im ρ < -T} e^{-i(ρ - s)t},
//! ```
//!
//! evaluated as ∫_1^∞ by quadrature, plus ∫_0^1 of θ minus its Laurent
//! expansion through t^{N-1}, plus the expansion integrated in closed form,
//! Σ_j d_j/(z + j - 1). The 1/Γ(z) prefactor cancels every pole of that sum
//! except z = 1, where ξ^± has residue ±i·a with a = Σ m/σ.

mod direct;
mod theta;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::{topological_entropy, MappingTorusModel};
use crate::specfun::{digamma, integrate_ray, nonpositive_integer, rgamma, RayOptions, EULER_GAMMA};
use crate::spectra::{model_spectra, truncate, ApSpectrum, Eigen, SpectrumSet, Truncation};

pub use direct::{xi_direct, xi_hurwitz, DEFAULT_DIRECT_CUTOFF, DEFAULT_DIRECT_MARGIN};
use theta::{Remainder, ThetaTerm, SERIES_LEN};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default Laurent subtraction order N.
pub const DEFAULT_ORDER: usize = 8;
/// Largest supported subtraction order.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiPath {
    DirectSeries,
    ThetaContinuation,
    HurwitzClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiEvaluation {
    pub value: Complex64,
    pub error_bound: f64,
    pub path: XiPath,
    pub s: Complex64,
    pub z: Complex64,
}

/// Small-t expansion V(t) ~ a/t + Σ_j (b_j + c_j t log t) t^j of the theta
/// series over Im ρ > T. `b[j]` is the coefficient of t^j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticExpansion {
    pub a: Complex64,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Spectral cutoff T; `None` picks [`SpectrumSet::default_cutoff`].
    pub cutoff: Option<f64>,
    /// Laurent subtraction order N.
    pub order: usize,
    /// Absolute quadrature tolerance, scaled by the size of the integrand.
    pub quad_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions { cutoff: None, order: DEFAULT_ORDER, quad_tol: 1e-14 }
    }
}

/// Whether the determinant carries the (1/2π) normalization of (s - Θ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetNormalization {
    #[default]
    Plain,
    TwoPi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

fn theta_terms(tr: &Truncation, s: Complex64, side: Side, with_extras: bool) -> Vec<ThetaTerm> {
    // upper: e^{i(ρ - s)t}; lower: e^{-i(ρ - s)t}
    let rot = I * side.sign();
    let (halves, extras) = match side {
        Side::Upper => (&tr.upper, &tr.upper_extras),
        Side::Lower => (&tr.lower, &tr.lower_extras),
    };
    halves
        .iter()
        .map(|h| ThetaTerm {
            weight: h.progression.multiplicity as f64,
            alpha: rot * (h.first() - s),
            spacing: Some(h.progression.spacing),
        })
        .chain(extras.iter().filter(|_| with_extras).map(|e| ThetaTerm {
            weight: e.multiplicity as f64,
            alpha: rot * (e.value - s),
            spacing: None,
        }))
        .collect()
}

fn resolve_cutoff(spec: &SpectrumSet, s: Complex64, opts: &ContinuationOptions) -> Result<f64> {
    let cutoff = opts.cutoff.unwrap_or_else(|| spec.default_cutoff(s));
    if s.im.abs() >= cutoff {
        return Err(Error::Constraint { im_s: s.im.abs(), cutoff });
    }
    Ok(cutoff)
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Domain(format!("expansion order must be in 1..={MAX_ORDER}, got {order}")));
    }
    Ok(())
}

/// V(t) = Σ_{Im ρ > T} e^{iρt}, summed in closed form per half-progression.
pub fn theta_series_v(spec: &SpectrumSet, cutoff: f64, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let tr = truncate(spec, cutoff)?;
    Ok(theta_terms(&tr, Complex64::new(0.0, 0.0), Side::Upper, true).iter().map(|term| term.eval(t)).sum())
}

/// Expansion of V(t) at t = 0 through t^order.
pub fn asymptotic_coefficients(spec: &SpectrumSet, cutoff: f64, order: usize) -> Result<AsymptoticExpansion> {
    check_order(order)?;
    let tr = truncate(spec, cutoff)?;
    let terms = theta_terms(&tr, Complex64::new(0.0, 0.0), Side::Upper, true);
    let mut d = vec![Complex64::new(0.0, 0.0); order + 2];
    for term in &terms {
        for (acc, v) in d.iter_mut().zip(term.laurent(order + 2)) {
            *acc += v;
        }
    }
    Ok(AsymptoticExpansion {
        a: d[0],
        b: d[1..].to_vec(),
        c: vec![Complex64::new(0.0, 0.0); order + 1],
        order,
    })
}

/// Pieces of one side's Mellin integral that do not depend on the prefactor.
struct SideIntegral {
    /// Laurent coefficients d_0..=d_N of θ (coefficient of t^{j-1}).
    d: Vec<Complex64>,
    /// Full Laurent series, for limits at z = -n beyond N.
    d_full: Vec<Complex64>,
    /// ∫_1^∞ θ t^{z-1} + ∫_0^1 (θ - expansion) t^{z-1}.
    regular: Complex64,
    error: f64,
}

fn side_integral(terms: &[ThetaTerm], z: Complex64, log_power: u32, opts: &ContinuationOptions) -> Result<SideIntegral> {
    let order = opts.order;
    let rem = Remainder::new(terms, order);
    let d = rem.subtracted();
    let d_full = {
        let mut acc = vec![Complex64::new(0.0, 0.0); SERIES_LEN];
        for c in &rem.coefs {
            for (a, v) in acc.iter_mut().zip(c) {
                *a += v;
            }
        }
        acc
    };
    if terms.is_empty() {
        return Ok(SideIntegral { d, d_full, regular: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let scale = d.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let tol = opts.quad_tol * scale;
    let zm1 = z - 1.0;
    let kernel = move |t: f64| {
        let lt = t.ln();
        let mut k = (zm1 * lt).exp();
        for _ in 0..log_power {
            k *= lt;
        }
        k
    };
    let rate = terms.iter().map(|t| t.decay_rate()).fold(f64::INFINITY, f64::min);
    let tail_opts = RayOptions { decay_rate: Some(rate), ..RayOptions::with_tol(tol) };
    let tail = integrate_ray(
        |t| terms.iter().map(|term| term.eval(t)).sum::<Complex64>() * kernel(t),
        1.0,
        f64::INFINITY,
        &tail_opts,
    )?;
    let mut head_opts = RayOptions::with_tol(tol);
    head_opts.quad.initial_pieces = 4;
    head_opts.endpoint_exponent = Some(0.5);
    let head = integrate_ray(|t| rem.eval(t) * kernel(t), 0.0, 1.0, &head_opts)?;
    Ok(SideIntegral {
        d,
        d_full,
        regular: tail.value + head.value,
        error: tail.error_estimate + head.error_estimate,
    })
}

fn prefactor(z: Complex64, side: Side) -> Complex64 {
    (I * (side.sign() * PI / 2.0) * z).exp() * rgamma(z)
}

fn check_z(z: Complex64, order: usize) -> Result<()> {
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(z));
    }
    if z.re <= 0.5 - order as f64 {
        return Err(Error::Domain(format!(
            "Re(z) = {} is outside the strip Re(z) > {} reached with order {order}",
            z.re,
            0.5 - order as f64
        )));
    }
    Ok(())
}

fn side_value(terms: &[ThetaTerm], s_side: Side, z: Complex64, opts: &ContinuationOptions) -> Result<(Complex64, f64)> {
    if terms.is_empty() {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let si = side_integral(terms, z, 0, opts)?;
    if let Some(n) = nonpositive_integer(z) {
        // P(z)·d_{n+1}/(z+n) → e^{∓iπn/2}(-1)^n n! d_{n+1}; everything else vanishes
        let n = n as usize;
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let phase = (I * (-s_side.sign() * PI / 2.0 * n as f64)).exp();
        let v = phase * sign * fact * si.d_full[n + 1];
        return Ok((v, 1e-15 * v.norm()));
    }
    let pre = prefactor(z, s_side);
    let closed: Complex64 = si.d.iter().enumerate().map(|(j, dj)| dj / (z + (j as f64 - 1.0))).sum();
    let closed_mag: f64 = si.d.iter().enumerate().map(|(j, dj)| (dj / (z + (j as f64 - 1.0))).norm()).sum();
    let value = pre * (closed + si.regular);
    let err = pre.norm() * (si.error + 1e-15 * (closed_mag + si.regular.norm()));
    Ok((value, err))
}

// Stray eigenvalues beyond the cutoff are summed with the finite part; their
// Mellin pieces would only reproduce (s - ρ)^{-z}.
fn finite_elements(tr: &Truncation) -> impl Iterator<Item = &Eigen> {
    tr.finite.elements.iter().chain(&tr.upper_extras).chain(&tr.lower_extras)
}

fn finite_sum(tr: &Truncation, s: Complex64, z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for e in finite_elements(tr) {
        let w = s - e.value;
        if w == Complex64::new(0.0, 0.0) {
            return Err(Error::Singular(s));
        }
        acc += (-z * w.ln()).exp() * e.multiplicity as f64;
    }
    Ok(acc)
}

/// The Im ρ > T component ξ^+(s, z) alone.
pub fn xi_plus(spec: &SpectrumSet, s: Complex64, z: Complex64, opts: &ContinuationOptions) -> Result<Complex64> {
    check_order(opts.order)?;
    check_z(z, opts.order)?;
    let cutoff = resolve_cutoff(spec, s, opts)?;
    let tr = truncate(spec, cutoff)?;
    Ok(side_value(&theta_terms(&tr, s, Side::Upper, false), Side::Upper, z, opts)?.0)
}

/// ξ(s, z) by the theta/Mellin continuation, valid for all z ≠ 1 with
/// Re z > 1/2 - N.
pub fn xi_continued(spec: &SpectrumSet, s: Complex64, z: Complex64, opts: &ContinuationOptions) -> Result<XiEvaluation> {
    check_order(opts.order)?;
    check_z(z, opts.order)?;
    let cutoff = resolve_cutoff(spec, s, opts)?;
    let tr = truncate(spec, cutoff)?;
    let (up, up_err) = side_value(&theta_terms(&tr, s, Side::Upper, false), Side::Upper, z, opts)?;
    let (lo, lo_err) = side_value(&theta_terms(&tr, s, Side::Lower, false), Side::Lower, z, opts)?;
    let fin = finite_sum(&tr, s, z)?;
    let value = up + lo + fin;
    Ok(XiEvaluation {
        value,
        error_bound: up_err + lo_err + 1e-15 * fin.norm(),
        path: XiPath::ThetaContinuation,
        s,
        z,
    })
}

/// ∂_z ξ(s, z) at z = 0 from the Laurent structure of each side:
/// P(z) = z + (γ ± iπ/2) z² + …, the integral has a simple pole d_1/z, so
/// ∂_z ξ^± = (γ ± iπ/2) d_1 + [regular part of the integral at 0].
pub fn xi_derivative_at_zero(spec: &SpectrumSet, s: Complex64, opts: &ContinuationOptions) -> Result<Complex64> {
    check_order(opts.order)?;
    let cutoff = resolve_cutoff(spec, s, opts)?;
    let tr = truncate(spec, cutoff)?;
    let mut total = Complex64::new(0.0, 0.0);
    for side in [Side::Upper, Side::Lower] {
        let terms = theta_terms(&tr, s, side, false);
        if terms.is_empty() {
            continue;
        }
        let si = side_integral(&terms, Complex64::new(0.0, 0.0), 0, opts)?;
        let closed: Complex64 = si
            .d
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != 1)
            .map(|(j, dj)| dj / (j as f64 - 1.0))
            .sum();
        let p2 = Complex64::new(EULER_GAMMA, side.sign() * PI / 2.0);
        total += p2 * si.d[1] + closed + si.regular;
    }
    for e in finite_elements(&tr) {
        let w = s - e.value;
        if w == Complex64::new(0.0, 0.0) {
            return Err(Error::Singular(s));
        }
        total -= w.ln() * e.multiplicity as f64;
    }
    Ok(total)
}

/// ∂_z ξ(s, z) for z away from 1 and the non-positive integers, using log
/// kernels in the quadratures and P'(z) = P(z)(±iπ/2 - ψ(z)).
pub fn xi_derivative(spec: &SpectrumSet, s: Complex64, z: Complex64, opts: &ContinuationOptions) -> Result<Complex64> {
    check_order(opts.order)?;
    check_z(z, opts.order)?;
    if z == Complex64::new(0.0, 0.0) {
        return xi_derivative_at_zero(spec, s, opts);
    }
    if nonpositive_integer(z).is_some() {
        return Err(Error::Domain(format!("derivative at z = {z} is not supported")));
    }
    let cutoff = resolve_cutoff(spec, s, opts)?;
    let tr = truncate(spec, cutoff)?;
    let psi = digamma(z)?;
    let mut total = Complex64::new(0.0, 0.0);
    for side in [Side::Upper, Side::Lower] {
        let terms = theta_terms(&tr, s, side, false);
        if terms.is_empty() {
            continue;
        }
        let plain = side_integral(&terms, z, 0, opts)?;
        let logged = side_integral(&terms, z, 1, opts)?;
        let pre = prefactor(z, side);
        let dpre = pre * (I * side.sign() * PI / 2.0 - psi);
        let closed: Complex64 = plain.d.iter().enumerate().map(|(j, dj)| dj / (z + (j as f64 - 1.0))).sum();
        let dclosed: Complex64 =
            plain.d.iter().enumerate().map(|(j, dj)| -dj / (z + (j as f64 - 1.0)).powi(2)).sum();
        total += dpre * (closed + plain.regular) + pre * (dclosed + logged.regular);
    }
    for e in finite_elements(&tr) {
        let w = s - e.value;
        if w == Complex64::new(0.0, 0.0) {
            return Err(Error::Singular(s));
        }
        let lw = w.ln();
        total -= lw * (-z * lw).exp() * e.multiplicity as f64;
    }
    Ok(total)
}

/// det_∞(s - Θ) = exp(-∂_z ξ(s, 0)).
pub fn det_infinity(spec: &SpectrumSet, s: Complex64, opts: &ContinuationOptions) -> Result<Complex64> {
    Ok((-xi_derivative_at_zero(spec, s, opts)?).exp())
}

/// det_∞ with an explicit normalization; the (1/2π)-scaled operator picks up
/// (2π)^{-ξ(s,0)}.
pub fn det_infinity_normalized(
    spec: &SpectrumSet,
    s: Complex64,
    norm: DetNormalization,
    opts: &ContinuationOptions,
) -> Result<Complex64> {
    let det = det_infinity(spec, s, opts)?;
    match norm {
        DetNormalization::Plain => Ok(det),
        DetNormalization::TwoPi => {
            let xi0 = xi_continued(spec, s, Complex64::new(0.0, 0.0), opts)?.value;
            Ok(det * (-xi0 * (2.0 * PI).ln()).exp())
        }
    }
}

/// Closed form of the regularized determinant of one progression,
/// (1 - e^{-2π(s - ρ0)/σ})^m, valid for Re(s - ρ0) > 0.
pub fn progression_det_closed_form(ap: &ApSpectrum, s: Complex64) -> Complex64 {
    let w = s - ap.base;
    let one_minus = 1.0 - (-(2.0 * PI / ap.spacing) * w).exp();
    one_minus.powi(ap.multiplicity as i32)
}

/// Minimum distance from s to any represented eigenvalue.
pub fn distance_to_spectrum(spec: &SpectrumSet, s: Complex64) -> f64 {
    let ap = spec.progressions.iter().map(|p| {
        let k = ((s.im - p.base.im) / p.spacing).round() as i64;
        (k - 1..=k + 1).map(|j| (s - p.eigenvalue(j)).norm()).fold(f64::INFINITY, f64::min)
    });
    let ex = spec.extras.iter().map(|e| (s - e.value).norm());
    ap.chain(ex).fold(f64::INFINITY, f64::min)
}

/// Points closer than this to a spectrum are rejected.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// The three determinants det_∞(s - Θ | degree p).
pub fn degree_determinants(model: &MappingTorusModel, s: Complex64, opts: &ContinuationOptions) -> Result<[Complex64; 3]> {
    let spectra = model_spectra(model)?;
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (o, spec) in out.iter_mut().zip(spectra.iter()) {
        if distance_to_spectrum(spec, s) < SINGULARITY_GUARD {
            return Err(Error::Singular(s));
        }
        *o = det_infinity(spec, s, opts)?;
    }
    Ok(out)
}

/// Π_p det_∞(s - Θ | H^p)^{(-1)^{p+1}} = det_1 / (det_0 · det_2).
pub fn alternating_det_product(model: &MappingTorusModel, s: Complex64, opts: &ContinuationOptions) -> Result<Complex64> {
    alternating_det_product_with(model, s, DetNormalization::Plain, opts)
}

pub fn alternating_det_product_with(
    model: &MappingTorusModel,
    s: Complex64,
    norm: DetNormalization,
    opts: &ContinuationOptions,
) -> Result<Complex64> {
    let h = topological_entropy(model);
    if !(s.re > h) {
        return Err(Error::Domain(format!("Re(s) = {} must exceed the entropy {h}", s.re)));
    }
    let [d0, d1, d2] = match norm {
        DetNormalization::Plain => degree_determinants(model, s, opts)?,
        DetNormalization::TwoPi => {
            let spectra = model_spectra(model)?;
            let mut out = [Complex64::new(0.0, 0.0); 3];
            for (o, spec) in out.iter_mut().zip(spectra.iter()) {
                if distance_to_spectrum(spec, s) < SINGULARITY_GUARD {
                    return Err(Error::Singular(s));
                }
                *o = det_infinity_normalized(spec, s, norm, opts)?;
            }
            out
        }
    };
    Ok(d1 / (d0 * d2))
}

/// Same assembly with each determinant replaced by its progression closed form.
pub fn alternating_closed_form_product(model: &MappingTorusModel, s: Complex64) -> Result<Complex64> {
    let spectra = model_spectra(model)?;
    let det = |spec: &SpectrumSet| -> Complex64 {
        spec.progressions.iter().map(|p| progression_det_closed_form(p, s)).product()
    };
    Ok(det(&spectra[1]) / (det(&spectra[0]) * det(&spectra[2])))
}
