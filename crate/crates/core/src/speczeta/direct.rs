//! Direct summation of ξ(s, z) and the Hurwitz closed form for AP spectra.

use num_complex::Complex64;

use super::{XiEvaluation, XiPath};
use crate::error::{Error, Result};
use crate::specfun::{bernoulli_f64, hurwitz_zeta};
use crate::spectra::{truncate, Direction, HalfProgression, SpectrumSet};

/// Default spectral window |Im ρ| ≤ K of the explicit sum.
pub const DEFAULT_DIRECT_CUTOFF: f64 = 200.0;
/// Required distance of Re z above the abscissa 1.
pub const DEFAULT_DIRECT_MARGIN: f64 = 0.5;

const TAIL_TERMS: usize = 8;

fn principal_pow(w: Complex64, z: Complex64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(Error::Singular(w));
    }
    Ok((-z * w.ln()).exp())
}

/// Σ_{j≥0} (w0 + c j)^{-z} by Euler–Maclaurin, with c = ∓iσ. Returns the
/// value and the size of the last correction as an error estimate.
fn half_tail(half: &HalfProgression, s: Complex64, z: Complex64) -> (Complex64, f64) {
    let sigma = half.progression.spacing;
    let c = match half.direction {
        Direction::Up => Complex64::new(0.0, -sigma),
        Direction::Down => Complex64::new(0.0, sigma),
    };
    let w0 = s - half.first();
    let lw = w0.ln();
    let pow = |e: Complex64| (e * lw).exp();
    let integral = pow(1.0 - z) / ((z - 1.0) * c);
    let mut value = integral + pow(-z) / 2.0;
    // h^{(m)}(0) = (-z)_m↓ c^m w0^{-z-m}
    let mut falling = Complex64::new(1.0, 0.0);
    let mut cm = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    let mut last = 0.0;
    for m in 1..=2 * TAIL_TERMS {
        falling *= -z - (m as f64 - 1.0);
        cm *= c;
        fact *= m as f64;
        if m % 2 == 1 {
            let b = bernoulli_f64(m + 1);
            let deriv = falling * cm * pow(-z - m as f64);
            let term = deriv * (b / (fact * (m + 1) as f64));
            value -= term;
            last = term.norm();
        }
    }
    let m = half.progression.multiplicity as f64;
    (value * m, last * m)
}

/// ξ(s, z) = Σ_ρ (s - ρ)^{-z} for Re z ≥ 1 + margin: explicit terms with
/// |Im ρ| ≤ K and an Euler–Maclaurin sum for each half-progression beyond.
pub fn xi_direct(spec: &SpectrumSet, s: Complex64, z: Complex64, cutoff: Option<f64>) -> Result<XiEvaluation> {
    if z.re < 1.0 + DEFAULT_DIRECT_MARGIN {
        return Err(Error::Domain(format!(
            "direct series needs Re(z) >= {}, got {}",
            1.0 + DEFAULT_DIRECT_MARGIN,
            z.re
        )));
    }
    let k = cutoff.unwrap_or(DEFAULT_DIRECT_CUTOFF);
    if s.im.abs() >= k {
        return Err(Error::Constraint { im_s: s.im.abs(), cutoff: k });
    }
    let tr = truncate(spec, k)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for e in tr.finite.elements.iter().chain(&tr.upper_extras).chain(&tr.lower_extras) {
        let w = s - e.value;
        if w.norm() == 0.0 {
            return Err(Error::Singular(s));
        }
        let term = principal_pow(w, z)? * e.multiplicity as f64;
        value += term;
        mag += term.norm();
    }
    let mut error = 0.0;
    for half in tr.upper.iter().chain(&tr.lower) {
        let (v, e) = half_tail(half, s, z);
        value += v;
        mag += v.norm();
        error += e;
    }
    Ok(XiEvaluation {
        value,
        error_bound: error + 4.0 * f64::EPSILON * mag,
        path: XiPath::DirectSeries,
        s,
        z,
    })
}

/// ξ(s, z) through Hurwitz zeta values, one pair per progression; valid for
/// every z ≠ 1 with the accuracy of [`hurwitz_zeta`].
pub fn xi_hurwitz(spec: &SpectrumSet, s: Complex64, z: Complex64) -> Result<XiEvaluation> {
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(z));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut value = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for p in &spec.progressions {
        let sigma = p.spacing;
        // s - ρ_k = -iσ(k + u)
        let u = i * (s - p.base) / sigma;
        let k_up = (0.5 - u.re).ceil() as i64;
        let j0 = (0.5 + u.re).ceil() as i64;
        let scale = (-z * sigma.ln()).exp();
        let up = scale * (i * z * std::f64::consts::FRAC_PI_2).exp() * hurwitz_zeta(z, u + k_up as f64)?;
        let down = scale * (-i * z * std::f64::consts::FRAC_PI_2).exp() * hurwitz_zeta(z, j0 as f64 - u)?;
        let mut mid = Complex64::new(0.0, 0.0);
        for k in (1 - j0)..k_up {
            mid += principal_pow(s - p.eigenvalue(k), z)?;
        }
        let m = p.multiplicity as f64;
        value += (up + down + mid) * m;
        mag += (up.norm() + down.norm() + mid.norm()) * m;
    }
    for e in &spec.extras {
        let term = principal_pow(s - e.value, z)? * e.multiplicity as f64;
        value += term;
        mag += term.norm();
    }
    let tol = if z.re >= 0.0 { 1e-12 } else { 1e-10 };
    Ok(XiEvaluation { value, error_bound: tol * mag.max(1.0), path: XiPath::HurwitzClosedForm, s, z })
}
