//! The dynamical Lefschetz trace formula on ℝ_{>0}, paired against smooth
//! bumps, and its Laplace-transformed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::orbits::{MappingTorusModel, OrbitTable};
use crate::specfun::{gamma, integrate, QuadOptions};
use crate::spectra::model_spectra;
use crate::speczeta::xi_direct;

/// Integration-by-parts order behind the spectral tail estimate.
const TAIL_ORDER: usize = 6;

/// φ(t) = exp(-1/(1 - u²)) with u = (t - c)/w, zero for |u| ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub center: f64,
    pub half_width: f64,
}

impl BumpFunction {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(center - half_width > 0.0) || !center.is_finite() {
            return Err(Error::Domain(format!(
                "bump support ({}, {}) must lie in (0, inf)",
                center - half_width,
                center + half_width
            )));
        }
        Ok(BumpFunction { center, half_width })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.half_width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// Trapezoid nodes on the support with weights h·φ(t_j). The integrand is
/// smooth and compactly supported, so the rule converges spectrally until
/// the oscillation frequency approaches the Nyquist limit π/h.
#[derive(Debug, Clone)]
pub struct BumpGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BumpGrid {
    /// A grid resolving frequencies up to `bandwidth` in |Im ρ|.
    pub fn new(bump: &BumpFunction, bandwidth: f64) -> Self {
        let w = bump.half_width;
        // the profile's Fourier transform is below 1e-18 of its mass past ~1200/w
        let nyquist = bandwidth.abs() + 1200.0 / w;
        let m = ((2.0 * w * nyquist / PI).ceil() as usize).max(64);
        let (a, _) = bump.support();
        let h = 2.0 * w / m as f64;
        let nodes: Vec<f64> = (1..m).map(|j| a + h * j as f64).collect();
        let weights = nodes.iter().map(|&t| h * bump.eval(t)).collect();
        BumpGrid { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫ φ(t) e^{ρt} dt.
    pub fn transform(&self, rho: Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &wt)| (rho * t).exp() * wt).sum()
    }
}

/// ∫ φ(t) e^{ρt} dt over the bump's support.
pub fn bump_transform(bump: &BumpFunction, rho: Complex64) -> Complex64 {
    BumpGrid::new(bump, rho.im).transform(rho)
}

/// Coefficients (ascending) of P_n with φ^{(n)}(u) = P_n(u) (1 - u²)^{-2n} φ(u).
fn derivative_polynomial(n: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for k in 0..n {
        let kf = k as f64;
        let mut next = vec![0.0; p.len() + 4];
        // P' (1 - u²)²
        for (i, &c) in p.iter().enumerate().skip(1) {
            let d = c * i as f64;
            next[i - 1] += d;
            next[i + 1] -= 2.0 * d;
            next[i + 3] += d;
        }
        // 4k u P (1 - u²) - 2u P
        for (i, &c) in p.iter().enumerate() {
            next[i + 1] += (4.0 * kf - 2.0) * c;
            next[i + 3] -= 4.0 * kf * c;
        }
        while next.len() > 1 && next.last() == Some(&0.0) {
            next.pop();
        }
        p = next;
    }
    p
}

/// ∫ |φ^{(m)}(t)| dt for the bump, in t units.
fn derivative_l1(bump: &BumpFunction, m: usize) -> Result<f64> {
    let p = derivative_polynomial(m);
    let f = |u: f64| {
        let q = 1.0 - u * u;
        if q <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let poly = p.iter().rev().fold(0.0, |acc, &c| acc * u + c);
        let v = poly * (-1.0 / q - 2.0 * m as f64 * q.ln()).exp();
        Complex64::new(v.abs(), 0.0)
    };
    let opts = QuadOptions { initial_pieces: 64, rel_tol: 1e-6, ..QuadOptions::with_tol(0.0) };
    let r = integrate(f, -1.0, 1.0, &opts)?;
    Ok((r.value.re + r.error_estimate) * bump.half_width.powi(1 - m as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub cutoff: f64,
    pub terms: usize,
}

/// Σ_p (-1)^p Σ_{|Im ρ| ≤ K} m_ρ ∫ φ(t) e^{ρt} dt over the model's spectra.
pub fn lhs_trace(model: &MappingTorusModel, bump: &BumpFunction, cutoff: f64, tol: f64, exec: Execution) -> Result<TraceValue> {
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
    }
    let spectra = model_spectra(model)?;
    let (_, b) = bump.support();
    let c6 = derivative_l1(bump, TAIL_ORDER)?;
    let mut tail = 0.0;
    let mut weighted = Vec::new();
    for (p, spec) in spectra.iter().enumerate() {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        for e in spec.window(cutoff) {
            weighted.push((e.value, sign * e.multiplicity as f64));
        }
        // |∫ φ e^{ρt}| ≤ e^{|Re ρ| b} ‖φ^{(6)}‖_1 / |Im ρ|^6 beyond K, both sides
        for ap in &spec.progressions {
            let y = cutoff;
            let per_side = (1.0 / (5.0 * y.powi(5)) / ap.spacing + 1.0 / y.powi(6)) * c6;
            tail += 2.0 * ap.multiplicity as f64 * (ap.base.re.abs() * b).exp() * per_side;
        }
    }
    if tail > tol {
        return Err(Error::InsufficientCutoff { tail, tol });
    }
    let grid = BumpGrid::new(bump, cutoff);
    let parts = exec.map(&weighted, |&(rho, w)| grid.transform(rho) * w);
    Ok(TraceValue { value: parts.iter().sum(), tail_estimate: tail, cutoff, terms: weighted.len() })
}

/// Σ_γ l(γ) ε_γ Σ_{k ≥ 1} φ(k·l(γ)), an exact finite sum.
pub fn rhs_orbits(table: &OrbitTable, bump: &BumpFunction) -> Result<f64> {
    let (a, b) = bump.support();
    if table.rows.is_empty() {
        return Ok(0.0);
    }
    if table.max_length() < b {
        return Err(Error::InsufficientTable { available: table.max_length(), required: b });
    }
    if !table.has_constant_index() {
        return Err(Error::IndexVaries);
    }
    let mut acc = 0.0;
    for row in &table.rows {
        if row.length >= b {
            continue;
        }
        let count = row.count.to_f64().unwrap_or(f64::INFINITY);
        let k_lo = (a / row.length).floor().max(1.0) as u64;
        for k in k_lo.. {
            let t = k as f64 * row.length;
            if t >= b {
                break;
            }
            let v = bump.eval(t);
            if v != 0.0 {
                acc += count * row.length * row.index as f64 * v;
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub lhs_error: f64,
    pub rhs_tail: f64,
}

/// Γ(z) Σ_p (-1)^p ξ_p(s, z) against Σ_γ Σ_n l ε e^{-n l s} (n l)^{z-1}
/// truncated at n·l ≤ L.
pub fn laplace_identity_check(
    model: &MappingTorusModel,
    table: &OrbitTable,
    s: Complex64,
    z: Complex64,
    length: f64,
) -> Result<LaplaceCheck> {
    if !(z.re > 1.0) {
        return Err(Error::Domain(format!("Re(z) must exceed 1, got {}", z.re)));
    }
    if !(s.re > table.entropy) && !table.rows.is_empty() {
        return Err(Error::Convergence { re_s: s.re, abscissa: table.entropy });
    }
    let spectra = model_spectra(model)?;
    let g = gamma(z)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut lhs_error = 0.0;
    for (p, spec) in spectra.iter().enumerate() {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let x = xi_direct(spec, s, z, None)?;
        lhs += x.value * sign;
        lhs_error += x.error_bound;
    }
    lhs *= g;
    lhs_error *= g.norm();

    let mut rhs = Complex64::new(0.0, 0.0);
    let mut rhs_tail = 0.0;
    if !table.rows.is_empty() {
        if table.max_length() < length * (1.0 - 1e-12) {
            return Err(Error::InsufficientTable { available: table.max_length(), required: length });
        }
        if !table.has_constant_index() {
            return Err(Error::IndexVaries);
        }
        for row in &table.rows {
            let count = row.count.to_f64().unwrap_or(f64::INFINITY);
            let l = row.length;
            let mut k = 1u64;
            while k as f64 * l <= length * (1.0 + 1e-12) {
                let kl = k as f64 * l;
                rhs += (-s * kl + (z - 1.0) * kl.ln()).exp() * (count * l * row.index as f64);
                k += 1;
            }
        }
        // Σ_{m > M} ℓ (e^{hmℓ} + 2) e^{-Re s·mℓ} (mℓ)^{Re z - 1}
        let ell = table.return_time;
        let m0 = (length / ell * (1.0 + 1e-12)).floor() as u64;
        let mut m = m0 + 1;
        loop {
            let ml = m as f64 * ell;
            let term = ell * (((table.entropy - s.re) * ml).exp() + 2.0 * (-s.re * ml).exp()) * ml.powf(z.re - 1.0);
            rhs_tail += term;
            if term < 1e-18 * rhs_tail || m > m0 + 100_000 {
                break;
            }
            m += 1;
        }
    }
    Ok(LaplaceCheck { lhs, rhs, lhs_error, rhs_tail })
}
