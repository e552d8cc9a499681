//! The dynamical zeta function ζ_F(s) = Π_γ (1 - e^{-s·l(γ)})^{-ε_γ} as a
//! truncated Euler product, its logarithmic derivative, and the rational
//! resummation through fixed-point counts.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::{MappingTorusModel, OrbitTable};

/// Required distance of Re s above the entropy.
pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: Complex64,
    pub truncation_length: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerOptions {
    pub margin: f64,
    /// Use sgn det(I - A^n) per iterate instead of one index per orbit.
    pub per_iterate_index: bool,
}

impl Default for EulerOptions {
    fn default() -> Self {
        EulerOptions { margin: DEFAULT_MARGIN, per_iterate_index: false }
    }
}

/// log(1 + w) without cancellation for small |w|.
fn ln_1p(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    Complex64::new(re, w.im.atan2(1.0 + w.re))
}

fn check_domain(table: &OrbitTable, s: Complex64, length: f64, opts: &EulerOptions) -> Result<()> {
    if !(s.re > table.entropy + opts.margin) {
        return Err(Error::Convergence { re_s: s.re, abscissa: table.entropy + opts.margin });
    }
    let available = table.max_length();
    if available < length * (1.0 - 1e-12) {
        return Err(Error::InsufficientTable { available, required: length });
    }
    if !opts.per_iterate_index && !table.has_constant_index() {
        return Err(Error::IndexVaries);
    }
    Ok(())
}

fn count_f64(table: &OrbitTable, i: usize) -> f64 {
    table.rows[i].count.to_f64().unwrap_or(f64::INFINITY)
}

/// F_m = Σ_{n | m} n·P_n for m ≤ max_m, from the primitive table.
fn iterate_counts(table: &OrbitTable, max_m: usize) -> Vec<f64> {
    let mut f = vec![0.0; max_m + 1];
    for (i, row) in table.rows.iter().enumerate() {
        let n = row.period as usize;
        let np = n as f64 * count_f64(table, i);
        for m in (n..=max_m).step_by(n.max(1)) {
            f[m] += np;
        }
    }
    f
}

/// Bound on |log of the discarded factors| for primitive periods beyond
/// `n_max`, using P_n ≤ (e^{hnℓ} + 2)/n and |log(1 - w)| ≤ |w|/(1 - |w|).
fn log_tail_bound(table: &OrbitTable, s: Complex64, n_max: u64) -> f64 {
    let ell = table.return_time;
    let r = (-s.re * ell).exp();
    let growth = (table.entropy * ell).exp();
    let mut sum = 0.0;
    let mut n = n_max + 1;
    loop {
        let nf = n as f64;
        let term = ((growth * r).powf(nf) + 2.0 * r.powf(nf)) / nf / (1.0 - r);
        sum += term;
        if term < 1e-18 * sum || term == 0.0 || n > n_max + 100_000 {
            break;
        }
        n += 1;
    }
    2.0 * sum
}

/// Euler product over primitive orbits of length ≤ L.
pub fn euler_product(table: &OrbitTable, s: Complex64, length: f64) -> Result<ZetaValue> {
    euler_product_with(table, s, length, &EulerOptions::default())
}

pub fn euler_product_with(table: &OrbitTable, s: Complex64, length: f64, opts: &EulerOptions) -> Result<ZetaValue> {
    if table.rows.is_empty() {
        return Ok(ZetaValue { value: Complex64::new(1.0, 0.0), truncation_length: length, tail_bound: 0.0 });
    }
    check_domain(table, s, length, opts)?;
    let n_max = (length / table.return_time * (1.0 + 1e-12)).floor() as u64;
    let log = if opts.per_iterate_index {
        // log ζ = Σ_m σ_m F_m x^m / m over iterate lengths ≤ L
        let m_max = n_max as usize;
        let f = iterate_counts(table, m_max);
        let x = (-s * table.return_time).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut xm = Complex64::new(1.0, 0.0);
        for (m, &fm) in f.iter().enumerate().take(m_max + 1).skip(1) {
            xm *= x;
            let sigma = table.iterate_sign(m as u32).unwrap_or(1) as f64;
            acc += xm * (sigma * fm / m as f64);
        }
        acc
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, row) in table.rows.iter().enumerate() {
            if row.length > length * (1.0 + 1e-12) {
                continue;
            }
            let w = -(-s * row.length).exp();
            acc -= ln_1p(w) * (row.index as f64 * count_f64(table, i));
        }
        acc
    };
    let value = log.exp();
    let b = log_tail_bound(table, s, n_max);
    Ok(ZetaValue { value, truncation_length: length, tail_bound: value.norm() * b.exp_m1() })
}

/// d/ds log ζ_F truncated to iterate lengths k·l(γ) ≤ L.
pub fn log_derivative(table: &OrbitTable, s: Complex64, length: f64) -> Result<Complex64> {
    log_derivative_with(table, s, length, &EulerOptions::default())
}

pub fn log_derivative_with(table: &OrbitTable, s: Complex64, length: f64, opts: &EulerOptions) -> Result<Complex64> {
    if table.rows.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_domain(table, s, length, opts)?;
    let ell = table.return_time;
    let m_max = (length / ell * (1.0 + 1e-12)).floor() as usize;
    let f = iterate_counts(table, m_max);
    let x = (-s * ell).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut xm = Complex64::new(1.0, 0.0);
    for (m, fm) in f.iter().enumerate().skip(1) {
        xm *= x;
        let sign = if opts.per_iterate_index {
            table.iterate_sign(m as u32).unwrap_or(1)
        } else {
            table.rows[0].index
        } as f64;
        acc -= xm * (ell * sign * fm);
    }
    Ok(acc)
}

fn closed_form_parts(model: &MappingTorusModel, s: Complex64) -> (Complex64, f64, f64, f64) {
    let ell = model.return_time();
    let x = (-s * ell).exp();
    (x, model.trace() as f64, model.det() as f64, ell)
}

fn check_closed_form_pole(x: Complex64, d: f64, s: Complex64) -> Result<()> {
    if (1.0 - x).norm() < 1e-14 || (1.0 - x * d).norm() < 1e-14 {
        return Err(Error::Pole(s));
    }
    Ok(())
}

/// det(I - xA) / ((1 - x)(1 - det(A)·x)) with x = e^{-sℓ}; for det = 1 this is
/// (1 - λx)(1 - x/λ)/(1 - x)².
pub fn closed_form_zeta(model: &MappingTorusModel, s: Complex64) -> Result<Complex64> {
    let (x, t, d, _) = closed_form_parts(model, s);
    check_closed_form_pole(x, d, s)?;
    Ok((1.0 - x * t + x * x * d) / ((1.0 - x) * (1.0 - x * d)))
}

/// Exact ζ'/ζ of [`closed_form_zeta`].
pub fn closed_form_log_derivative(model: &MappingTorusModel, s: Complex64) -> Result<Complex64> {
    let (x, t, d, ell) = closed_form_parts(model, s);
    check_closed_form_pole(x, d, s)?;
    let num = 1.0 - x * t + x * x * d;
    if num.norm() == 0.0 {
        return Err(Error::Pole(s));
    }
    Ok(x * ell * (t - 2.0 * d * x) / num - x * ell / (1.0 - x) - x * (d * ell) / (1.0 - x * d))
}
