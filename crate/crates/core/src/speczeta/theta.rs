//! Theta series over the half-progressions beyond the cutoff and their
//! small-t Laurent expansions.
//!
//! Each half-progression contributes m·e^{αt}/(1 - e^{-σt}) with Re α < 0;
//! each stray eigenvalue beyond the cutoff contributes m·e^{αt}. Expanding
//! 1/(1 - e^{-σt}) = (σt)^{-1} Σ_n B_n (-σt)^n / n! gives a Laurent series
//! in t starting at t^{-1}, with no t·log t terms.

use num_complex::Complex64;

use crate::specfun::{bernoulli_f64, MAX_BERNOULLI_INDEX};

/// Number of Laurent coefficients kept for near-zero evaluation.
pub(crate) const SERIES_LEN: usize = MAX_BERNOULLI_INDEX + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ThetaTerm {
    pub weight: f64,
    pub alpha: Complex64,
    /// σ for a geometric progression; `None` for a single eigenvalue.
    pub spacing: Option<f64>,
}

impl ThetaTerm {
    pub fn eval(&self, t: f64) -> Complex64 {
        let e = (self.alpha * t).exp() * self.weight;
        match self.spacing {
            Some(sigma) => e / -(-sigma * t).exp_m1(),
            None => e,
        }
    }

    /// Decay rate of |term| as t → ∞.
    pub fn decay_rate(&self) -> f64 {
        -self.alpha.re
    }

    /// Coefficients d_j of t^{j-1}, j = 0..len.
    pub fn laurent(&self, len: usize) -> Vec<Complex64> {
        let len = len.min(SERIES_LEN);
        let mut exp_coef = Vec::with_capacity(len);
        let mut c = Complex64::new(1.0, 0.0);
        for m in 0..len {
            exp_coef.push(c);
            c = c * self.alpha / (m + 1) as f64;
        }
        match self.spacing {
            None => {
                let mut out = vec![Complex64::new(0.0, 0.0); len];
                for j in 1..len {
                    out[j] = exp_coef[j - 1] * self.weight;
                }
                out
            }
            Some(sigma) => {
                // g_n = B_n (-σ)^n / n!
                let mut g = Vec::with_capacity(len);
                let mut scale = 1.0;
                for n in 0..len {
                    g.push(bernoulli_f64(n) * scale);
                    scale *= -sigma / (n + 1) as f64;
                }
                (0..len)
                    .map(|j| {
                        let conv: Complex64 = (0..=j).map(|n| exp_coef[j - n] * g[n]).sum();
                        conv * (self.weight / sigma)
                    })
                    .collect()
            }
        }
    }

    /// Radius inside which the Laurent series is used for the remainder.
    pub fn series_radius(&self) -> f64 {
        let r = (2.0 / self.alpha.norm()).min(0.5);
        match self.spacing {
            Some(sigma) => r.min(0.3 * 2.0 * std::f64::consts::PI / sigma),
            None => r,
        }
    }
}

/// θ(t) minus its expansion through t^{order-1}, for a sum of terms.
pub(crate) struct Remainder<'a> {
    pub terms: &'a [ThetaTerm],
    pub coefs: Vec<Vec<Complex64>>,
    pub order: usize,
}

impl<'a> Remainder<'a> {
    pub fn new(terms: &'a [ThetaTerm], order: usize) -> Self {
        let coefs = terms.iter().map(|t| t.laurent(SERIES_LEN)).collect();
        Remainder { terms, coefs, order }
    }

    /// Σ_terms d_j, j ≤ order.
    pub fn subtracted(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.order + 1];
        for c in &self.coefs {
            for (o, v) in out.iter_mut().zip(c.iter()) {
                *o += v;
            }
        }
        out
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (term, coefs) in self.terms.iter().zip(&self.coefs) {
            if t < term.series_radius() {
                // Σ_{j>order} d_j t^{j-1}
                let mut p = t.powi(self.order as i32);
                for d in &coefs[self.order + 1..] {
                    acc += d * p;
                    p *= t;
                }
            } else {
                let mut poly = Complex64::new(0.0, 0.0);
                let mut p = 1.0 / t;
                for d in &coefs[..=self.order] {
                    poly += d * p;
                    p *= t;
                }
                acc += term.eval(t) - poly;
            }
        }
        acc
    }
}
