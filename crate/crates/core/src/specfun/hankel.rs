//! Keyhole-contour representation of λ^{z-1}/Γ(z).
//!
//! The contour runs in along the lower edge of the cut (arg t = -π) from -∞
//! to -δ, around the circle |t| = δ, and back out along the upper edge
//! (arg t = +π). The two edges together equal 2i·sin(πz)·∫_δ^∞ e^{-λv}v^{-z}dv
//! and approach 2πi·λ^{z-1}/Γ(z) as δ → 0, with corrections δ^{k-z}, k ≥ 1;
//! the circle carries exactly that correction, so edges + circle is
//! independent of δ.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quad::{integrate, integrate_ray, QuadOptions, RayOptions};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TOL: f64 = 1e-13;

/// The three contour pieces, each already divided by 2πi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelPieces {
    pub lower_edge: Complex64,
    pub upper_edge: Complex64,
    pub circle: Complex64,
}

impl HankelPieces {
    pub fn edges(&self) -> Complex64 {
        self.lower_edge + self.upper_edge
    }

    pub fn total(&self) -> Complex64 {
        self.edges() + self.circle
    }
}

fn edge(lambda: f64, z: Complex64, delta: f64, arg: f64) -> Result<Complex64> {
    // ∫_δ^∞ e^{-λv} exp(-z (ln v + i·arg)) dv; the part below 1 in log variable
    let phase = (-z * I * arg).exp();
    let near = if delta < 1.0 {
        let opts = QuadOptions { tol: TOL, rel_tol: 1e-14, initial_pieces: 4, ..Default::default() };
        integrate(
            |u| ((1.0 - z) * u).exp() * (-lambda * u.exp()).exp(),
            delta.ln(),
            0.0,
            &opts,
        )?
        .value
    } else {
        Complex64::new(0.0, 0.0)
    };
    let opts = RayOptions { decay_rate: Some(lambda), ..RayOptions::with_tol(TOL) };
    let far = integrate_ray(
        |v| (-z * v.ln()).exp() * (-lambda * v).exp(),
        delta.max(1.0),
        f64::INFINITY,
        &opts,
    )?;
    Ok(phase * (near + far.value))
}

fn check_args(lambda: f64, z: Complex64, delta: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("δ must lie in (0, 1), got {delta}")));
    }
    if z.re >= 1.0 {
        return Err(Error::Domain(format!("cut integrals need Re(z) < 1, got {z}")));
    }
    Ok(())
}

/// Evaluates all three pieces of L_{δ-} numerically.
pub fn hankel_pieces(lambda: f64, z: Complex64, delta: f64) -> Result<HankelPieces> {
    check_args(lambda, z, delta)?;
    let norm = 1.0 / (2.0 * PI * I);
    // lower edge traversed inward (+∫_δ^∞, arg t = -π), upper edge outward (-∫_δ^∞, arg t = +π)
    let lower_edge = edge(lambda, z, delta, -PI)? * norm;
    let upper_edge = -edge(lambda, z, delta, PI)? * norm;
    let opts = QuadOptions { tol: TOL, initial_pieces: 8, ..Default::default() };
    let circle = integrate(
        |phi| {
            let t = Complex64::from_polar(delta, phi);
            (lambda * t).exp() * (-z * Complex64::new(delta.ln(), phi)).exp() * I * t
        },
        -PI,
        PI,
        &opts,
    )?
    .value
        * norm;
    Ok(HankelPieces { lower_edge, upper_edge, circle })
}

/// Cut-edge value (1/2πi)·2i sin(πz) ∫_δ^∞ e^{-λv} v^{-z} dv, which tends to
/// λ^{z-1}/Γ(z) as δ → 0 at rate O(δ^{1-Re z}).
pub fn hankel_gamma_check(lambda: f64, z: Complex64, delta: f64) -> Result<Complex64> {
    Ok(hankel_pieces(lambda, z, delta)?.edges())
}

/// Richardson-extrapolated δ → 0 limit of [`hankel_gamma_check`] from
/// δ0, δ0/2, …, δ0/2^{levels-1}.
pub fn hankel_extrapolated(lambda: f64, z: Complex64, delta0: f64, levels: usize) -> Result<Complex64> {
    if levels == 0 {
        return Err(Error::Domain("need at least one level".into()));
    }
    let mut column: Vec<Complex64> = (0..levels)
        .map(|k| hankel_gamma_check(lambda, z, delta0 / 2f64.powi(k as i32)))
        .collect::<Result<_>>()?;
    for j in 1..levels {
        // the δ^{j-z} term is scaled by 2^{-(j-z)} when δ halves
        let r = ((z - j as f64) * 2f64.ln()).exp();
        column = column.windows(2).map(|w| (w[1] - r * w[0]) / (1.0 - r)).collect();
    }
    Ok(column[0])
}

#[cfg(test)]
mod tests {
    use super::super::gamma::rgamma;
    use super::*;

    fn target(lambda: f64, z: Complex64) -> Complex64 {
        ((z - 1.0) * lambda.ln()).exp() * rgamma(z)
    }

    #[test]
    fn converges_to_reciprocal_gamma() {
        let z = Complex64::new(0.5, 0.0);
        let far = (hankel_gamma_check(1.0, z, 0.1).unwrap() - target(1.0, z)).norm();
        let near = (hankel_gamma_check(1.0, z, 0.001).unwrap() - target(1.0, z)).norm();
        assert!(near < far);
        assert!(near < 0.05);
    }

    #[test]
    fn rate_matches_delta_power() {
        let z = Complex64::new(0.3, 0.0);
        let v: Vec<_> = [0.04, 0.02, 0.01].iter().map(|&d| hankel_gamma_check(2.0, z, d).unwrap()).collect();
        let ratio = (v[2] - v[1]).norm() / (v[1] - v[0]).norm();
        let predicted = 2f64.powf(-(1.0 - z.re));
        assert!(ratio > predicted / 2.0 && ratio < predicted * 2.0, "ratio {ratio}");
    }

    #[test]
    fn circle_closes_the_gap() {
        let z = Complex64::new(0.5, 0.2);
        for &d in &[0.3, 0.05] {
            let p = hankel_pieces(2.0, z, d).unwrap();
            assert!((p.total() - target(2.0, z)).norm() < 1e-12);
        }
    }

    #[test]
    fn extrapolation() {
        for &lambda in &[1.0, 2.0] {
            for &z in &[Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.2)] {
                let v = hankel_extrapolated(lambda, z, 0.25, 6).unwrap();
                assert!((v - target(lambda, z)).norm() < 1e-8, "λ={lambda} z={z}");
            }
        }
    }

    #[test]
    fn gamma_pole_gives_zero() {
        let v = hankel_gamma_check(1.0, Complex64::new(0.0, 0.0), 0.01).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(hankel_gamma_check(-1.0, Complex64::new(0.5, 0.0), 0.1).is_err());
        assert!(hankel_gamma_check(1.0, Complex64::new(1.5, 0.0), 0.1).is_err());
        assert!(hankel_gamma_check(1.0, Complex64::new(0.5, 0.0), 1.5).is_err());
    }
}
