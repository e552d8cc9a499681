//! Spectra of the flow generator on each cohomology degree, stored as finite
//! unions of arithmetic progressions {ρ0 + iσk : k ∈ ℤ} plus finitely many
//! extra eigenvalues. Multiplicities are integer weights.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::MappingTorusModel;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// {base + iσk : k ∈ ℤ}, each with the same multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ApWire", into = "ApWire")]
pub struct ApSpectrum {
    pub base: Complex64,
    pub spacing: f64,
    pub multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct ApWire {
    base_re: f64,
    base_im: f64,
    spacing: f64,
    multiplicity: u32,
}

impl From<ApWire> for ApSpectrum {
    fn from(w: ApWire) -> Self {
        ApSpectrum { base: Complex64::new(w.base_re, w.base_im), spacing: w.spacing, multiplicity: w.multiplicity }
    }
}

impl From<ApSpectrum> for ApWire {
    fn from(a: ApSpectrum) -> Self {
        ApWire { base_re: a.base.re, base_im: a.base.im, spacing: a.spacing, multiplicity: a.multiplicity }
    }
}

impl ApSpectrum {
    pub fn new(base: Complex64, spacing: f64, multiplicity: u32) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Domain(format!("spacing must be positive, got {spacing}")));
        }
        if multiplicity == 0 {
            return Err(Error::Domain("multiplicity must be at least 1".into()));
        }
        Ok(ApSpectrum { base, spacing, multiplicity })
    }

    pub fn eigenvalue(&self, k: i64) -> Complex64 {
        self.base + I * (self.spacing * k as f64)
    }

    /// Indices k with |Im(base + iσk)| ≤ bound, as an inclusive range (possibly empty).
    pub fn index_window(&self, bound: f64) -> (i64, i64) {
        let lo = ((-bound - self.base.im) / self.spacing).ceil() as i64;
        let hi = ((bound - self.base.im) / self.spacing).floor() as i64;
        (lo, hi)
    }
}

/// A single eigenvalue with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "EigenWire", into = "EigenWire")]
pub struct Eigen {
    pub value: Complex64,
    pub multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct EigenWire {
    re: f64,
    im: f64,
    multiplicity: u32,
}

impl From<EigenWire> for Eigen {
    fn from(w: EigenWire) -> Self {
        Eigen { value: Complex64::new(w.re, w.im), multiplicity: w.multiplicity }
    }
}

impl From<Eigen> for EigenWire {
    fn from(e: Eigen) -> Self {
        EigenWire { re: e.value.re, im: e.value.im, multiplicity: e.multiplicity }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub degree: u8,
    pub progressions: Vec<ApSpectrum>,
    pub extras: Vec<Eigen>,
}

impl SpectrumSet {
    pub fn new(degree: u8, progressions: Vec<ApSpectrum>, extras: Vec<Eigen>) -> Result<Self> {
        if degree > 2 {
            return Err(Error::Domain(format!("degree must be 0, 1 or 2, got {degree}")));
        }
        for p in &progressions {
            ApSpectrum::new(p.base, p.spacing, p.multiplicity)?;
        }
        if extras.iter().any(|e| e.multiplicity == 0) {
            return Err(Error::Domain("multiplicity must be at least 1".into()));
        }
        Ok(SpectrumSet { degree, progressions, extras })
    }

    pub fn empty(degree: u8) -> Self {
        SpectrumSet { degree, progressions: Vec::new(), extras: Vec::new() }
    }

    /// A finite spectrum with no progressions.
    pub fn finite(degree: u8, eigenvalues: &[(Complex64, u32)]) -> Result<Self> {
        let extras = eigenvalues.iter().map(|&(value, multiplicity)| Eigen { value, multiplicity }).collect();
        SpectrumSet::new(degree, Vec::new(), extras)
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty()
    }

    /// Every represented eigenvalue with |Im| ≤ bound.
    pub fn window(&self, bound: f64) -> Vec<Eigen> {
        let mut out = Vec::new();
        for p in &self.progressions {
            let (lo, hi) = p.index_window(bound);
            out.extend((lo..=hi).map(|k| Eigen { value: p.eigenvalue(k), multiplicity: p.multiplicity }));
        }
        out.extend(self.extras.iter().filter(|e| e.value.im.abs() <= bound).copied());
        out
    }

    pub fn conjugate(&self) -> Self {
        SpectrumSet {
            degree: self.degree,
            progressions: self.progressions.iter().map(|p| ApSpectrum { base: p.base.conj(), ..*p }).collect(),
            extras: self.extras.iter().map(|e| Eigen { value: e.value.conj(), ..*e }).collect(),
        }
    }

    /// Whether the represented multiset equals its complex conjugate, up to `tol`.
    pub fn is_conjugation_symmetric(&self, tol: f64) -> bool {
        let conj = self.conjugate();
        let same_ap = |a: &ApSpectrum, b: &ApSpectrum| {
            a.multiplicity == b.multiplicity
                && (a.spacing - b.spacing).abs() <= tol
                && (a.base.re - b.base.re).abs() <= tol
                && {
                    let shift = (a.base.im - b.base.im) / a.spacing;
                    (shift - shift.round()).abs() * a.spacing <= tol
                }
        };
        let progs_ok = matches_multiset(&self.progressions, &conj.progressions, same_ap);
        let extras_ok = matches_multiset(&self.extras, &conj.extras, |a, b| {
            a.multiplicity == b.multiplicity && (a.value - b.value).norm() <= tol
        });
        progs_ok && extras_ok
    }

    fn coarsest_spacing(&self) -> Option<f64> {
        self.progressions.iter().map(|p| p.spacing).fold(None, |m, s| Some(m.map_or(s, |m: f64| m.max(s))))
    }

    /// Cutoff T: the smallest multiple of the coarsest spacing above
    /// max(spacing, |Im base|, |Im s|) + 1, nudged up by
    /// multiples of 1e-9 until no eigenvalue sits on ±T.
    pub fn default_cutoff(&self, s: Complex64) -> f64 {
        let spacing = self.coarsest_spacing().unwrap_or(1.0);
        let reach = self
            .progressions
            .iter()
            .map(|p| p.base.im.abs())
            .fold(spacing.max(s.im.abs()), f64::max)
            + 1.0;
        let base = spacing * ((reach / spacing).floor() + 1.0);
        (1..)
            .map(|k| base + 1e-9 * k as f64)
            .find(|&t| self.check_cutoff(t).is_ok())
            .expect("ties are isolated")
    }

    fn check_cutoff(&self, cutoff: f64) -> Result<()> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
        }
        let tie = |x: f64| (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0);
        for p in &self.progressions {
            if tie((cutoff - p.base.im) / p.spacing) || tie((-cutoff - p.base.im) / p.spacing) {
                return Err(Error::Tie { cutoff });
            }
        }
        if self.extras.iter().any(|e| (e.value.im.abs() - cutoff).abs() <= 1e-12 * cutoff.max(1.0)) {
            return Err(Error::Tie { cutoff });
        }
        Ok(())
    }
}

fn matches_multiset<T>(a: &[T], b: &[T], eq: impl Fn(&T, &T) -> bool) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        if let Some(j) = (0..b.len()).find(|&j| !used[j] && eq(x, &b[j])) {
            used[j] = true;
            true
        } else {
            false
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Imaginary parts increase from the first element.
    Up,
    /// Imaginary parts decrease from the first element.
    Down,
}

/// The part of a progression beyond the cutoff on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfProgression {
    pub progression: ApSpectrum,
    pub first_index: i64,
    pub direction: Direction,
}

impl HalfProgression {
    pub fn first(&self) -> Complex64 {
        self.progression.eigenvalue(self.first_index)
    }

    pub fn element(&self, j: u64) -> Complex64 {
        let k = match self.direction {
            Direction::Up => self.first_index + j as i64,
            Direction::Down => self.first_index - j as i64,
        };
        self.progression.eigenvalue(k)
    }
}

/// The eigenvalues with |Im| ≤ cutoff; discarded progressions decay like e^{-σt}.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSpectrum {
    pub cutoff: f64,
    pub elements: Vec<Eigen>,
    pub tail_rates: Vec<f64>,
}

/// Exact three-way split of a spectrum at ±T.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub finite: TruncatedSpectrum,
    pub upper: Vec<HalfProgression>,
    pub lower: Vec<HalfProgression>,
    pub upper_extras: Vec<Eigen>,
    pub lower_extras: Vec<Eigen>,
}

pub fn truncate(spec: &SpectrumSet, cutoff: f64) -> Result<Truncation> {
    spec.check_cutoff(cutoff)?;
    let mut elements = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for p in &spec.progressions {
        let (lo, hi) = p.index_window(cutoff);
        elements.extend((lo..=hi).map(|k| Eigen { value: p.eigenvalue(k), multiplicity: p.multiplicity }));
        upper.push(HalfProgression { progression: *p, first_index: hi + 1, direction: Direction::Up });
        lower.push(HalfProgression { progression: *p, first_index: lo - 1, direction: Direction::Down });
    }
    let mut upper_extras = Vec::new();
    let mut lower_extras = Vec::new();
    for e in &spec.extras {
        if e.value.im > cutoff {
            upper_extras.push(*e);
        } else if e.value.im < -cutoff {
            lower_extras.push(*e);
        } else {
            elements.push(*e);
        }
    }
    let tail_rates = spec.progressions.iter().flat_map(|p| [p.spacing, p.spacing]).collect();
    Ok(Truncation {
        finite: TruncatedSpectrum { cutoff, elements, tail_rates },
        upper,
        lower,
        upper_extras,
        lower_extras,
    })
}

/// Spectrum of the generator on degree `p` for the suspension model:
/// {(log μ + 2πik)/ℓ} over the eigenvalues μ of A acting on H^p of the fibre.
pub fn mapping_torus_spectrum(model: &MappingTorusModel, degree: u8) -> Result<SpectrumSet> {
    if !(model.det() == 1 && model.trace() > 2) {
        return Err(Error::UnsupportedModel(
            "spectra need det = +1 and trace > 2 (positive real eigenvalues)".into(),
        ));
    }
    let ell = model.return_time();
    let spacing = 2.0 * PI / ell;
    let ap = |base: f64| ApSpectrum { base: Complex64::new(base, 0.0), spacing, multiplicity: 1 };
    let progressions = match degree {
        0 | 2 => vec![ap(0.0)],
        1 => {
            let log_lambda = model.leading_eigenvalue().ln();
            vec![ap(log_lambda / ell), ap(-log_lambda / ell)]
        }
        _ => return Err(Error::Domain(format!("degree must be 0, 1 or 2, got {degree}"))),
    };
    SpectrumSet::new(degree, progressions, Vec::new())
}

/// Degree 0, 1, 2 spectra of the model.
pub fn model_spectra(model: &MappingTorusModel) -> Result<[SpectrumSet; 3]> {
    Ok([mapping_torus_spectrum(model, 0)?, mapping_torus_spectrum(model, 1)?, mapping_torus_spectrum(model, 2)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lattice() -> SpectrumSet {
        SpectrumSet::new(0, vec![ApSpectrum::new(c(0.0, 0.0), 2.0 * PI, 1).unwrap()], vec![]).unwrap()
    }

    #[test]
    fn split_integer_lattice_at_seven() {
        let t = truncate(&lattice(), 7.0).unwrap();
        let mut ims: Vec<f64> = t.finite.elements.iter().map(|e| e.value.im).collect();
        ims.sort_by(f64::total_cmp);
        assert_eq!(ims.len(), 3);
        assert!((ims[0] + 2.0 * PI).abs() < 1e-15 && ims[1] == 0.0 && (ims[2] - 2.0 * PI).abs() < 1e-15);
        assert_eq!(t.upper[0].first_index, 2);
        assert_eq!(t.lower[0].first_index, -2);
        assert_eq!(t.lower[0].element(1).im, -6.0 * PI);
    }

    #[test]
    fn empty_spectrum() {
        let t = truncate(&SpectrumSet::empty(1), 7.0).unwrap();
        assert!(t.finite.elements.is_empty() && t.upper.is_empty() && t.lower.is_empty());
    }

    #[test]
    fn cat_degree_one_split() {
        let spec = mapping_torus_spectrum(&MappingTorusModel::cat(1.0), 1).unwrap();
        let t = truncate(&spec, 7.0).unwrap();
        assert_eq!(t.finite.elements.len(), 6);
        assert_eq!(t.upper.len(), 2);
        assert_eq!(t.lower.len(), 2);
        // direct enumeration of |Im| ≤ 7
        assert_eq!(spec.window(7.0).len(), 6);
    }

    #[test]
    fn tie_is_rejected() {
        let r = truncate(&lattice(), 2.0 * PI);
        assert!(matches!(r, Err(Error::Tie { .. })));
    }

    #[test]
    fn cat_spectra() {
        let m = MappingTorusModel::cat(1.0);
        let [s0, s1, s2] = model_spectra(&m).unwrap();
        assert_eq!(s0.progressions[0].base, c(0.0, 0.0));
        assert!((s0.progressions[0].spacing - 2.0 * PI).abs() < 1e-15);
        assert_eq!(s2.progressions, s0.progressions);
        let log_lambda = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((s1.progressions[0].base.re - log_lambda).abs() < 1e-15);
        assert!((s1.progressions[1].base.re + log_lambda).abs() < 1e-15);
        for s in [&s0, &s1, &s2] {
            assert!(s.is_conjugation_symmetric(1e-12));
        }
    }

    #[test]
    fn return_time_scales_spectrum() {
        let s = mapping_torus_spectrum(&MappingTorusModel::cat(2.0), 1).unwrap();
        assert!((s.progressions[0].spacing - PI).abs() < 1e-15);
        assert!((s.progressions[0].base.re - ((3.0 + 5f64.sqrt()) / 2.0).ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn unsupported_models() {
        let neg = MappingTorusModel::new([[-2, 1], [1, -1]], 1.0).unwrap();
        assert!(matches!(mapping_torus_spectrum(&neg, 1), Err(Error::UnsupportedModel(_))));
        let flip = MappingTorusModel::new([[1, 1], [1, 0]], 1.0).unwrap();
        assert!(matches!(mapping_torus_spectrum(&flip, 0), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn default_cutoff_avoids_ties_and_covers_s() {
        let spec = mapping_torus_spectrum(&MappingTorusModel::cat(1.0), 1).unwrap();
        let t = spec.default_cutoff(c(2.0, 0.5));
        assert!(truncate(&spec, t).is_ok());
        assert!(t > 2.0 * PI + 1.0 - 1e-6 && t < 6.0 * PI);
        let t2 = spec.default_cutoff(c(2.0, 30.0));
        assert!(t2 > 30.0);
    }

    #[test]
    fn json_schema() {
        let spec = SpectrumSet::new(
            1,
            vec![ApSpectrum::new(c(0.5, 0.0), 2.0 * PI, 2).unwrap()],
            vec![Eigen { value: c(0.0, 1.0), multiplicity: 1 }],
        )
        .unwrap();
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["degree"], 1);
        assert_eq!(v["progressions"][0]["base_re"], 0.5);
        assert_eq!(v["progressions"][0]["multiplicity"], 2);
        assert_eq!(v["extras"][0]["im"], 1.0);
        let back: SpectrumSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, spec);
    }
}
