//! Verification runs: the determinant product against the Euler product on
//! a grid of s values, Lefschetz bump checks, and their report formats.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynzeta::{closed_form_zeta, euler_product_with, EulerOptions, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lefschetz::{lhs_trace, rhs_orbits, BumpFunction};
use crate::orbits::{topological_entropy, MappingTorusModel, OrbitTable};
use crate::spectra::model_spectra;
use crate::speczeta::{
    alternating_det_product_with, distance_to_spectrum, ContinuationOptions, DetNormalization, SINGULARITY_GUARD,
};

pub const CSV_HEADER: &str = "s_re,s_im,det_product_re,det_product_im,euler_re,euler_im,rel_diff";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub matrix: [i64; 4],
    pub return_time: f64,
}

impl ModelConfig {
    pub fn build(&self) -> Result<MappingTorusModel> {
        let [a, b, c, d] = self.matrix;
        MappingTorusModel::new([[a, b], [c, d]], self.return_time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub re_points: usize,
    pub im_points: usize,
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (range[0] + range[1])],
        _ => (0..n).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64).collect(),
    }
}

impl GridConfig {
    /// Points in row-major order, real part outer.
    pub fn points(&self) -> Vec<Complex64> {
        let ims = linspace(self.im, self.im_points);
        linspace(self.re, self.re_points)
            .into_iter()
            .flat_map(|re| ims.iter().map(move |&im| Complex64::new(re, im)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncations {
    /// Orbit length cutoff L.
    pub orbit_length: f64,
    /// Spectral cutoff K for Lefschetz sums.
    pub spectral_cutoff: f64,
    /// Theta-series cutoff T; `None` chooses per spectrum.
    pub theta_cutoff: Option<f64>,
    /// Laurent subtraction order N.
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub per_iterate_index: bool,
    pub normalized_det: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputPaths {
    pub json: Option<String>,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub truncations: Truncations,
    pub tolerance: f64,
    pub flags: Flags,
    pub outputs: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig { matrix: [2, 1, 1, 1], return_time: 1.0 },
            grid: GridConfig { re: [1.2, 3.0], im: [-1.0, 1.0], re_points: 5, im_points: 3 },
            truncations: Truncations {
                orbit_length: 60.0,
                spectral_cutoff: 2000.0 * std::f64::consts::PI,
                theta_cutoff: None,
                order: crate::speczeta::DEFAULT_ORDER,
            },
            tolerance: 1e-6,
            flags: Flags { per_iterate_index: false, normalized_det: false },
            outputs: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<MappingTorusModel> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        let t = &self.truncations;
        if !(t.orbit_length > 0.0) || !(t.spectral_cutoff > 0.0) || t.theta_cutoff.is_some_and(|x| !(x > 0.0)) {
            return Err(Error::Domain("truncations must be positive".into()));
        }
        if self.grid.re_points == 0 || self.grid.im_points == 0 {
            return Err(Error::Domain("grid needs at least one point per axis".into()));
        }
        self.model.build()
    }

    /// Orbit periods needed to reach the length cutoff.
    pub fn max_period(&self) -> u32 {
        (self.truncations.orbit_length / self.model.return_time * (1.0 + 1e-12)).floor().max(1.0) as u32
    }

    fn continuation(&self) -> ContinuationOptions {
        ContinuationOptions { cutoff: self.truncations.theta_cutoff, order: self.truncations.order, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Rejected,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub s: Complex64,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_product: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_product: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl VerificationRow {
    fn empty(s: Complex64, status: RowStatus, message: String) -> Self {
        VerificationRow {
            s,
            status,
            det_product: None,
            euler_product: None,
            closed_form: None,
            abs_diff: None,
            rel_diff: None,
            euler_tail_bound: None,
            message: Some(message),
            wall_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub max_rel_diff: f64,
    pub tolerance: f64,
    pub evaluated: usize,
    pub rejected: usize,
    pub errors: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub rows: Vec<VerificationRow>,
    pub summary: VerificationSummary,
}

/// Why s must be skipped, if it sits on a singularity or outside the
/// half-plane of convergence.
pub fn rejection_reason(model: &MappingTorusModel, s: Complex64, margin: f64) -> Result<Option<String>> {
    let h = topological_entropy(model);
    if !(s.re > h + margin) {
        return Ok(Some(format!("Re(s) <= entropy {h:.15} + margin {margin}")));
    }
    let ell = model.return_time();
    let k = (s.im * ell / (2.0 * std::f64::consts::PI)).round();
    if (s - Complex64::new(0.0, 2.0 * std::f64::consts::PI * k / ell)).norm() < SINGULARITY_GUARD {
        return Ok(Some("s within 1e-6 of 2πiℤ/ℓ".into()));
    }
    for spec in model_spectra(model)?.iter() {
        if distance_to_spectrum(spec, s) < SINGULARITY_GUARD {
            return Ok(Some(format!("s within 1e-6 of the degree-{} spectrum", spec.degree)));
        }
    }
    Ok(None)
}

fn evaluate_point(
    config: &RunConfig,
    model: &MappingTorusModel,
    table: &OrbitTable,
    s: Complex64,
    timings: bool,
) -> VerificationRow {
    let start = Instant::now();
    match rejection_reason(model, s, DEFAULT_MARGIN) {
        Ok(Some(reason)) => return VerificationRow::empty(s, RowStatus::Rejected, reason),
        Err(e) => return VerificationRow::empty(s, RowStatus::Error, e.to_string()),
        Ok(None) => {}
    }
    let norm = if config.flags.normalized_det { DetNormalization::TwoPi } else { DetNormalization::Plain };
    let euler_opts = EulerOptions { per_iterate_index: config.flags.per_iterate_index, ..Default::default() };
    let computed = (|| -> Result<_> {
        let det = alternating_det_product_with(model, s, norm, &config.continuation())?;
        let euler = euler_product_with(table, s, config.truncations.orbit_length, &euler_opts)?;
        let closed = closed_form_zeta(model, s)?;
        Ok((det, euler, closed))
    })();
    match computed {
        Ok((det, euler, closed)) => {
            let abs = (det - euler.value).norm();
            VerificationRow {
                s,
                status: RowStatus::Ok,
                det_product: Some(det),
                euler_product: Some(euler.value),
                closed_form: Some(closed),
                abs_diff: Some(abs),
                rel_diff: Some(abs / euler.value.norm()),
                euler_tail_bound: Some(euler.tail_bound),
                message: None,
                wall_time: timings.then(|| start.elapsed().as_secs_f64()),
            }
        }
        Err(e) => VerificationRow::empty(s, RowStatus::Error, e.to_string()),
    }
}

/// Evaluates every grid point. A point-level engine failure is recorded in
/// its row; the report still covers the full grid.
pub fn run_verification(config: &RunConfig, table: &OrbitTable, exec: Execution, timings: bool) -> Result<VerificationReport> {
    let model = config.validate()?;
    let points = config.grid.points();
    let rows = exec.map(&points, |&s| evaluate_point(config, &model, table, s, timings));
    let evaluated = rows.iter().filter(|r| r.status == RowStatus::Ok).count();
    let rejected = rows.iter().filter(|r| r.status == RowStatus::Rejected).count();
    let errors = rows.iter().filter(|r| r.status == RowStatus::Error).count();
    if evaluated + errors == 0 {
        return Err(Error::Domain("every grid point was rejected; raise the Re(s) range".into()));
    }
    let max_rel_diff = rows.iter().filter_map(|r| r.rel_diff).fold(0.0, f64::max);
    let pass = errors == 0 && evaluated > 0 && max_rel_diff <= config.tolerance;
    Ok(VerificationReport {
        config: config.clone(),
        rows,
        summary: VerificationSummary {
            max_rel_diff,
            tolerance: config.tolerance,
            evaluated,
            rejected,
            errors,
            pass,
        },
    })
}

fn sci(x: f64) -> String {
    format!("{x:.14e}")
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Flat table of the evaluated rows, 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            if let (Some(d), Some(e), Some(rel)) = (r.det_product, r.euler_product, r.rel_diff) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    sci(r.s.re),
                    sci(r.s.im),
                    sci(d.re),
                    sci(d.im),
                    sci(e.re),
                    sci(e.im),
                    sci(rel)
                );
            }
        }
        out
    }

    /// Heat map of log10(rel_diff) over the grid.
    pub fn to_svg(&self) -> String {
        let g = &self.config.grid;
        let (nx, ny) = (g.re_points, g.im_points);
        let cell = 60usize;
        let (left, top) = (70usize, 40usize);
        let width = left + nx * cell + 140;
        let height = top + ny * cell + 60;
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(svg, r#"<text x="{left}" y="20">log10 rel_diff, tolerance {:e}</text>"#, self.config.tolerance);
        let tol_log = self.config.tolerance.log10();
        for (idx, r) in self.rows.iter().enumerate() {
            let (i, j) = (idx / ny, idx % ny);
            let x = left + i * cell;
            // larger Im at the top
            let y = top + (ny - 1 - j) * cell;
            let (fill, label) = match r.rel_diff {
                Some(d) => {
                    let l = d.max(1e-300).log10();
                    // green well below tolerance, red above
                    let t = ((l - (tol_log - 8.0)) / 8.0).clamp(0.0, 1.0);
                    let red = (255.0 * t) as u8;
                    let green = (255.0 * (1.0 - t)) as u8;
                    (format!("rgb({red},{green},60)"), format!("{l:.1}"))
                }
                None => ("rgb(200,200,200)".to_string(), match r.status {
                    RowStatus::Rejected => "rej".to_string(),
                    _ => "err".to_string(),
                }),
            };
            let _ = writeln!(
                svg,
                r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="white"/><text x="{}" y="{}" text-anchor="middle">{label}</text>"#,
                x + cell / 2,
                y + cell / 2 + 4
            );
        }
        for (i, re) in linspace(g.re, nx).iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">{re:.3}</text>"#,
                left + i * cell + cell / 2,
                top + ny * cell + 16
            );
        }
        for (j, im) in linspace(g.im, ny).iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="end">{im:.3}</text>"#,
                left - 6,
                top + (ny - 1 - j) * cell + cell / 2 + 4
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">Re s</text><text x="14" y="{}">Im s</text>"#,
            left + nx * cell / 2,
            top + ny * cell + 36,
            top + ny * cell / 2
        );
        svg.push_str("</svg>\n");
        svg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LefschetzRow {
    pub bump: BumpFunction,
    pub lhs: Complex64,
    pub rhs: f64,
    pub diff: f64,
    pub tail_estimate: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LefschetzSummary {
    pub max_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LefschetzConfig {
    pub model: ModelConfig,
    pub spectral_cutoff: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LefschetzReport {
    pub config: LefschetzConfig,
    pub rows: Vec<LefschetzRow>,
    pub summary: LefschetzSummary,
}

impl LefschetzReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Both sides of the trace formula for each bump. The spectral tail must
/// stay two orders below `tolerance`.
pub fn run_lefschetz(
    config: &LefschetzConfig,
    table: &OrbitTable,
    bumps: &[BumpFunction],
    exec: Execution,
) -> Result<LefschetzReport> {
    let model = config.model.build()?;
    let mut rows = Vec::with_capacity(bumps.len());
    for bump in bumps {
        let lhs = lhs_trace(&model, bump, config.spectral_cutoff, config.tolerance * 1e-2, exec)?;
        let rhs = rhs_orbits(table, bump)?;
        let diff = (lhs.value - rhs).norm();
        rows.push(LefschetzRow {
            bump: *bump,
            lhs: lhs.value,
            rhs,
            diff,
            tail_estimate: lhs.tail_estimate,
            pass: diff <= config.tolerance,
        });
    }
    let max_diff = rows.iter().map(|r| r.diff).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.pass);
    Ok(LefschetzReport {
        config: config.clone(),
        rows,
        summary: LefschetzSummary { max_diff, tolerance: config.tolerance, pass },
    })
}
