use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use zetaforge::dynzeta::{closed_form_log_derivative, closed_form_zeta, euler_product_with, log_derivative_with, EulerOptions};
use zetaforge::lefschetz::BumpFunction;
use zetaforge::orbits::{cache_dir_from_env, cached_primitive_orbits, CacheStatus, MappingTorusModel, OrbitTable};
use zetaforge::spectra::mapping_torus_spectrum;
use zetaforge::speczeta::{
    det_infinity_normalized, xi_continued, xi_derivative_at_zero, xi_direct, xi_hurwitz, ContinuationOptions,
    DetNormalization,
};
use zetaforge::verify::{run_lefschetz, run_verification, LefschetzConfig, ModelConfig, RunConfig};
use zetaforge::{Complex64, Error, Execution};

mod selftest;

#[derive(Parser)]
#[command(name = "zetaforge", version)]
#[command(about = "Spectral and dynamical zeta functions of suspended toral automorphisms")]
struct Cli {
    /// Run every batch on the calling thread
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Matrix entries a,b,c,d in row-major order
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "2,1,1,1")]
    matrix: Vec<i64>,

    /// Return time ℓ of the suspension
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum XiMethod {
    Continued,
    Direct,
    Hurwitz,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate primitive closed orbits and print a model summary
    Model {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20)]
        max_period: u32,
        /// Write the orbit table JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print ξ_p(s, z) and det_∞(s - Θ) for one cohomology degree
    SpectralZeta {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        degree: u8,
        /// s as re or re,im
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        /// z as re or re,im
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "2")]
        z: Complex64,
        #[arg(long, value_enum, default_value = "continued")]
        method: XiMethod,
        /// Theta-series cutoff T
        #[arg(long)]
        theta_cutoff: Option<f64>,
        /// Laurent subtraction order N
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long)]
        normalized_det: bool,
    },
    /// Print the Euler product, the rational closed form and ζ'/ζ at s
    DynamicalZeta {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        /// Orbit length cutoff L
        #[arg(long, default_value_t = 60.0)]
        length: f64,
        #[arg(long)]
        per_iterate_index: bool,
    },
    /// Compare the determinant product with the Euler product on a grid
    Verify(Box<VerifyArgs>),
    /// Check the trace formula against smooth bumps
    Lefschetz {
        #[command(flatten)]
        model: ModelArgs,
        /// Bump as center,half_width; repeatable
        #[arg(long = "bump", value_parser = parse_bump)]
        bumps: Vec<BumpFunction>,
        /// Spectral cutoff K
        #[arg(long, default_value_t = 2000.0 * PI)]
        cutoff: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the built-in oracle checks
    Selftest,
}

#[derive(Args)]
struct VerifyArgs {
    /// Start from a RunConfig JSON file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    matrix: Option<Vec<i64>>,
    #[arg(long)]
    ell: Option<f64>,
    /// Re(s) range lo,hi
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    re: Option<Vec<f64>>,
    /// Im(s) range lo,hi
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    im: Option<Vec<f64>>,
    #[arg(long)]
    re_points: Option<usize>,
    #[arg(long)]
    im_points: Option<usize>,
    /// Orbit length cutoff L
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    theta_cutoff: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    per_iterate_index: bool,
    #[arg(long)]
    normalized_det: bool,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Record per-point wall time in the report
    #[arg(long)]
    timings: bool,
}

/// Exit status classes.
#[derive(Debug)]
enum Failure {
    Config(String),
    Degenerate(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Degenerate(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Degenerate(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Degenerate { .. } | Error::Inconsistent { .. } => Failure::Degenerate(msg),
            Error::Pole(_) | Error::Singular(_) | Error::NonConvergence { .. } | Error::InsufficientCutoff { .. } => {
                Failure::Numeric(msg)
            }
            _ => Failure::Config(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("bad number '{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re or re,im, got '{s}'")),
    }
}

fn parse_bump(s: &str) -> Result<BumpFunction, String> {
    let v = parse_complex(s)?;
    BumpFunction::new(v.re, v.im).map_err(|e| e.to_string())
}

fn matrix_of(entries: &[i64]) -> Result<[i64; 4], Failure> {
    entries
        .try_into()
        .map_err(|_| Failure::Config(format!("--matrix needs 4 entries, got {}", entries.len())))
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig, Failure> {
        Ok(ModelConfig { matrix: matrix_of(&self.matrix)?, return_time: self.ell })
    }

    fn build(&self) -> Result<MappingTorusModel, Failure> {
        Ok(self.config()?.build()?)
    }
}

fn load_table(model: &MappingTorusModel, max_period: u32, exec: Execution) -> Result<(OrbitTable, CacheStatus), Failure> {
    let dir = cache_dir_from_env();
    Ok(cached_primitive_orbits(model, max_period, &dir, exec)?)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn cmd_model(model: &ModelArgs, max_period: u32, out: Option<&Path>, exec: Execution) -> Result<u8, Failure> {
    let m = model.build()?;
    let (table, status) = load_table(&m, max_period, exec)?;
    println!("matrix: {:?}", m.matrix());
    println!("return_time: {}", m.return_time());
    println!("entropy: {}", table.entropy);
    println!("cache: {}", if status == CacheStatus::Hit { "hit" } else { "miss" });
    let counts: Vec<String> = table.rows.iter().take(10).map(|r| r.count.to_string()).collect();
    println!("primitive_counts: {}", counts.join(" "));
    if let Some(path) = out {
        write(path, &pretty(&table)?)?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectral_zeta(
    model: &ModelArgs,
    degree: u8,
    s: Complex64,
    z: Complex64,
    method: XiMethod,
    theta_cutoff: Option<f64>,
    order: usize,
    normalized: bool,
) -> Result<u8, Failure> {
    let m = model.build()?;
    if degree > 2 {
        return Err(Failure::Config(format!("degree must be 0, 1 or 2, got {degree}")));
    }
    let spec = mapping_torus_spectrum(&m, degree)?;
    let opts = ContinuationOptions { cutoff: theta_cutoff, order, ..Default::default() };
    let xi = match method {
        XiMethod::Continued => xi_continued(&spec, s, z, &opts)?,
        XiMethod::Direct => xi_direct(&spec, s, z, None)?,
        XiMethod::Hurwitz => xi_hurwitz(&spec, s, z)?,
    };
    let norm = if normalized { DetNormalization::TwoPi } else { DetNormalization::Plain };
    let report = json!({
        "degree": degree,
        "xi": xi,
        "xi_derivative_at_zero": xi_derivative_at_zero(&spec, s, &opts)?,
        "det_infinity": det_infinity_normalized(&spec, s, norm, &opts)?,
        "normalization": norm,
    });
    print!("{}", pretty(&report)?);
    Ok(0)
}

fn cmd_dynamical_zeta(model: &ModelArgs, s: Complex64, length: f64, per_iterate: bool, exec: Execution) -> Result<u8, Failure> {
    let m = model.build()?;
    let max_period = (length / m.return_time() * (1.0 + 1e-12)).floor().max(1.0) as u32;
    let (table, _) = load_table(&m, max_period, exec)?;
    let opts = EulerOptions { per_iterate_index: per_iterate, ..Default::default() };
    let report = json!({
        "s": s,
        "euler_product": euler_product_with(&table, s, length, &opts)?,
        "closed_form": closed_form_zeta(&m, s)?,
        "log_derivative": log_derivative_with(&table, s, length, &opts)?,
        "closed_form_log_derivative": closed_form_log_derivative(&m, s)?,
    });
    print!("{}", pretty(&report)?);
    Ok(0)
}

fn range(v: &[f64], name: &str) -> Result<[f64; 2], Failure> {
    match v {
        [a, b] => Ok([*a, *b]),
        [a] => Ok([*a, *a]),
        _ => Err(Failure::Config(format!("--{name} needs lo,hi"))),
    }
}

fn verify_config(args: &VerifyArgs) -> Result<RunConfig, Failure> {
    let mut c = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &args.matrix {
        c.model.matrix = matrix_of(m)?;
    }
    if let Some(ell) = args.ell {
        c.model.return_time = ell;
    }
    if let Some(re) = &args.re {
        c.grid.re = range(re, "re")?;
    }
    if let Some(im) = &args.im {
        c.grid.im = range(im, "im")?;
    }
    if let Some(n) = args.re_points {
        c.grid.re_points = n;
    }
    if let Some(n) = args.im_points {
        c.grid.im_points = n;
    }
    if let Some(l) = args.length {
        c.truncations.orbit_length = l;
    }
    if args.theta_cutoff.is_some() {
        c.truncations.theta_cutoff = args.theta_cutoff;
    }
    if let Some(n) = args.order {
        c.truncations.order = n;
    }
    if let Some(t) = args.tol {
        c.tolerance = t;
    }
    c.flags.per_iterate_index |= args.per_iterate_index;
    c.flags.normalized_det |= args.normalized_det;
    let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    if args.json.is_some() {
        c.outputs.json = path_str(&args.json);
    }
    if args.csv.is_some() {
        c.outputs.csv = path_str(&args.csv);
    }
    if args.svg.is_some() {
        c.outputs.svg = path_str(&args.svg);
    }
    Ok(c)
}

fn cmd_verify(args: &VerifyArgs, exec: Execution) -> Result<u8, Failure> {
    let config = verify_config(args)?;
    let model = config.validate()?;
    let (table, _) = load_table(&model, config.max_period(), exec)?;
    let report = run_verification(&config, &table, exec, args.timings)?;
    let body = report.to_json()?;
    match &config.outputs.json {
        Some(p) => write(Path::new(p), &body)?,
        None => print!("{body}"),
    }
    if let Some(p) = &config.outputs.csv {
        write(Path::new(p), &report.to_csv())?;
    }
    if let Some(p) = &config.outputs.svg {
        write(Path::new(p), &report.to_svg())?;
    }
    let s = &report.summary;
    eprintln!(
        "verify: {} evaluated, {} rejected, {} errors, max rel_diff {:.3e} (tolerance {:.1e}): {}",
        s.evaluated,
        s.rejected,
        s.errors,
        s.max_rel_diff,
        s.tolerance,
        if s.pass { "PASS" } else { "FAIL" }
    );
    if s.errors > 0 {
        return Err(Failure::Numeric(format!("{} grid points failed to evaluate", s.errors)));
    }
    Ok(if s.pass { 0 } else { 1 })
}

fn cmd_lefschetz(
    model: &ModelArgs,
    bumps: &[BumpFunction],
    cutoff: f64,
    tol: f64,
    json_out: Option<&Path>,
    exec: Execution,
) -> Result<u8, Failure> {
    let m = model.build()?;
    let bumps: Vec<BumpFunction> = if bumps.is_empty() {
        [1.0, 2.0, 3.0].iter().map(|&c| BumpFunction::new(c, 0.3)).collect::<Result<_, _>>()?
    } else {
        bumps.to_vec()
    };
    let reach = bumps.iter().map(|b| b.support().1).fold(0.0, f64::max);
    let max_period = (reach / m.return_time()).ceil().max(1.0) as u32;
    let (table, _) = load_table(&m, max_period, exec)?;
    let config = LefschetzConfig { model: model.config()?, spectral_cutoff: cutoff, tolerance: tol };
    let report = run_lefschetz(&config, &table, &bumps, exec)?;
    let body = report.to_json()?;
    match json_out {
        Some(p) => write(p, &body)?,
        None => print!("{body}"),
    }
    for r in &report.rows {
        eprintln!(
            "bump c={} w={}: lhs {:.12e} rhs {:.12e} diff {:.3e} {}",
            r.bump.center,
            r.bump.half_width,
            r.lhs.re,
            r.rhs,
            r.diff,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(if report.summary.pass { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::auto() };
    match cli.command {
        Command::Model { model, max_period, out } => cmd_model(&model, max_period, out.as_deref(), exec),
        Command::SpectralZeta { model, degree, s, z, method, theta_cutoff, order, normalized_det } => {
            cmd_spectral_zeta(&model, degree, s, z, method, theta_cutoff, order, normalized_det)
        }
        Command::DynamicalZeta { model, s, length, per_iterate_index } => {
            cmd_dynamical_zeta(&model, s, length, per_iterate_index, exec)
        }
        Command::Verify(args) => cmd_verify(&args, exec),
        Command::Lefschetz { model, bumps, cutoff, tol, json } => {
            cmd_lefschetz(&model, &bumps, cutoff, tol, json.as_deref(), exec)
        }
        Command::Selftest => selftest::run(exec),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
