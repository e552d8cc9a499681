//! Quick oracle checks covering each engine.

use std::f64::consts::PI;

use zetaforge::dynzeta::{closed_form_zeta, euler_product};
use zetaforge::lefschetz::{laplace_identity_check, lhs_trace, rhs_orbits, BumpFunction};
use zetaforge::orbits::{primitive_orbits, MappingTorusModel};
use zetaforge::specfun::{gamma, hankel_extrapolated, hurwitz_zeta, rgamma};
use zetaforge::spectra::{mapping_torus_spectrum, ApSpectrum, SpectrumSet};
use zetaforge::speczeta::{alternating_det_product, det_infinity, xi_continued, xi_direct, ContinuationOptions};
use zetaforge::{Complex64, Execution, Result};

use crate::Failure;

struct Check {
    name: &'static str,
    run: fn(Execution) -> Result<(f64, f64)>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

const CHECKS: &[Check] = &[
    Check { name: "gamma(5) = 24", run: |_| Ok((rel(gamma(c(5.0))?, c(24.0)), 1e-13)) },
    Check {
        name: "hurwitz_zeta(2, 1) = pi^2/6",
        run: |_| Ok((rel(hurwitz_zeta(c(2.0), c(1.0))?, c(PI * PI / 6.0)), 1e-12)),
    },
    Check {
        name: "hankel contour, lambda = 2, z = 0.3",
        run: |_| {
            let v = hankel_extrapolated(2.0, c(0.3), 0.25, 6)?;
            Ok((rel(v, c(2f64.powf(-0.7)) * rgamma(c(0.3))), 1e-6))
        },
    },
    Check {
        name: "cat primitive counts 1 2 5 10 24 50",
        run: |exec| {
            let t = primitive_orbits(&MappingTorusModel::cat(1.0), 6, exec)?;
            let got: Vec<String> = t.rows.iter().map(|r| r.count.to_string()).collect();
            Ok((if got == ["1", "2", "5", "10", "24", "50"] { 0.0 } else { 1.0 }, 0.0))
        },
    },
    Check {
        name: "xi_direct = xi_continued, cat degree 1, s = 2, z = 2",
        run: |_| {
            let spec = mapping_torus_spectrum(&MappingTorusModel::cat(1.0), 1)?;
            let d = xi_direct(&spec, c(2.0), c(2.0), None)?.value;
            let t = xi_continued(&spec, c(2.0), c(2.0), &ContinuationOptions::default())?.value;
            Ok((rel(t, d), 1e-8))
        },
    },
    Check {
        name: "det of {2 pi i k} at s = 1 is 1 - 1/e",
        run: |_| {
            let spec = SpectrumSet::new(0, vec![ApSpectrum::new(c(0.0), 2.0 * PI, 1)?], vec![])?;
            let d = det_infinity(&spec, c(1.0), &ContinuationOptions::default())?;
            Ok((rel(d, c(1.0 - (-1f64).exp())), 1e-8))
        },
    },
    Check {
        name: "Euler product = closed form, s = 2, L = 40",
        run: |exec| {
            let m = MappingTorusModel::cat(1.0);
            let t = primitive_orbits(&m, 40, exec)?;
            Ok((rel(euler_product(&t, c(2.0), 40.0)?.value, closed_form_zeta(&m, c(2.0))?), 1e-10))
        },
    },
    Check {
        name: "determinant product = closed form, s = 2",
        run: |_| {
            let m = MappingTorusModel::cat(1.0);
            let d = alternating_det_product(&m, c(2.0), &ContinuationOptions::default())?;
            Ok((rel(d, closed_form_zeta(&m, c(2.0))?), 1e-6))
        },
    },
    Check {
        name: "trace formula, bump c = 2, w = 0.3",
        run: |exec| {
            let m = MappingTorusModel::cat(1.0);
            let t = primitive_orbits(&m, 3, exec)?;
            let b = BumpFunction::new(2.0, 0.3)?;
            let lhs = lhs_trace(&m, &b, 2000.0 * PI, 1e-8, exec)?;
            Ok(((lhs.value - rhs_orbits(&t, &b)?).norm(), 1e-6))
        },
    },
    Check {
        name: "Laplace identity, s = 2, z = 2, L = 60",
        run: |exec| {
            let m = MappingTorusModel::cat(1.0);
            let t = primitive_orbits(&m, 60, exec)?;
            let r = laplace_identity_check(&m, &t, c(2.0), c(2.0), 60.0)?;
            Ok(((r.lhs - r.rhs).norm(), 1e-7))
        },
    },
];

pub fn run(exec: Execution) -> std::result::Result<u8, Failure> {
    let mut failed = 0;
    for check in CHECKS {
        match (check.run)(exec) {
            Ok((err, tol)) if err <= tol => println!("PASS {} (error {err:.2e}, tolerance {tol:.0e})", check.name),
            Ok((err, tol)) => {
                failed += 1;
                println!("FAIL {} (error {err:.2e}, tolerance {tol:.0e})", check.name);
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {} ({e})", check.name);
            }
        }
    }
    println!("{} of {} checks passed", CHECKS.len() - failed, CHECKS.len());
    if failed > 0 {
        return Err(Failure::Numeric(format!("{failed} self-test checks failed")));
    }
    Ok(0)
}
