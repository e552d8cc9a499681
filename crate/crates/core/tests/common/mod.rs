//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashSet;

/// Primitive orbit counts of period exactly `n` for x ↦ Ax on the torus,
/// found by scanning the lattice (1/D)ℤ² where D = |det(A^n - I)|.
pub fn brute_force_primitive_count(a: [[i64; 2]; 2], n: u32) -> u64 {
    let mut p = [[1i64, 0], [0, 1]];
    for _ in 0..n {
        p = mul(p, a);
    }
    let m = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
    let d = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    assert!(d > 0, "degenerate period {n}");

    let fixed: Vec<(i64, i64)> = (0..d)
        .flat_map(|y0| (0..d).map(move |y1| (y0, y1)))
        .filter(|&(y0, y1)| (m[0][0] * y0 + m[0][1] * y1) % d == 0 && (m[1][0] * y0 + m[1][1] * y1) % d == 0)
        .collect();
    assert_eq!(fixed.len() as i64, d, "fixed point count of A^{n}");

    let step = |(y0, y1): (i64, i64)| {
        ((a[0][0] * y0 + a[0][1] * y1).rem_euclid(d), (a[1][0] * y0 + a[1][1] * y1).rem_euclid(d))
    };
    let mut seen = HashSet::new();
    let mut orbits = 0;
    for &y in &fixed {
        if seen.contains(&y) {
            continue;
        }
        let mut period = 0;
        let mut cur = y;
        loop {
            seen.insert(cur);
            cur = step(cur);
            period += 1;
            if cur == y {
                break;
            }
        }
        if period == n {
            orbits += 1;
        }
    }
    orbits
}

fn mul(x: [[i64; 2]; 2], y: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

pub fn rel(a: zetaforge::Complex64, b: zetaforge::Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
