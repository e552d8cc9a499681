//! Closed orbits of suspended toral automorphisms.
//!
//! For the suspension of x ↦ Ax on T² with constant roof ℓ, a closed orbit
//! of primitive period n has length nℓ. Periodic points of A^n number
//! |det(I - A^n)| = |1 - tr(A^n) + det(A)^n|, and primitive orbit counts
//! follow by Möbius inversion. All counting is exact.

mod cache;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

pub use cache::{cache_dir_from_env, cached_primitive_orbits, CacheStatus, CACHE_ENV, DEFAULT_CACHE_DIR};

/// A hyperbolic integer matrix with |det| = 1 and a constant return time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingTorusModel {
    matrix: [[i64; 2]; 2],
    return_time: f64,
}

impl MappingTorusModel {
    pub fn new(matrix: [[i64; 2]; 2], return_time: f64) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::UnsupportedModel(format!("|det| must be 1, got det = {det}")));
        }
        if !(return_time > 0.0 && return_time.is_finite()) {
            return Err(Error::UnsupportedModel(format!("return time must be positive, got {return_time}")));
        }
        let model = MappingTorusModel { matrix, return_time };
        if !model.is_hyperbolic() {
            return Err(Error::UnsupportedModel(format!(
                "matrix {matrix:?} is not hyperbolic (trace {}, det {det})",
                model.trace()
            )));
        }
        Ok(model)
    }

    /// The cat map [[2,1],[1,1]] with the given return time.
    pub fn cat(return_time: f64) -> Self {
        MappingTorusModel::new([[2, 1], [1, 1]], return_time).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn return_time(&self) -> f64 {
        self.return_time
    }

    pub fn trace(&self) -> i64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn det(&self) -> i64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    fn is_hyperbolic(&self) -> bool {
        // eigenvalues off the unit circle: t² - 4·det > 0 and no root of modulus 1
        let (t, d) = (self.trace(), self.det());
        if d == 1 {
            t.abs() > 2
        } else {
            t != 0
        }
    }

    /// The eigenvalue of modulus > 1, with its sign.
    pub fn leading_eigenvalue(&self) -> f64 {
        let t = self.trace() as f64;
        let disc = (t * t - 4.0 * self.det() as f64).sqrt();
        if t >= 0.0 {
            0.5 * (t + disc)
        } else {
            0.5 * (t - disc)
        }
    }

    /// det = +1 and trace > 2: every σ_n equals -1 and the orbit index is
    /// a single per-orbit sign.
    pub fn has_constant_index(&self) -> bool {
        self.det() == 1 && self.trace() > 2
    }
}

/// tr(A^n) via t_{n+1} = tr·t_n - det·t_{n-1}, t_0 = 2, t_1 = tr.
pub fn trace_power(model: &MappingTorusModel, n: u32) -> BigInt {
    trace_powers(model, n).pop().expect("n+1 entries")
}

/// t_0..=t_n.
pub fn trace_powers(model: &MappingTorusModel, n: u32) -> Vec<BigInt> {
    let tr = BigInt::from(model.trace());
    let det = BigInt::from(model.det());
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigInt::from(2));
    if n >= 1 {
        out.push(tr.clone());
    }
    for k in 2..=n as usize {
        let next = &tr * &out[k - 1] - &det * &out[k - 2];
        out.push(next);
    }
    out
}

/// Unsigned fixed-point count of A^n and the sign of det(I - A^n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointData {
    pub count: BigInt,
    pub sign: i8,
}

fn fixed_point_from_trace(model: &MappingTorusModel, n: u32, t_n: &BigInt) -> Result<FixedPointData> {
    let det_pow = if model.det() == -1 && n % 2 == 1 { -1 } else { 1 };
    let d = BigInt::one() - t_n + BigInt::from(det_pow);
    if d.is_zero() {
        return Err(Error::Degenerate { period: n });
    }
    let sign = if d.is_negative() { -1 } else { 1 };
    Ok(FixedPointData { count: d.abs(), sign })
}

/// F_n = |det(I - A^n)| and σ_n = sgn det(I - A^n).
pub fn fixed_point_data(model: &MappingTorusModel, n: u32) -> Result<FixedPointData> {
    if n == 0 {
        return Err(Error::Domain("period must be at least 1".into()));
    }
    fixed_point_from_trace(model, n, &trace_power(model, n))
}

/// Möbius function by trial division.
pub fn mobius(mut n: u32) -> i32 {
    assert!(n >= 1);
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Primitive closed orbits of one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    #[serde(rename = "n")]
    pub period: u32,
    pub length: f64,
    #[serde(with = "decimal")]
    pub count: BigInt,
    pub index: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub matrix: [[i64; 2]; 2],
    pub return_time: f64,
    pub max_period: u32,
    pub entropy: f64,
    pub rows: Vec<OrbitRow>,
    /// σ_n = sgn det(I - A^n) for n = 1..=max_period.
    pub iterate_signs: Vec<i8>,
}

impl OrbitTable {
    /// A table with no orbits, covering every length.
    pub fn empty() -> Self {
        OrbitTable {
            matrix: [[0, 0], [0, 0]],
            return_time: 1.0,
            max_period: u32::MAX,
            entropy: 0.0,
            rows: Vec::new(),
            iterate_signs: Vec::new(),
        }
    }

    /// Longest primitive length the table is complete up to.
    pub fn max_length(&self) -> f64 {
        if self.max_period == u32::MAX {
            f64::INFINITY
        } else {
            self.max_period as f64 * self.return_time
        }
    }

    pub fn has_constant_index(&self) -> bool {
        self.iterate_signs.windows(2).all(|w| w[0] == w[1])
    }

    /// σ for the n-th iterate count, when n ≤ max_period.
    pub fn iterate_sign(&self, n: u32) -> Option<i8> {
        self.iterate_signs.get(n.checked_sub(1)? as usize).copied()
    }
}

/// Primitive orbit counts P_n, n ≤ max_period, from n·P_n = Σ_{d|n} μ(n/d) F_d.
pub fn primitive_orbits(model: &MappingTorusModel, max_period: u32, exec: Execution) -> Result<OrbitTable> {
    if max_period == 0 {
        return Err(Error::Domain("max_period must be at least 1".into()));
    }
    let traces = trace_powers(model, max_period);
    let fixed: Vec<FixedPointData> = (1..=max_period)
        .map(|n| fixed_point_from_trace(model, n, &traces[n as usize]))
        .collect::<Result<_>>()?;
    let periods: Vec<u32> = (1..=max_period).collect();
    let rows = exec.map(&periods, |&n| {
        let mut acc = BigInt::zero();
        for d in (1..=n).filter(|d| n % d == 0) {
            match mobius(n / d) {
                1 => acc += &fixed[d as usize - 1].count,
                -1 => acc -= &fixed[d as usize - 1].count,
                _ => {}
            }
        }
        let n_big = BigInt::from(n);
        if acc.is_negative() || !(&acc % &n_big).is_zero() {
            return Err(Error::Inconsistent {
                period: n,
                reason: format!("Möbius sum {acc} is not a non-negative multiple of {n}"),
            });
        }
        Ok(OrbitRow {
            period: n,
            length: n as f64 * model.return_time,
            count: acc / n_big,
            index: fixed[n as usize - 1].sign,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(OrbitTable {
        matrix: model.matrix,
        return_time: model.return_time,
        max_period,
        entropy: topological_entropy(model),
        rows,
        iterate_signs: fixed.iter().map(|f| f.sign).collect(),
    })
}

/// h = log|λ_max| / ℓ.
pub fn topological_entropy(model: &MappingTorusModel) -> f64 {
    model.leading_eigenvalue().abs().ln() / model.return_time
}

/// Number of primitive orbits with length ≤ `length` (requires a complete table).
pub fn orbit_count_up_to(table: &OrbitTable, length: f64) -> Option<f64> {
    if length > table.max_length() {
        return None;
    }
    Some(
        table
            .rows
            .iter()
            .filter(|r| r.length <= length)
            .map(|r| r.count.to_f64().unwrap_or(f64::INFINITY))
            .sum(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_traces() {
        let m = MappingTorusModel::cat(1.0);
        assert_eq!(trace_power(&m, 1), BigInt::from(3));
        assert_eq!(trace_power(&m, 2), BigInt::from(7));
        assert_eq!(trace_power(&m, 3), BigInt::from(18));
        assert_eq!(trace_power(&m, 4), BigInt::from(47));
    }

    #[test]
    fn trace_matches_matrix_power() {
        let m = MappingTorusModel::new([[3, 2], [1, 1]], 1.0).unwrap();
        let a = [[3i128, 2], [1, 1]];
        let mut p = [[1i128, 0], [0, 1]];
        for n in 1..=30 {
            p = [
                [p[0][0] * a[0][0] + p[0][1] * a[1][0], p[0][0] * a[0][1] + p[0][1] * a[1][1]],
                [p[1][0] * a[0][0] + p[1][1] * a[1][0], p[1][0] * a[0][1] + p[1][1] * a[1][1]],
            ];
            assert_eq!(trace_power(&m, n), BigInt::from(p[0][0] + p[1][1]), "n={n}");
        }
    }

    #[test]
    fn cat_fixed_points() {
        let m = MappingTorusModel::cat(1.0);
        let expect = [(1, 1), (2, 5), (3, 16)];
        for (n, f) in expect {
            let d = fixed_point_data(&m, n).unwrap();
            assert_eq!(d.count, BigInt::from(f));
            assert_eq!(d.sign, -1);
        }
    }

    #[test]
    fn cat_primitive_counts() {
        let m = MappingTorusModel::cat(1.0);
        let t = primitive_orbits(&m, 6, Execution::Sequential).unwrap();
        let p: Vec<i64> = t.rows.iter().map(|r| r.count.to_i64().unwrap()).collect();
        assert_eq!(p, vec![1, 2, 5, 10, 24, 50]);
        assert!(t.rows.iter().all(|r| r.index == -1));
    }

    #[test]
    fn exceeds_64_bits_without_overflow() {
        let m = MappingTorusModel::cat(1.0);
        let t = trace_power(&m, 120);
        assert!(t.bits() > 64);
        let table = primitive_orbits(&m, 120, Execution::auto()).unwrap();
        assert!(table.rows.iter().all(|r| !r.count.is_negative()));
    }

    #[test]
    fn rejects_bad_models() {
        assert!(MappingTorusModel::new([[1, 0], [0, 1]], 1.0).is_err());
        assert!(MappingTorusModel::new([[2, 0], [0, 1]], 1.0).is_err());
        assert!(MappingTorusModel::new([[1, 1], [0, 1]], 1.0).is_err());
        assert!(MappingTorusModel::new([[2, 1], [1, 1]], 0.0).is_err());
        assert!(MappingTorusModel::new([[0, 1], [1, 0]], 1.0).is_err());
    }

    #[test]
    fn entropy() {
        let h = topological_entropy(&MappingTorusModel::cat(1.0));
        assert!((h - 0.962_423_650_1).abs() < 1e-10);
        let h2 = topological_entropy(&MappingTorusModel::cat(2.0));
        assert!((h2 - h / 2.0).abs() < 1e-15);
    }

    #[test]
    fn index_varies_for_negative_trace() {
        let m = MappingTorusModel::new([[-2, 1], [1, -1]], 1.0).unwrap();
        let t = primitive_orbits(&m, 6, Execution::Sequential).unwrap();
        assert!(!t.has_constant_index());
        assert!(!m.has_constant_index());
    }

    #[test]
    fn mobius_values() {
        let mu: Vec<i32> = (1..=12).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn serialized_counts_are_decimal_strings() {
        let t = primitive_orbits(&MappingTorusModel::cat(1.0), 2, Execution::Sequential).unwrap();
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["rows"][1]["count"], "2");
        assert_eq!(json["rows"][1]["n"], 2);
        let back: OrbitTable = serde_json::from_value(json).unwrap();
        assert_eq!(back, t);
    }
}
