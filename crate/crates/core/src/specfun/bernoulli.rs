//! Exact Bernoulli numbers.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_BERNOULLI_INDEX: usize = 64;

/// B_0..=B_{n_max} (convention B_1 = -1/2) from Σ_{j≤n} C(n+1, j) B_j = 0.
pub fn bernoulli_numbers(n_max: usize) -> Result<Vec<BigRational>> {
    if n_max > MAX_BERNOULLI_INDEX {
        return Err(Error::Domain(format!(
            "Bernoulli numbers are tabulated up to index {MAX_BERNOULLI_INDEX}, asked for {n_max}"
        )));
    }
    let mut out: Vec<BigRational> = Vec::with_capacity(n_max + 1);
    out.push(BigRational::from_integer(BigInt::from(1)));
    for n in 1..=n_max {
        // binomial row C(n+1, j), j = 0..n
        let mut binom = BigInt::from(1);
        let mut acc = BigRational::zero();
        for (j, b) in out.iter().enumerate() {
            acc += b * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        out.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    Ok(out)
}

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        bernoulli_numbers(MAX_BERNOULLI_INDEX)
            .expect("index within table")
            .iter()
            .map(|b| b.to_f64().expect("finite"))
            .collect()
    })
}

/// B_n rounded to f64, n ≤ 64.
pub fn bernoulli_f64(n: usize) -> f64 {
    table()[n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn known_values() {
        let b = bernoulli_numbers(12).unwrap();
        assert_eq!(b[0], rat(1, 1));
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], rat(0, 1));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[12], rat(-691, 2730));
    }

    #[test]
    fn odd_indices_vanish() {
        let b = bernoulli_numbers(64).unwrap();
        for n in (3..=64).step_by(2) {
            assert!(b[n].is_zero(), "B_{n}");
        }
    }

    #[test]
    fn b64_exact() {
        let b = bernoulli_numbers(64).unwrap();
        let num: BigInt = "-106783830147866529886385444979142647942017".parse().unwrap();
        assert_eq!(b[64], BigRational::new(num, BigInt::from(510)));
    }

    #[test]
    fn beyond_table_is_rejected() {
        assert!(bernoulli_numbers(65).is_err());
    }
}
