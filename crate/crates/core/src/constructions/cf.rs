//! Continued-fraction Cantor sets `F_k = {[0; a_1, a_2, ...] : 1 <= a_j <= k}`.

use num_bigint::BigInt;
use num_traits::One;

use crate::cantor::{CoverApprox, DEFAULT_PART_BUDGET};
use crate::error::{Error, Result};
use crate::interval::{normalize, Interval};
use crate::rational::{int, Rational};

/// Outer cover of `F_k` by the depth-`n` cylinders
/// `[0; a_1, ..., a_n + y]`, `y ∈ [1/(k+1), 1]`.
///
/// With convergents `p_n/q_n` the cylinder is the image of that `y` range
/// under `y ↦ (p_n + y p_{n-1}) / (q_n + y q_{n-1})`.
pub fn cf_cantor(k: u32, depth: u32) -> Result<CoverApprox> {
    if k < 1 {
        return Err(Error::InvalidParam("k must be at least 1".into()));
    }
    if depth < 1 {
        return Err(Error::InvalidParam("depth must be at least 1".into()));
    }
    let count = (k as u64).checked_pow(depth).unwrap_or(u64::MAX);
    if count > DEFAULT_PART_BUDGET {
        return Err(Error::Budget(format!("{k}^{depth} cylinders exceed the part budget")));
    }
    let y_lo = Rational::new(BigInt::one(), BigInt::from(k + 1));
    let y_hi = Rational::one();
    let mut parts = Vec::with_capacity(count as usize);
    // (p_{n-1}, q_{n-1}, p_n, q_n, n)
    let mut stack = vec![(BigInt::one(), BigInt::from(0), BigInt::from(0), BigInt::one(), 0u32)];
    while let Some((pm, qm, p, q, n)) = stack.pop() {
        if n == depth {
            let x = |y: &Rational| {
                (Rational::from_integer(p.clone()) + y * Rational::from_integer(pm.clone()))
                    / (Rational::from_integer(q.clone()) + y * Rational::from_integer(qm.clone()))
            };
            let (a, b) = (x(&y_lo), x(&y_hi));
            parts.push(if a <= b { Interval::closed(a, b) } else { Interval::closed(b, a) });
            continue;
        }
        for a in 1..=k {
            let a = BigInt::from(a);
            stack.push((p.clone(), q.clone(), &a * &p + &pm, &a * &q + &qm, n + 1));
        }
    }
    Ok(CoverApprox {
        depth,
        cover: normalize(parts),
    })
}

/// `[0; a_1, ..., a_n]` as an exact rational.
pub fn cf_value(digits: &[u32]) -> Rational {
    let mut x = Rational::from_integer(BigInt::from(0));
    for &a in digits.iter().rev() {
        x = (int(a as i64) + x).recip();
    }
    x
}
