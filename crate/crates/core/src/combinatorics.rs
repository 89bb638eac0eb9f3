//! Counting sequences in `ℤ ∖ {-1, 0, 1}` by absolute sum, and the
//! ensembles `E(N, R, n, t)` behind the strong-regularity exponent bound.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::rounding::{self, Enclosure};

/// Largest `N` for which [`card_e`] enumerates.
pub const CARD_E_CAP: u32 = 20;

/// `C_k` for `2 <= k <= max_k`, with `C_0 = 1` (the empty sequence) and
/// `C_1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqCountTable {
    pub max_k: u32,
    #[serde(with = "uint_vec")]
    pub counts: Vec<BigUint>,
}

mod uint_vec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|n| n.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl SeqCountTable {
    pub fn get(&self, k: u32) -> Option<&BigUint> {
        k.checked_sub(2).and_then(|i| self.counts.get(i as usize))
    }

    /// `(k, C_k)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (u32, &BigUint)> {
        self.counts.iter().enumerate().map(|(i, c)| (i as u32 + 2, c))
    }

    /// Every `C_k <= 2^k`.
    pub fn within_power_of_two(&self) -> bool {
        self.rows().all(|(k, c)| *c <= BigUint::one() << k)
    }
}

/// First-term decomposition: `C_m = Σ_{i=2}^{m} 2 C_{m-i}`.
pub fn count_ck(max_k: u32) -> Result<SeqCountTable> {
    if max_k < 2 {
        return Err(Error::InvalidParam("max_k must be at least 2".into()));
    }
    let mut c: Vec<BigUint> = vec![BigUint::one(), BigUint::zero()];
    for m in 2..=max_k as usize {
        let s: BigUint = (2..=m).map(|i| &c[m - i] * 2u32).sum();
        c.push(s);
    }
    Ok(SeqCountTable {
        max_k,
        counts: c.split_off(2),
    })
}

/// Exhaustive count of signed sequences with parts `|a| >= 2` summing to `k`.
pub fn count_ck_brute(k: u32) -> u64 {
    fn go(rest: u32, out: &mut u64) {
        if rest == 0 {
            *out += 1;
            return;
        }
        for a in 2..=rest {
            for _sign in 0..2 {
                go(rest - a, out);
            }
        }
    }
    let mut n = 0;
    go(k, &mut n);
    n
}

/// `|E(N)|` with its split by `(R, n, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleCard {
    pub n_total: u32,
    pub m: u32,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    #[serde(with = "rational::serde_uint")]
    pub card: BigUint,
    /// Keys are `"R,n,t"`.
    pub by_r_n_t: BTreeMap<String, u64>,
    /// Enclosure of `N³ 2^(N(1-δ)) (e² M² / δ)^((δN+1)/M)`.
    pub bound: Enclosure,
    /// `card <= bound.lo`.
    pub holds: bool,
}

fn check_m_delta(m: u32, delta: &Rational) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidParam("M must be positive".into()));
    }
    if !(delta > &Rational::zero() && delta < &Rational::one()) {
        return Err(Error::InvalidParam("δ must lie in (0, 1)".into()));
    }
    Ok(())
}

/// Enumerates `E(N) = ⋃_{R >= ⌊δN⌋+1} E(N, R, n, t)`: sequences in
/// `ℤ ∖ {-1,0,1}` with `Σ|a_j| = N`, big part `R = Σ_{|a_j|>M} |a_j|`,
/// `t` big terms, `n` terms in all.
pub fn card_e(n_total: u32, m: u32, delta: &Rational, bits: u32) -> Result<EnsembleCard> {
    check_m_delta(m, delta)?;
    if n_total > CARD_E_CAP {
        return Err(Error::Budget(format!("N above the enumeration cap {CARD_E_CAP}")));
    }
    let r_min = rational::floor(&(delta * int(n_total as i64))) + 1;
    let mut by: BTreeMap<(u32, u32, u32), u64> = BTreeMap::new();
    // (rest, R, n, t)
    let mut stack = vec![(n_total, 0u32, 0u32, 0u32)];
    while let Some((rest, r, n, t)) = stack.pop() {
        if rest == 0 {
            if num_bigint::BigInt::from(r) >= r_min {
                *by.entry((r, n, t)).or_default() += 1;
            }
            continue;
        }
        for a in 2..=rest {
            let big = a > m;
            let next = (rest - a, r + if big { a } else { 0 }, n + 1, t + big as u32);
            stack.push(next);
            stack.push(next);
        }
    }
    let card: u64 = by.values().sum();
    let bound = card_e_bound(n_total, m, delta, bits);
    Ok(EnsembleCard {
        n_total,
        m,
        delta: delta.clone(),
        card: BigUint::from(card),
        by_r_n_t: by.into_iter().map(|((r, n, t), c)| (format!("{r},{n},{t}"), c)).collect(),
        holds: int(card as i64) <= bound.lo,
        bound,
    })
}

/// `N³ 2^(N(1-δ)) (e² M² / δ)^((δN+1)/M)`.
pub fn card_e_bound(n_total: u32, m: u32, delta: &Rational, bits: u32) -> Enclosure {
    let n = int(n_total as i64);
    let cube = &n * &n * &n;
    let two_pow = rounding::pow_rat(&int(2), &(&n * (Rational::one() - delta)), bits);
    let ln_base = rounding::ln(&(int((m * m) as i64) / delta), bits).add_rat(&int(2));
    let y = (delta * &n + Rational::one()) / int(m as i64);
    let e_pow = rounding::exp_enc(&ln_base.scale(&y), bits);
    two_pow.mul(&e_pow).scale(&cube)
}

/// `[1 − δ, 1 − δ + (δ/M) log₂(e² M² / δ)]`, the upper end as an enclosure.
pub fn strong_regularity_bracket(m: u32, delta: &Rational, bits: u32) -> Result<(Rational, Enclosure)> {
    check_m_delta(m, delta)?;
    let lo = Rational::one() - delta;
    let ln_arg = rounding::ln(&(int((m * m) as i64) / delta), bits).add_rat(&int(2));
    let log2 = ln_arg.div(&rounding::ln2(bits))?;
    Ok((lo.clone(), log2.scale(&(delta / int(m as i64))).add_rat(&lo)))
}

/// Exact left side against an enclosure of the right side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    #[serde(with = "rational::serde_uint")]
    pub lhs: BigUint,
    pub rhs: Enclosure,
    /// `lhs <= rhs.lo`.
    pub holds: bool,
}

fn check(lhs: BigUint, rhs: Enclosure) -> InequalityCheck {
    let holds = Rational::from_integer(lhs.clone().into()) <= rhs.lo;
    InequalityCheck { lhs, rhs, holds }
}

/// `x^(R/M)` for `x = e^c · q`, i.e. `exp((R/M)(c + ln q))`.
fn e_power(c: i64, q: &Rational, r: u32, m: u32, bits: u32) -> Enclosure {
    let y = int(r as i64) / int(m as i64);
    rounding::exp_enc(&rounding::ln(q, bits).add_rat(&int(c)).scale(&y), bits)
}

/// `binom(n, t) <= (e N M / 2R)^(R/M)`.
///
/// Admissible tuples are those that occur in `E(N, R, n, t)` with `M >= 3`:
/// `t <= n`, `2n <= N` (every term has `|a| >= 2`), `t <= R/M` and `1 <= R <= N`.
pub fn binom_bound_check(n: u32, t: u32, n_total: u32, r: u32, m: u32, bits: u32) -> Result<InequalityCheck> {
    if m < 3 || t > n || 2 * n > n_total || r < 1 || r > n_total || (t as u64) * (m as u64) > r as u64 {
        return Err(Error::Precondition(format!(
            "(n, t, N, R, M) = ({n}, {t}, {n_total}, {r}, {m}) is not admissible"
        )));
    }
    let q = int((n_total as i64) * (m as i64)) / int(2 * r as i64);
    Ok(check(binomial(BigUint::from(n), BigUint::from(t)), e_power(1, &q, r, m, bits)))
}

/// `2^t binom(R, t) <= 2^t binom(R, ⌊R/M⌋) <= (2 e M)^(R/M)`; both links
/// are reported.
pub fn composition_count_check(r: u32, t: u32, m: u32, bits: u32) -> Result<(InequalityCheck, InequalityCheck)> {
    if m < 2 || (t as u64) * (m as u64) > r as u64 {
        return Err(Error::Precondition(format!("t = {t} exceeds R/M = {r}/{m}")));
    }
    let k = r / m;
    let lhs = (BigUint::one() << t) * binomial(BigUint::from(r), BigUint::from(t));
    let mid = (BigUint::one() << t) * binomial(BigUint::from(r), BigUint::from(k));
    let first = check(lhs, Enclosure::point(Rational::from_integer(mid.clone().into())));
    let second = check(mid, e_power(1, &int(2 * m as i64), r, m, bits));
    Ok((first, second))
}
