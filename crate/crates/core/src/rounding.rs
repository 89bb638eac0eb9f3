//! Certified enclosures and directed rounding.
//!
//! Irrational quantities (logarithms, non-integer powers, `e`) are never
//! represented exactly. They are produced as an [`Enclosure`] with dyadic
//! endpoints that provably contains the true value. Every series below rounds
//! its partial sums in the safe direction and adds an explicit remainder bound.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, approx_log2, ceil, floor, pow2, Rational};

/// Closed rational interval `[lo, hi]` known to contain some real quantity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rational::int(2)
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure::new(lo, hi)
    }

    pub fn scale(&self, q: &Rational) -> Enclosure {
        if q.is_negative() {
            Enclosure::new(&self.hi * q, &self.lo * q)
        } else {
            Enclosure::new(&self.lo * q, &self.hi * q)
        }
    }

    pub fn add_rat(&self, q: &Rational) -> Enclosure {
        Enclosure::new(&self.lo + q, &self.hi + q)
    }

    /// `1/x`; the enclosure must not contain zero.
    pub fn recip(&self) -> Result<Enclosure> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(Enclosure::new(self.hi.recip(), self.lo.recip()))
        } else {
            Err(Error::Domain("reciprocal of an enclosure containing 0".into()))
        }
    }

    pub fn div(&self, o: &Enclosure) -> Result<Enclosure> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn hull(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(
            rational::min(&self.lo, &o.lo),
            rational::max(&self.hi, &o.hi),
        )
    }

    pub fn intersect(&self, o: &Enclosure) -> Option<Enclosure> {
        let lo = rational::max(&self.lo, &o.lo);
        let hi = rational::min(&self.hi, &o.hi);
        (lo <= hi).then(|| Enclosure::new(lo, hi))
    }

    pub fn clamp(&self, lo: &Rational, hi: &Rational) -> Enclosure {
        let c = |q: &Rational| rational::min(&rational::max(q, lo), hi);
        Enclosure::new(c(&self.lo), c(&self.hi))
    }

    /// Rounds both ends outward to `bits` significant bits.
    pub fn outward_bits(&self, bits: u32) -> Enclosure {
        Enclosure::new(down_rel(&self.lo, bits), up_rel(&self.hi, bits))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational::to_f64(&self.lo), rational::to_f64(&self.hi))
    }
}

/// Rounds toward `-inf` keeping `bits` significant binary digits.
pub fn down_rel(q: &Rational, bits: u32) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let shift = bits as i64 - approx_log2(q);
    let s = pow2(shift);
    Rational::from_integer(floor(&(q * &s))) / s
}

/// Rounds toward `+inf` keeping `bits` significant binary digits.
pub fn up_rel(q: &Rational, bits: u32) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let shift = bits as i64 - approx_log2(q);
    let s = pow2(shift);
    Rational::from_integer(ceil(&(q * &s))) / s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingMode {
    Exact,
    Outward,
    Inward,
}

/// Which side of a true value a published bound has to lie on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// Rounding policy: every irrational value is snapped to the dyadic grid
/// `2^-precision` in the direction that keeps the published statement true.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedRounding {
    pub mode: RoundingMode,
    pub precision: u32,
}

pub const DEFAULT_PRECISION: u32 = 64;

impl Default for DirectedRounding {
    fn default() -> Self {
        DirectedRounding::outward(DEFAULT_PRECISION)
    }
}

impl DirectedRounding {
    pub fn exact() -> Self {
        DirectedRounding {
            mode: RoundingMode::Exact,
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn outward(precision: u32) -> Self {
        DirectedRounding {
            mode: RoundingMode::Outward,
            precision,
        }
    }

    pub fn inward(precision: u32) -> Self {
        DirectedRounding {
            mode: RoundingMode::Inward,
            precision,
        }
    }

    /// Working precision for the series evaluations feeding this policy.
    pub fn work_bits(&self) -> u32 {
        self.precision + 24
    }

    fn grid(&self) -> Rational {
        pow2(self.precision as i64)
    }

    pub fn down(&self, q: &Rational) -> Rational {
        if self.mode == RoundingMode::Exact {
            return q.clone();
        }
        let g = self.grid();
        Rational::from_integer(floor(&(q * &g))) / g
    }

    pub fn up(&self, q: &Rational) -> Rational {
        if self.mode == RoundingMode::Exact {
            return q.clone();
        }
        let g = self.grid();
        Rational::from_integer(ceil(&(q * &g))) / g
    }

    /// Outward snap of an enclosure onto the grid.
    pub fn snap(&self, e: &Enclosure) -> Enclosure {
        Enclosure::new(self.down(&e.lo), self.up(&e.hi))
    }

    /// A single rational that is a valid bound of the given side.
    pub fn bound(&self, e: &Enclosure, side: Side) -> Result<Rational> {
        if self.mode == RoundingMode::Exact {
            return if e.is_point() {
                Ok(e.lo.clone())
            } else {
                Err(Error::Irrational)
            };
        }
        Ok(match side {
            Side::Lower => self.down(&e.lo),
            Side::Upper => self.up(&e.hi),
        })
    }

    /// Interval with endpoints only known as enclosures. `Outward` returns a
    /// superset of the true interval, `Inward` a subset (possibly empty, `None`).
    pub fn interval(&self, lo: &Enclosure, hi: &Enclosure) -> Result<Option<(Rational, Rational)>> {
        match self.mode {
            RoundingMode::Exact => {
                if lo.is_point() && hi.is_point() {
                    Ok((lo.lo <= hi.lo).then(|| (lo.lo.clone(), hi.lo.clone())))
                } else {
                    Err(Error::Irrational)
                }
            }
            RoundingMode::Outward => {
                let (a, b) = (self.down(&lo.lo), self.up(&hi.hi));
                Ok((a <= b).then_some((a, b)))
            }
            RoundingMode::Inward => {
                let (a, b) = (self.up(&lo.hi), self.down(&hi.lo));
                Ok((a < b).then_some((a, b)))
            }
        }
    }

    /// `x^p` for `x > 0`. Integer exponents are exact in every mode.
    pub fn pow(&self, x: &Rational, p: &Rational) -> Result<Enclosure> {
        if !x.is_positive() {
            return Err(Error::Domain("power of a non-positive base".into()));
        }
        if rational::is_integer(p) {
            return Ok(Enclosure::point(int_pow(x, p.numer())));
        }
        if self.mode == RoundingMode::Exact {
            return Err(Error::Irrational);
        }
        Ok(self.snap(&pow_rat(x, p, self.work_bits())))
    }

    /// `x^y` with an uncertain exponent.
    pub fn pow_enc(&self, x: &Rational, y: &Enclosure) -> Result<Enclosure> {
        if y.is_point() {
            return self.pow(x, &y.lo);
        }
        if self.mode == RoundingMode::Exact {
            return Err(Error::Irrational);
        }
        if !x.is_positive() {
            return Err(Error::Domain("power of a non-positive base".into()));
        }
        Ok(self.snap(&pow(x, y, self.work_bits())))
    }
}

fn int_pow(x: &Rational, k: &BigInt) -> Rational {
    let e: i32 = k
        .try_into()
        .expect("integer exponent out of range for exact power");
    num_traits::pow::Pow::pow(x, e)
}

// Fixed-point helpers: a non-negative value v is held as the integer v·2^w,
// rounded down or up as requested.

fn to_fix(q: &Rational, w: u32, upward: bool) -> BigInt {
    let scaled = q * pow2(w as i64);
    if upward {
        ceil(&scaled)
    } else {
        floor(&scaled)
    }
}

fn from_fix(n: BigInt, w: u32) -> Rational {
    Rational::new(n, BigInt::one() << w)
}

fn shr_round(n: BigInt, w: u32, upward: bool) -> BigInt {
    if upward {
        (n + ((BigInt::one() << w) - 1u32)) >> w
    } else {
        n >> w
    }
}

fn mul_fix(a: &BigInt, b: &BigInt, w: u32, upward: bool) -> BigInt {
    shr_round(a * b, w, upward)
}

fn div_small(a: &BigInt, d: u64, upward: bool) -> BigInt {
    if upward {
        (a + BigInt::from(d - 1)) / d
    } else {
        a / d
    }
}

/// `2 atanh(z)` bounds for dyadic `0 <= z_lo <= z_hi <= 1/3`.
fn two_atanh(z_lo: &Rational, z_hi: &Rational, bits: u32) -> Enclosure {
    let n = (bits / 3 + 4) as u64;
    let w = bits + 8;
    let series = |z: &Rational, upward: bool| -> Rational {
        if z.is_zero() {
            return Rational::zero();
        }
        let zf = to_fix(z, w, upward);
        let z2 = mul_fix(&zf, &zf, w, upward);
        let mut t = zf;
        let mut s = BigInt::zero();
        for i in 0..n {
            s += div_small(&t, 2 * i + 1, upward);
            t = mul_fix(&t, &z2, w, upward);
        }
        if upward {
            // Remainder: t_n / (2n+1) / (1 - z^2) <= 2 t_n.
            s += &t * 2u32;
        }
        from_fix(s, w)
    };
    Enclosure::new(
        series(z_lo, false) * rational::int(2),
        series(z_hi, true) * rational::int(2),
    )
}

pub fn ln2(bits: u32) -> Enclosure {
    let third = rational::rat(1, 3);
    let zl = down_rel(&third, bits + 8);
    let zh = up_rel(&third, bits + 8);
    two_atanh(&zl, &zh, bits + 8).outward_bits(bits)
}

/// Natural logarithm of a positive rational.
pub fn ln(x: &Rational, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "ln of a non-positive rational");
    if x.is_one() {
        return Enclosure::point(Rational::zero());
    }
    let w = bits + 16;
    let mut k = approx_log2(x);
    let mut y = x / pow2(k);
    while y >= rational::int(2) {
        y /= rational::int(2);
        k += 1;
    }
    while y < Rational::one() {
        y *= rational::int(2);
        k -= 1;
    }
    let one = Rational::one();
    let z = (&y - &one) / (&y + &one);
    let (zl, zh) = (down_rel(&z, w), up_rel(&z, w));
    let core = two_atanh(&zl, &zh, w);
    let l2 = ln2(w + 8);
    core.add(&l2.scale(&rational::int(k))).outward_bits(bits)
}

pub fn ln_enc(e: &Enclosure, bits: u32) -> Enclosure {
    Enclosure::new(ln(&e.lo, bits).lo, ln(&e.hi, bits).hi)
}

/// `ln a / ln b` for positive `a` and `b > 1`.
pub fn log_ratio(a: &Rational, b: &Rational, bits: u32) -> Enclosure {
    assert!(b > &Rational::one(), "log base must exceed 1");
    ln(a, bits + 8)
        .div(&ln(b, bits + 8))
        .expect("ln b > 0")
        .outward_bits(bits)
}

fn exp_pos(x: &Rational, bits: u32) -> Enclosure {
    let m = (approx_log2(x) + 2).max(0);
    let w = bits + m as u32 + 16;
    let r = x / pow2(m);
    let taylor = |r: &Rational, upward: bool| -> BigInt {
        let rf = to_fix(r, w, upward);
        let one = BigInt::one() << w;
        let mut s = one.clone();
        let mut t = one;
        let mut i = 1u64;
        // Stop once a term is at most one unit in the last place.
        while t > BigInt::one() {
            t = div_small(&mul_fix(&t, &rf, w, upward), i, upward);
            s += &t;
            i += 1;
        }
        if upward {
            // Remainder after the last term t is at most 2t for r <= 1/2.
            s += &t * 2u32;
        }
        s
    };
    let mut lo = taylor(&r, false);
    let mut hi = taylor(&r, true);
    for _ in 0..m {
        lo = mul_fix(&lo, &lo, w, false);
        hi = mul_fix(&hi, &hi, w, true);
    }
    Enclosure::new(from_fix(lo, w), from_fix(hi, w)).outward_bits(bits)
}

pub fn exp(x: &Rational, bits: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::point(Rational::one());
    }
    if x.is_positive() {
        exp_pos(x, bits)
    } else {
        exp_pos(&-x, bits + 4)
            .recip()
            .expect("exp is positive")
            .outward_bits(bits)
    }
}

pub fn exp_enc(e: &Enclosure, bits: u32) -> Enclosure {
    Enclosure::new(exp(&e.lo, bits).lo, exp(&e.hi, bits).hi)
}

/// Euler's number.
pub fn e_const(bits: u32) -> Enclosure {
    exp(&Rational::one(), bits)
}

/// `x^y` for `x > 0` and an enclosure `y`.
pub fn pow(x: &Rational, y: &Enclosure, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "pow of a non-positive base");
    if x.is_one() {
        return Enclosure::point(Rational::one());
    }
    let w = bits + 16;
    exp_enc(&ln(x, w).mul(y), w).outward_bits(bits)
}

pub fn pow_rat(x: &Rational, y: &Rational, bits: u32) -> Enclosure {
    if rational::is_integer(y) {
        return Enclosure::point(int_pow(x, y.numer()));
    }
    pow(x, &Enclosure::point(y.clone()), bits)
}

/// Upper bound of `x^y` over `y` in an enclosure, for many bases at once.
/// Lengths repeat heavily in self-similar gap lists, so results are memoized.
#[derive(Debug, Default)]
pub struct PowCache {
    exponent: Option<Enclosure>,
    rounding: DirectedRounding,
    memo: HashMap<Rational, Enclosure>,
}

impl PowCache {
    pub fn new(exponent: Enclosure, rounding: DirectedRounding) -> Self {
        PowCache {
            exponent: Some(exponent),
            rounding,
            memo: HashMap::new(),
        }
    }

    pub fn get(&mut self, x: &Rational) -> Result<Enclosure> {
        if let Some(e) = self.memo.get(x) {
            return Ok(e.clone());
        }
        let y = self.exponent.as_ref().expect("exponent set");
        let v = self.rounding.pow_enc(x, y)?;
        self.memo.insert(x.clone(), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn f(e: &Enclosure) -> (f64, f64) {
        e.to_f64()
    }

    #[test]
    fn ln_brackets_known_values() {
        let l2 = ln2(64);
        let (lo, hi) = f(&l2);
        assert!(lo <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= hi);
        assert!(l2.width() < pow2(-60));
        let l10 = ln(&int(10), 64);
        let (lo, hi) = f(&l10);
        assert!(lo <= std::f64::consts::LN_10 + 1e-15 && std::f64::consts::LN_10 - 1e-15 <= hi);
        let lsmall = ln(&rat(1, 1000), 64);
        assert!(lsmall.hi.is_negative());
        let (lo, hi) = f(&lsmall);
        assert!((lo - (-6.907755278982137)).abs() < 1e-12 && (hi - lo) < 1e-15);
    }

    #[test]
    fn exp_brackets_e() {
        let e = e_const(80);
        let (lo, hi) = f(&e);
        assert!(lo <= std::f64::consts::E + 1e-15 && std::f64::consts::E - 1e-15 <= hi);
        assert!(e.width() < pow2(-70));
        let em = exp(&int(-3), 64);
        let (lo, hi) = f(&em);
        assert!((lo - (-3f64).exp()).abs() < 1e-15 && hi >= lo);
    }

    #[test]
    fn pow_matches_float_and_exact_cases() {
        let r = DirectedRounding::outward(64);
        assert_eq!(r.pow(&rat(1, 4), &rat(1, 2)).unwrap().lo <= rat(1, 2), true);
        let sq = r.pow(&rat(1, 4), &rat(1, 2)).unwrap();
        assert!(sq.contains(&rat(1, 2)));
        assert!(sq.width() <= pow2(-63));
        assert_eq!(r.pow(&rat(2, 3), &int(3)).unwrap(), Enclosure::point(rat(8, 27)));
        let v = pow_rat(&rat(8, 15), &rat(1, 4), 64);
        let (lo, hi) = f(&v);
        let t = (8f64 / 15.0).powf(0.25);
        assert!(lo <= t + 1e-15 && t - 1e-15 <= hi);
    }

    #[test]
    fn exact_mode_refuses_irrational() {
        let r = DirectedRounding::exact();
        assert_eq!(r.pow(&int(2), &rat(1, 2)), Err(Error::Irrational));
        assert!(r.pow(&int(2), &int(-2)).is_ok());
    }

    #[test]
    fn inward_and_outward_intervals() {
        let lo = Enclosure::new(rat(1, 3), rat(1, 3) + pow2(-80));
        let hi = Enclosure::new(rat(2, 3) - pow2(-80), rat(2, 3));
        let (a, b) = DirectedRounding::outward(20).interval(&lo, &hi).unwrap().unwrap();
        assert!(a <= rat(1, 3) && b >= rat(2, 3));
        let (a, b) = DirectedRounding::inward(20).interval(&lo, &hi).unwrap().unwrap();
        assert!(a >= rat(1, 3) + pow2(-80) && b <= rat(2, 3) - pow2(-80));
    }

    #[test]
    fn log_ratio_dimension_values() {
        let d = log_ratio(&int(2), &int(3), 64);
        assert!(d.lo >= rat(6309, 10000) && d.hi <= rat(6310, 10000));
        let d = log_ratio(&int(5), &int(10), 64);
        assert!(d.lo >= rat(6989, 10000) && d.hi <= rat(6990, 10000));
    }
}
