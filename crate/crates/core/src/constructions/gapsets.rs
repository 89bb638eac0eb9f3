//! Gap-list constructions on the line: the middle-gap family, the decimal
//! counterexample lattice, its randomized variant and the Diophantine sets.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use super::random::RandomSeed;
use crate::cantor::{GapCantor, GapLevel, GapMeta, GeometricTail, LatticeLevel, DEFAULT_PART_BUDGET};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, int, pow2, powi, rat, Rational};
use crate::rounding::{self, DirectedRounding, Enclosure, Side};

fn ambient_pm1() -> Interval {
    Interval::closed(int(-1), int(1))
}

/// `1/s` as an integer, if it is one.
fn inverse_integer(s: &Rational) -> Option<u32> {
    if !s.is_positive() || !s.numer().is_one() {
        return None;
    }
    s.denom().to_u32()
}

/// Length of the level-`n` gaps when `1/s = m` is an integer:
/// `2^(-n m) / (1 - 2^(1-m))`.
pub fn middle_gap_length(m: u32, n: u32) -> Rational {
    pow2(-(n as i64) * m as i64) / (Rational::one() - pow2(1 - m as i64))
}

/// `K̃(s)`: starting from `[-1, 1]`, level `n` removes a centered open gap of
/// length `2^(-n/s) / (1 - 2^(1-1/s))` from each of the `2^(n-1)` components.
pub fn middle_gap(s: &Rational, levels: u32) -> Result<GapCantor> {
    let m = inverse_integer(s)
        .filter(|&m| m >= 2)
        .ok_or_else(|| {
            Error::InvalidParam(
                "middle_gap needs 1/s to be an integer >= 2; use middle_gap_rounded otherwise".into(),
            )
        })?;
    if levels as u64 >= 40 {
        return Err(Error::Budget("more than 2^39 gaps requested".into()));
    }
    let mut comps = vec![(int(-1), int(1))];
    let mut out = Vec::with_capacity(levels as usize);
    for n in 1..=levels {
        let g = middle_gap_length(m, n);
        let half = &g / int(2);
        let mut gaps = Vec::with_capacity(comps.len());
        let mut next = Vec::with_capacity(comps.len() * 2);
        for (a, b) in &comps {
            if &g >= &(b - a) {
                return Err(Error::Construction(format!(
                    "level {n} gap is not shorter than its component"
                )));
            }
            let c = (a + b) / int(2);
            let (lo, hi) = (&c - &half, &c + &half);
            gaps.push(Interval::open(lo.clone(), hi.clone()));
            next.push((a.clone(), lo));
            next.push((hi, b.clone()));
        }
        comps = next;
        out.push(GapLevel { level: n, gaps });
    }
    let mut gc = GapCantor::new(
        ambient_pm1(),
        out,
        GapMeta {
            construction: "middle_gap".into(),
            params: json!({ "s": rational::format(s), "levels": levels }),
            complete: false,
            max_missing_length: Some(middle_gap_length(m, levels + 1)),
            ..Default::default()
        },
    )?;
    gc.tail = Some(GeometricTail {
        first_level: levels + 1,
        count0: Rational::from_integer(BigInt::one() << levels),
        count_ratio: int(2),
        len0: middle_gap_length(m, levels + 1),
        len_ratio: pow2(-(m as i64)),
    });
    Ok(gc)
}

/// `K̃(s)` for any `0 < s < 1` with gap lengths only known as enclosures.
/// Ideal component endpoints are tracked as enclosures and each emitted gap
/// is the inward rounding of the ideal one, so it lies inside the true gap.
pub fn middle_gap_rounded(s: &Rational, levels: u32, r: &DirectedRounding) -> Result<GapCantor> {
    if !(s.is_positive() && s < &Rational::one()) {
        return Err(Error::InvalidParam("s must lie in (0, 1)".into()));
    }
    if r.mode != rounding::RoundingMode::Inward {
        return Err(Error::InvalidParam(
            "irrational gap lengths require inward rounding".into(),
        ));
    }
    let inv = s.recip();
    let bits = r.work_bits();
    let two = int(2);
    let denom = Enclosure::point(Rational::one())
        .sub(&rounding::pow(&two, &Enclosure::point(Rational::one() - &inv), bits));
    if !denom.lo.is_positive() {
        return Err(Error::InvalidParam("1 - 2^(1-1/s) must be positive".into()));
    }
    let mut comps = vec![(Enclosure::point(int(-1)), Enclosure::point(int(1)))];
    let mut out = Vec::new();
    for n in 1..=levels {
        let num = rounding::pow(&two, &Enclosure::point(-(int(n as i64) * &inv)), bits);
        let half = num.div(&denom)?.scale(&rat(1, 2));
        let mut gaps = Vec::new();
        let mut next = Vec::new();
        for (a, b) in &comps {
            let c = a.add(b).scale(&rat(1, 2));
            let (lo, hi) = (c.sub(&half), c.add(&half));
            if lo.hi >= hi.lo || lo.lo <= a.hi || hi.hi >= b.lo {
                return Err(Error::Construction(format!(
                    "level {n} gap cannot be separated from its component at this precision"
                )));
            }
            if let Some((x, y)) = r.interval(&lo, &hi)? {
                gaps.push(Interval::open(x, y));
            }
            next.push((a.clone(), lo));
            next.push((hi, b.clone()));
        }
        comps = next;
        out.push(GapLevel { level: n, gaps });
    }
    GapCantor::new(
        ambient_pm1(),
        out,
        GapMeta {
            construction: "middle_gap".into(),
            params: json!({ "s": rational::format(s), "levels": levels, "rounding": "inward" }),
            complete: false,
            max_missing_length: None,
            ..Default::default()
        },
    )
}

/// `⌊i/p⌋`.
pub fn j_of(i: u32, p: &Rational) -> u32 {
    rational::floor(&(int(i as i64) / p))
        .to_u32()
        .expect("index fits in u32")
}

fn check_p(p: &Rational) -> Result<()> {
    if p.is_positive() && p < &Rational::one() {
        Ok(())
    } else {
        Err(Error::InvalidParam("p must lie in (0, 1)".into()))
    }
}

/// Largest exponent this crate will expand `10^i` for.
const MAX_DECIMAL_LEVEL: u32 = 4096;

/// The decimal counterexample: `[0,1]` minus `U_iq = q/10^i + (0, 10^-⌊i/p⌋)`
/// for `n_start <= i <= i_max` and `0 <= q < 10^i`. Each level is stored as a
/// lattice progression; nothing is expanded until asked for.
pub fn counterexample_kp(p: &Rational, n_start: u32, i_max: u32) -> Result<GapCantor> {
    check_p(p)?;
    if n_start < 1 {
        return Err(Error::InvalidParam("n_start must be at least 1".into()));
    }
    if i_max > MAX_DECIMAL_LEVEL {
        return Err(Error::Budget(format!("i_max above {MAX_DECIMAL_LEVEL}")));
    }
    let lattice = (n_start..=i_max)
        .map(|i| {
            let j = j_of(i, p);
            LatticeLevel {
                level: i,
                start: Rational::zero(),
                step: powi(10, -(i as i64)),
                count: num_traits::pow(BigUint::from(10u32), i as usize),
                pattern: Interval::open(Rational::zero(), powi(10, -(j as i64))),
            }
        })
        .collect();
    let mut gc = GapCantor::new(
        Interval::closed(int(0), int(1)),
        vec![],
        GapMeta {
            construction: "counterexample_kp".into(),
            params: json!({ "p": rational::format(p), "n_start": n_start, "i_max": i_max }),
            complete: false,
            max_missing_length: Some(powi(10, -(j_of(i_max + 1, p) as i64))),
            ..Default::default()
        },
    )?;
    gc.lattice = lattice;
    Ok(gc)
}

/// `Σ_{n_start <= i <= i_max} 10^i 10^-⌊i/p⌋`, the union bound on the removed measure.
pub fn counterexample_removed_bound(p: &Rational, n_start: u32, i_max: u32) -> Rational {
    (n_start..=i_max)
        .map(|i| powi(10, i as i64 - j_of(i, p) as i64))
        .sum()
}

/// `Σ_{i >= n} r^(⌊i/p⌋ - i)` in closed form for rational `0 < r < 1`.
/// With `p = a/b`, the exponent grows by `b - a` every `a` steps.
pub fn periodic_power_tail(p: &Rational, r: &Rational, n: u32) -> Rational {
    let a = p.numer().to_u32().expect("small p numerator");
    let b = p.denom().to_u32().expect("small p denominator");
    let head: Rational = (n..n + a)
        .map(|i| r_pow(r, j_of(i, p) as i64 - i as i64))
        .sum();
    head / (Rational::one() - r_pow(r, (b - a) as i64))
}

fn r_pow(r: &Rational, e: i64) -> Rational {
    num_traits::pow::Pow::pow(r, e as i32)
}

/// Rational upper bound of `10^(d_hi - 1)`.
pub fn decimal_ratio_upper(d: &Enclosure, rd: &DirectedRounding) -> Result<Rational> {
    let e = Enclosure::point(&d.hi - Rational::one());
    rd.bound(&rd.pow_enc(&int(10), &e)?, Side::Upper)
}

/// `4 Σ_{i=n_start}^{i_max} 10^((d_up - 1)(⌊i/p⌋ - i))`, upper-rounded; with
/// `i_max = None` the full infinite sum.
pub fn counterexample_measure_bound(
    p: &Rational,
    d: &Enclosure,
    n_start: u32,
    i_max: Option<u32>,
    rd: &DirectedRounding,
) -> Result<Rational> {
    let r = decimal_ratio_upper(d, rd)?;
    let s = match i_max {
        Some(m) => (n_start..=m)
            .map(|i| r_pow(&r, j_of(i, p) as i64 - i as i64))
            .sum(),
        None => periodic_power_tail(p, &r, n_start),
    };
    Ok(rd.up(&(s * int(4))))
}

/// Smallest `n` making `4 Σ_{i >= n} 10^((d-1)(⌊i/p⌋ - i)) < 1/10`.
pub fn n_start_helper(p: &Rational, d: &Enclosure, rd: &DirectedRounding) -> Result<u32> {
    check_p(p)?;
    let r = decimal_ratio_upper(d, rd)?;
    if r >= Rational::one() {
        return Err(Error::InvalidParam("dimension must be below 1".into()));
    }
    let target = rat(1, 10);
    for n in 1..MAX_DECIMAL_LEVEL {
        if periodic_power_tail(p, &r, n) * int(4) < target {
            return Ok(n);
        }
    }
    Err(Error::Budget("no admissible n_start below the level cap".into()))
}

/// Seeded random variant: for each `i` in `i0..=i1`, `10^i` open gaps
/// `(u, u + 10^-⌊i/p⌋)` with `u` uniform on the dyadic grid `2^-resolution`,
/// clipped to `(0, 1)`.
pub fn random_kp(p: &Rational, i0: u32, i1: u32, seed: &RandomSeed, resolution: u32) -> Result<GapCantor> {
    check_p(p)?;
    if !(1..=64).contains(&resolution) {
        return Err(Error::InvalidParam("resolution must be in 1..=64 bits".into()));
    }
    let mut total: u64 = 0;
    for i in i0..=i1 {
        total = total.saturating_add(10u64.saturating_pow(i));
    }
    if total > DEFAULT_PART_BUDGET {
        return Err(Error::Budget(format!("{total} random gaps exceed the part budget")));
    }
    let grid = pow2(-(resolution as i64));
    let one = Rational::one();
    let mut levels = Vec::new();
    for i in i0..=i1 {
        let len = powi(10, -(j_of(i, p) as i64));
        let mut rng = seed.child(i as u64).rng();
        let n = 10u64.pow(i);
        let mut gaps = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let u = Rational::from_integer(BigInt::from(rng.next_bits(resolution))) * &grid;
            let hi = rational::min(&(&u + &len), &one);
            gaps.push(Interval::open(u, hi));
        }
        gaps.sort_by(|a, b| a.lo.cmp(&b.lo));
        levels.push(GapLevel { level: i, gaps });
    }
    GapCantor::new(
        Interval::closed(int(0), int(1)),
        levels,
        GapMeta {
            construction: "random_kp".into(),
            params: json!({
                "p": rational::format(p),
                "i0": i0,
                "i1": i1,
                "seed": seed.seed,
                "path": seed.path,
                "resolution": resolution,
            }),
            complete: false,
            max_missing_length: Some(powi(10, -(j_of(i1 + 1, p) as i64))),
            ..Default::default()
        },
    )
}

/// Union bound `Σ_i 10^i 10^-⌊i/p⌋` on the measure removed by `random_kp`.
pub fn random_removed_bound(p: &Rational, i0: u32, i1: u32) -> Rational {
    if i0 > i1 {
        return Rational::zero();
    }
    counterexample_removed_bound(p, i0, i1)
}

/// Open gaps `(a/q - q^-d, a/q + q^-d)` for `q0 <= q <= q_max` and every
/// integer `a` with `a/q` in `range`, intersected with the interior of `range`.
pub fn dio_gapset(d: u32, q0: u64, q_max: u64, range: &Interval) -> Result<GapCantor> {
    if d < 3 {
        return Err(Error::InvalidParam("d must be at least 3".into()));
    }
    if q0 < 2 {
        return Err(Error::InvalidParam("q0 must be at least 2".into()));
    }
    let ambient = range.closure();
    let mut levels = Vec::new();
    let mut total: u64 = 0;
    for q in q0..=q_max {
        let qr = int(q as i64);
        let radius = powi(q as i64, -(d as i64));
        let a_lo = rational::ceil(&(&ambient.lo * &qr));
        let a_hi = rational::floor(&(&ambient.hi * &qr));
        let mut gaps = Vec::new();
        let mut a = a_lo;
        while a <= a_hi {
            let c = Rational::new(a.clone(), BigInt::from(q));
            let lo = rational::max(&(&c - &radius), &ambient.lo);
            let hi = rational::min(&(&c + &radius), &ambient.hi);
            if let Some(g) = Interval::try_new(lo, hi, false, false) {
                if g.lo < g.hi {
                    gaps.push(g);
                }
            }
            a += 1;
        }
        total += gaps.len() as u64;
        if total > DEFAULT_PART_BUDGET {
            return Err(Error::Budget("Diophantine gap count exceeds the part budget".into()));
        }
        levels.push(GapLevel {
            level: q as u32,
            gaps,
        });
    }
    GapCantor::new(
        ambient.clone(),
        levels,
        GapMeta {
            construction: "dio_gapset".into(),
            params: json!({
                "d": d,
                "q0": q0,
                "q_max": q_max,
                "range": [rational::format(&ambient.lo), rational::format(&ambient.hi)],
            }),
            complete: false,
            max_missing_length: Some(int(2) * powi(q_max as i64 + 1, -(d as i64))),
            ..Default::default()
        },
    )
}

/// `Σ_{q=q0}^{q_max} (q·|range| + 1)·2q^-d`, the counting bound on total gap length.
pub fn dio_measure_bound(d: u32, q0: u64, q_max: u64, range: &Interval) -> Rational {
    (q0..=q_max)
        .map(|q| {
            let qr = int(q as i64);
            (&qr * range.length() + Rational::one()) * int(2) * powi(q as i64, -(d as i64))
        })
        .sum()
}

/// `2M - 16 M C / (e q0^e)` with `e = (1-s)d - 2`, lower-rounded. Uses `e_lo`
/// throughout: the subtracted term is decreasing in `e`.
pub fn dio_lower_bound(
    m: &Rational,
    ck_upper: &Rational,
    s: &Enclosure,
    d: u32,
    q0: u64,
    rd: &DirectedRounding,
) -> Result<Rational> {
    let e = Enclosure::point(int(d as i64))
        .mul(&Enclosure::point(Rational::one()).sub(s))
        .add_rat(&int(-2));
    if !e.lo.is_positive() {
        return Err(Error::Precondition("requires s < 1 - 2/d".into()));
    }
    if q0 < 2 {
        return Err(Error::InvalidParam("q0 must be at least 2".into()));
    }
    let two_m = m * int(2);
    if ck_upper.is_zero() {
        return Ok(two_m);
    }
    let q_pow = rd.pow(&int(q0 as i64), &e.lo)?;
    let term_upper = rd.up(&(int(16) * m * ck_upper / (&e.lo * &q_pow.lo)));
    Ok(rd.down(&(two_m - term_upper)))
}

/// Smallest `q0` (searched by doubling then bisection) whose bound exceeds
/// `2M - tol`.
pub fn dio_q0_for_tolerance(
    m: &Rational,
    ck_upper: &Rational,
    s: &Enclosure,
    d: u32,
    tol: &Rational,
    rd: &DirectedRounding,
) -> Result<u64> {
    let target = m * int(2) - tol;
    let ok = |q: u64| -> Result<bool> { Ok(dio_lower_bound(m, ck_upper, s, d, q, rd)? > target) };
    let mut hi = 2u64;
    while !ok(hi)? {
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::Budget("q0 search overflow".into()))?;
    }
    let mut lo = hi / 2;
    if lo < 2 || ok(lo)? {
        return Ok(if lo >= 2 { lo } else { hi });
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Is the denominator a power of two?
pub fn is_dyadic(q: &Rational) -> bool {
    let d = q.denom();
    d.is_one() || (d & (d - BigInt::one())).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::GapBudget;
    use crate::interval::{complement_in, normalize};

    #[test]
    fn middle_gap_first_level() {
        let g = middle_gap(&rat(1, 2), 1).unwrap();
        assert_eq!(g.all_gaps().unwrap(), vec![Interval::open(rat(-1, 4), rat(1, 4))]);
        let g0 = middle_gap(&rat(1, 2), 0).unwrap();
        assert!(g0.all_gaps().unwrap().is_empty());
        assert!(middle_gap(&rat(2, 5), 3).is_err());
        assert!(middle_gap(&int(1), 3).is_err());
    }

    #[test]
    fn middle_gap_complement_measures() {
        for l in 0..=12u32 {
            let g = middle_gap(&rat(1, 2), l).unwrap();
            let comp = g.complement_prefix(&GapBudget::All).unwrap();
            assert_eq!(comp.measure(), Rational::one() + pow2(-(l as i64)));
            assert_eq!(comp.len(), 1 << l);
            for gap in g.all_gaps().unwrap() {
                assert!(is_dyadic(&gap.lo) && is_dyadic(&gap.hi));
            }
        }
        let g = middle_gap(&rat(1, 3), 6).unwrap();
        let total: Rational = g.all_gaps().unwrap().iter().map(Interval::length).sum();
        let expected: Rational = (1..=6).map(|n| int(1 << (n - 1)) * middle_gap_length(3, n)).sum();
        assert_eq!(total, expected);
    }

    #[test]
    fn middle_gap_levels_are_left_to_right() {
        let g = middle_gap(&rat(1, 2), 5).unwrap();
        for lv in &g.levels {
            assert_eq!(lv.gaps.len(), 1 << (lv.level - 1));
            assert!(lv.gaps.windows(2).all(|w| w[0].hi < w[1].lo));
        }
        assert_eq!(g.gaps_up_to(&GapBudget::MinLength(pow2(-5))).unwrap().len(), 7);
    }

    #[test]
    fn rounded_middle_gap_lies_inside_exact_one() {
        let r = DirectedRounding::inward(60);
        let approx = middle_gap_rounded(&rat(1, 2), 6, &r).unwrap();
        let exact = middle_gap(&rat(1, 2), 6).unwrap();
        let a = normalize(approx.all_gaps().unwrap());
        let e = normalize(exact.all_gaps().unwrap());
        assert!(a.is_subset(&e));
        assert!(&e.measure() - &a.measure() < pow2(-50));
        let irr = middle_gap_rounded(&rat(2, 5), 5, &r).unwrap();
        assert_eq!(irr.explicit_count(), 31);
        assert!(middle_gap_rounded(&rat(2, 5), 5, &DirectedRounding::outward(60)).is_err());
    }

    #[test]
    fn counterexample_lattice_examples() {
        let g = counterexample_kp(&rat(1, 2), 1, 1).unwrap();
        let gaps = g.all_gaps().unwrap();
        assert_eq!(gaps.len(), 10);
        assert_eq!(gaps[3], Interval::open(rat(3, 10), rat(31, 100)));
        assert_eq!(counterexample_removed_bound(&rat(1, 2), 1, 6), (1..=6).map(|i| powi(10, -i)).sum());
        let r = rat(1, 10);
        assert_eq!(periodic_power_tail(&rat(1, 2), &r, 1), rat(1, 9));
        let empty = counterexample_kp(&rat(1, 2), 3, 2).unwrap();
        assert!(empty.all_gaps().unwrap().is_empty());
    }

    #[test]
    fn periodic_tail_matches_long_partial_sum() {
        let p = rat(7, 10);
        let r = rat(1, 2);
        let closed = periodic_power_tail(&p, &r, 5);
        let partial: Rational = (5..400u32).map(|i| r_pow(&r, j_of(i, &p) as i64 - i as i64)).sum();
        assert!(partial < closed);
        assert!(&closed - &partial < pow2(-100));
    }

    #[test]
    fn n_start_helper_is_minimal() {
        let rd = DirectedRounding::default();
        let d = rounding::log_ratio(&int(5), &int(10), 80);
        let p = rat(7, 10);
        let n = n_start_helper(&p, &d, &rd).unwrap();
        let full = counterexample_measure_bound(&p, &d, n, None, &rd).unwrap();
        assert!(full < rat(1, 10));
        let prev = counterexample_measure_bound(&p, &d, n - 1, None, &rd).unwrap();
        assert!(prev >= rat(1, 10) - pow2(-60));
    }

    #[test]
    fn random_kp_is_reproducible() {
        let seed = RandomSeed::new(42);
        let a = random_kp(&rat(4, 5), 2, 2, &seed, 53).unwrap();
        let b = random_kp(&rat(4, 5), 2, 2, &seed, 53).unwrap();
        assert_eq!(a, b);
        let gaps = a.all_gaps().unwrap();
        assert_eq!(gaps.len(), 100);
        for g in &gaps {
            assert!(g.length() <= rat(1, 100));
            assert!(a.ambient.contains_interval(g));
        }
        let other = random_kp(&rat(4, 5), 2, 2, &RandomSeed::new(43), 53).unwrap();
        assert_ne!(a, other);
        let none = random_kp(&rat(4, 5), 3, 2, &seed, 53).unwrap();
        assert!(none.all_gaps().unwrap().is_empty());
        let removed = normalize(gaps).measure();
        assert!(removed <= random_removed_bound(&rat(4, 5), 2, 2));
    }

    #[test]
    fn dio_examples() {
        let unit = Interval::closed(int(0), int(1));
        let g = dio_gapset(3, 2, 2, &unit).unwrap();
        let gaps = g.all_gaps().unwrap();
        assert_eq!(
            gaps,
            vec![
                Interval::open(int(0), rat(1, 8)),
                Interval::open(rat(3, 8), rat(5, 8)),
                Interval::open(rat(7, 8), int(1)),
            ]
        );
        assert!(dio_gapset(3, 3, 2, &unit).unwrap().all_gaps().unwrap().is_empty());
        let g = dio_gapset(4, 2, 30, &unit).unwrap();
        let u = normalize(g.all_gaps().unwrap());
        assert!(u.measure() <= dio_measure_bound(4, 2, 30, &unit));
        let comp = complement_in(&g.ambient, &u).unwrap();
        assert_eq!(comp.measure() + u.measure(), int(1));
    }

    #[test]
    fn dio_bound_behaviour() {
        let rd = DirectedRounding::default();
        let s = Enclosure::point(rat(1, 5));
        let one = int(1);
        assert_eq!(dio_lower_bound(&one, &int(0), &s, 8, 5, &rd).unwrap(), int(2));
        let c = rat(3, 2);
        let b2 = dio_lower_bound(&one, &c, &s, 8, 2, &rd).unwrap();
        let b3 = dio_lower_bound(&one, &c, &s, 8, 3, &rd).unwrap();
        assert!(b2 < b3 && b3 < int(2));
        // e = (4/5)·8 - 2 = 22/5 exactly; compare with a direct evaluation.
        let e = rat(22, 5);
        let q_pow = rounding::pow_rat(&int(3), &e, 80);
        let direct_hi = int(2) - int(16) * &c / (&e * &q_pow.hi);
        let direct_lo = int(2) - int(16) * &c / (&e * &q_pow.lo);
        assert!(b3 <= direct_hi && b3 >= direct_lo - pow2(-60));
        assert!(matches!(
            dio_lower_bound(&one, &c, &Enclosure::point(rat(3, 4)), 8, 3, &rd),
            Err(Error::Precondition(_))
        ));
        let tol = rat(1, 1000);
        let q = dio_q0_for_tolerance(&one, &c, &s, 8, &tol, &rd).unwrap();
        assert!(dio_lower_bound(&one, &c, &s, 8, q, &rd).unwrap() > int(2) - &tol);
        assert!(dio_lower_bound(&one, &c, &s, 8, q - 1, &rd).unwrap() <= int(2) - &tol);
    }
}
