//! Acceptance criteria 1–11. Run with `cargo test -p cantor-nest --test acceptance`.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};

use cantor_nest::cantor::{CantorSpec, DigitCantorSpec, GapBudget, GapCantor};
use cantor_nest::combinatorics::{
    binom_bound_check, card_e, composition_count_check, count_ck, count_ck_brute, strong_regularity_bracket,
};
use cantor_nest::constructions::{
    counterexample_kp, counterexample_measure_bound, dio_gapset, dio_lower_bound, dio_q0_for_tolerance,
    even_decimal_set, j_of, middle_gap, n_start_helper, pesin_k2, pesin_k3, random_kp, DyadicRng, RandomSeed,
};
use cantor_nest::interval::{normalize, Interval, IntervalUnion};
use cantor_nest::nesting::{estimate_p, interval_minus_cantor_bound_check, nest, x_inner_outer, Verdict};
use cantor_nest::rational::{self, int, pow2, rat, Rational};
use cantor_nest::rounding::{DirectedRounding, Enclosure};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn rand_rat(rng: &mut DyadicRng, num_max: u64, den: i64) -> Rational {
    rat(rng.below(num_max) as i64, den)
}

fn flagship_k() -> CantorSpec {
    CantorSpec::Digit(DigitCantorSpec::new(16, &[0, 8]).unwrap().scaled(&pow2(-6)).unwrap())
}

/// Membership in a raw (unnormalized) list of intervals.
fn in_raw(raw: &[Interval], t: &Rational) -> bool {
    raw.iter().any(|i| i.contains(t))
}

/// Breakpoints and the midpoints between consecutive ones; two finite
/// unions agree everywhere iff they agree on these.
fn probe_points(bounds: impl IntoIterator<Item = Rational>) -> Vec<Rational> {
    let pts: BTreeSet<Rational> = bounds.into_iter().collect();
    let pts: Vec<Rational> = pts.into_iter().collect();
    let mut out = pts.clone();
    for w in pts.windows(2) {
        out.push((&w[0] + &w[1]) / int(2));
    }
    if let (Some(a), Some(b)) = (pts.first(), pts.last()) {
        out.push(a - int(1));
        out.push(b + int(1));
    }
    out
}

fn c1() -> Outcome {
    let mut rng = RandomSeed::new(1).rng();
    for inst in 0..50 {
        let k_parts: Vec<Interval> = (0..1 + rng.below(5))
            .map(|_| {
                let a = rand_rat(&mut rng, 60, 60);
                let l = rand_rat(&mut rng, 8, 60);
                Interval::closed(a.clone(), a + l)
            })
            .collect();
        let k = CantorSpec::union(normalize(k_parts)).unwrap();
        let ambient = Interval::closed(int(0), int(3));
        let gaps: Vec<Interval> = (0..rng.below(21))
            .map(|_| {
                let a = rand_rat(&mut rng, 170, 60);
                let l = rand_rat(&mut rng, 9, 60) + rat(1, 120);
                Interval::open(a.clone(), rational::min(&(a + l), &int(3)))
            })
            .collect();
        let gc = GapCantor::from_gaps(ambient, gaps.clone(), "random").unwrap();
        let o = x_inner_outer(&k, &gc, 0, &GapBudget::All).map_err(e)?;
        let base = o.base.clone().ok_or("empty base")?;
        let x_inner = o.x_inner.unwrap();
        let CantorSpec::Union { set } = &k else { unreachable!() };
        // (a, b) − [c, d] = (a − d, b − c)
        let raw: Vec<Interval> = gaps
            .iter()
            .flat_map(|g| set.parts().iter().map(move |p| Interval::open(&g.lo - &p.hi, &g.hi - &p.lo)))
            .collect();
        let mut bounds = vec![base.lo.clone(), base.hi.clone()];
        bounds.extend(raw.iter().flat_map(|i| [i.lo.clone(), i.hi.clone()]));
        bounds.extend(x_inner.parts().iter().flat_map(|i| [i.lo.clone(), i.hi.clone()]));
        for t in probe_points(bounds) {
            let expected = base.contains(&t) && in_raw(&raw, &t);
            let got = base.contains(&t) && !x_inner.contains(&t);
            ensure(expected == got, || format!("instance {inst}: disagreement at t = {t}"))?;
        }
    }
    Ok("50 instances, exact set equality".into())
}

fn c2() -> Outcome {
    let r = DirectedRounding::default();
    let k = CantorSpec::Digit(DigitCantorSpec::new(3, &[0, 2]).unwrap());
    let cert = k.ck_certificate(&r).map_err(e)?;
    let mut rng = RandomSeed::new(2).rng();
    let den: i64 = 3i64.pow(12);
    let min_len = 3i64.pow(4); // |I| >= 3^-8
    let mut worst = 0f64;
    for n in 0..300 {
        let large = n >= 200;
        let len = if large {
            rat(den + rng.below(4 * den as u64) as i64, den)
        } else {
            rat(min_len + rng.below((den - min_len) as u64 + 1) as i64, den)
        };
        let lo = rat(rng.below(6 * den as u64) as i64 - 3 * den, den);
        let i = Interval::closed(lo.clone(), lo + &len);
        let c = interval_minus_cantor_bound_check(&i, &k, &cert, 8, &r).map_err(e)?;
        ensure(c.measured <= c.bound, || format!("violation at I = {i:?}: {} > {}", c.measured, c.bound))?;
        worst = worst.max(rational::to_f64(&c.measured) / rational::to_f64(&c.bound));
        if large {
            ensure(c.bound == &len + k.diam(), || "large-case bound is not Leb I + diam K".into())?;
        }
    }
    Ok(format!("300 intervals, 0 violations, max measured/bound = {worst:.4}"))
}

fn c3() -> Outcome {
    let r = DirectedRounding::default();
    let k = flagship_k();
    let dim = match &k {
        CantorSpec::Digit(s) => s.dimension(r.work_bits()),
        _ => unreachable!(),
    };
    ensure(dim.exact == Some(rat(1, 4)), || format!("d = {:?}", dim.exact))?;
    let gc = middle_gap(&rat(1, 2), 10).map_err(e)?;
    let rep = nest(&k, &gc, 8, &GapBudget::All, &r).map_err(e)?;
    let b = rep.bound.theo1_bound.clone().ok_or("divergent small-gap sum")?;
    ensure(rep.bound.verdict == Verdict::CertifiedPositive, || format!("verdict {:?}", rep.bound.verdict))?;
    ensure(b.is_positive(), || "bound not positive".into())?;
    ensure(b <= rep.oracle.measure_inner, || "bound exceeds measure(x_inner)".into())?;
    ensure(rep.oracle.measure_inner <= rep.oracle.measure_outer, || "inner exceeds outer".into())?;
    Ok(format!(
        "bound = {:.6} <= inner = {:.6} <= outer = {:.6}",
        rational::to_f64(&b),
        rational::to_f64(&rep.oracle.measure_inner),
        rational::to_f64(&rep.oracle.measure_outer)
    ))
}

fn c4() -> Outcome {
    let l = 20u32;
    // Closed form: level n holds 2^(n-1) gaps of length middle_gap_length(2, n).
    let tail = middle_gap(&rat(1, 2), 0).map_err(e)?.tail.ok_or("no closed-form tail")?;
    let mut through_l = Rational::zero();
    let (mut count, mut len) = (tail.count0.clone(), tail.len0.clone());
    for _ in 0..l {
        through_l += &count * &len;
        count *= &tail.count_ratio;
        len *= &tail.len_ratio;
    }
    ensure(through_l == Rational::one() - pow2(-(l as i64)), || format!("sum through level {l} = {through_l}"))?;
    let total = tail
        .power_sum_upper(&Enclosure::point(Rational::one()), &DirectedRounding::exact())
        .map_err(e)?
        .ok_or("tail diverges")?;
    ensure(total == Rational::one(), || format!("limit {total} is not 1"))?;
    // Cross-check the closed form against the explicit gaps at a smaller depth.
    let gc = middle_gap(&rat(1, 2), 12).map_err(e)?;
    let removed = gc.diam() - gc.complement_prefix(&GapBudget::All).map_err(e)?.measure();
    ensure(removed == Rational::one() - pow2(-12), || format!("explicit gaps through 12 measure {removed}"))?;
    Ok(format!("Leb(removed through level {l}) = 1 - 2^-{l}; full limit = 1"))
}

fn width(e: &Enclosure) -> f64 {
    rational::to_f64(&e.width())
}

fn c5() -> Outcome {
    let r = DirectedRounding::default();
    let a = estimate_p(&middle_gap(&rat(1, 2), 14).map_err(e)?, &GapBudget::All, &r).map_err(e)?;
    let pa = a.p_hat.ok_or("inconclusive on K(1/2)")?;
    ensure(pa.contains(&rat(1, 2)) && width(&pa) <= 0.1, || format!("K(1/2): {:?}", pa.to_f64()))?;
    let b = estimate_p(&pesin_k2(&int(1), 3, 24).map_err(e)?, &GapBudget::All, &r).map_err(e)?;
    let pb = b.p_hat.ok_or("inconclusive on K2")?;
    ensure(pb.contains(&rat(1, 2)) && width(&pb) <= 0.2, || format!("K2: {:?}", pb.to_f64()))?;
    Ok(format!("K(1/2): {:?}; K2(1,3): {:?}", pa.to_f64(), pb.to_f64()))
}

fn c6() -> Outcome {
    let r = DirectedRounding::default();
    let delta = rat(1, 3);
    let est = estimate_p(&pesin_k3(3, &delta, 24).map_err(e)?, &GapBudget::All, &r).map_err(e)?;
    let p = est.p_hat.ok_or("inconclusive")?;
    let (lo, hi) = strong_regularity_bracket(3, &delta, r.work_bits()).map_err(e)?;
    let slack = rat(1, 10);
    ensure(p.lo >= &lo - &slack && p.hi <= &hi.lo + &slack, || {
        format!("{:?} outside [{}, {}] ± 0.1", p.to_f64(), rational::to_f64(&lo), hi.to_f64().0)
    })?;
    Ok(format!(
        "p_hat = {:?} within [{:.4}, {:.4}] ± 0.1",
        p.to_f64(),
        rational::to_f64(&lo),
        hi.to_f64().0
    ))
}

fn c7() -> Outcome {
    let r = DirectedRounding::default();
    let p = rat(7, 10);
    let spec = even_decimal_set();
    let d = spec.dimension(r.work_bits()).enclosure;
    let n_start = n_start_helper(&p, &d, &r).map_err(e)?;
    let i_max = n_start;
    let gc = counterexample_kp(&p, n_start, i_max).map_err(e)?;
    let depth = j_of(n_start, &p) - 1;
    let o = x_inner_outer(&CantorSpec::Digit(spec), &gc, depth, &GapBudget::All).map_err(e)?;
    let complement = &o.base_measure - &o.measure_inner;
    let bound = counterexample_measure_bound(&p, &d, n_start, Some(i_max), &r).map_err(e)?;
    ensure(complement <= bound, || format!("complement {} > bound {}", complement, bound))?;
    let need = &o.base_measure * rat(4, 5);
    ensure(o.measure_outer >= need, || "x_outer below 0.8 of the base".into())?;
    Ok(format!(
        "n_start = {n_start}, depth {depth}: complement {:.3e} <= bound {:.3e}; outer/base = {:.6}",
        rational::to_f64(&complement),
        rational::to_f64(&bound),
        rational::to_f64(&(&o.measure_outer / &o.base_measure))
    ))
}

fn c8() -> Outcome {
    const BITS: u32 = 88;
    let t = count_ck(64).map_err(e)?;
    for k in 2..=14 {
        ensure(t.get(k).unwrap() == &count_ck_brute(k).into(), || format!("C_{k} mismatch"))?;
    }
    ensure(t.within_power_of_two(), || "some C_k > 2^k".into())?;
    let delta = rat(1, 3);
    for n in 0..=12 {
        let c = card_e(n, 3, &delta, BITS).map_err(e)?;
        ensure(c.holds, || format!("card E(N) exceeds its bound at N = {n}"))?;
    }
    let mut checked = 0;
    for n_total in 2..=24u32 {
        for n in 1..=n_total / 2 {
            for r in 1..=n_total {
                for m in 3..=5 {
                    for t in 0..=(r / m).min(n) {
                        let c = binom_bound_check(n, t, n_total, r, m, BITS).map_err(e)?;
                        ensure(c.holds, || format!("binomial bound fails at {:?}", (n, t, n_total, r, m)))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    for r in 1..=30 {
        for m in 3..=5 {
            for t in 0..=r / m {
                let (a, b) = composition_count_check(r, t, m, BITS).map_err(e)?;
                ensure(a.holds && b.holds, || format!("composition bound fails at {:?}", (r, t, m)))?;
                checked += 1;
            }
        }
    }
    Ok(format!("C_k table to 64, E(N) for N <= 12, {checked} lemma tuples: 0 violations"))
}

fn c9() -> Outcome {
    let r = DirectedRounding::default();
    let k = flagship_k();
    let ck = k.ck_certificate(&r).map_err(e)?.ck_upper;
    let m = int(1);
    let s = Enclosure::point(rat(1, 5));
    let mut prev: Option<Rational> = None;
    for q0 in 2..200u64 {
        let b = dio_lower_bound(&m, &ck, &s, 8, q0, &r).map_err(e)?;
        if let Some(p) = &prev {
            ensure(&b > p, || format!("not increasing at q0 = {q0}"))?;
        }
        prev = Some(b);
    }
    let tol = rat(1, 100);
    let q0 = dio_q0_for_tolerance(&m, &ck, &s, 8, &tol, &r).map_err(e)?;
    let b = dio_lower_bound(&m, &ck, &s, 8, q0, &r).map_err(e)?;
    ensure(b > int(2) - &tol, || "bound below 2M - 10^-2".into())?;
    let gc = dio_gapset(8, q0, 40, &Interval::closed(int(0), int(1))).map_err(e)?;
    let o = x_inner_outer(&k, &gc, 6, &GapBudget::All).map_err(e)?;
    ensure(o.measure_inner.is_positive(), || "x_inner is empty".into())?;
    Ok(format!(
        "q0 = {q0}, bound = {:.6}; {} gaps to q = 40, Leb x_inner = {:.6}",
        rational::to_f64(&b),
        gc.explicit_count(),
        rational::to_f64(&o.measure_inner)
    ))
}

fn c10() -> Outcome {
    let p = rat(4, 5);
    let k = flagship_k();
    let ranges = [2u32, 3, 4];
    let run = || -> Result<Vec<Rational>, String> {
        let mut means = Vec::new();
        for &i1 in &ranges {
            let mut total = Rational::zero();
            for seed in 0..20u64 {
                let gc = random_kp(&p, 2, i1, &RandomSeed::new(seed), 53).map_err(e)?;
                let o = x_inner_outer(&k, &gc, 3, &GapBudget::All).map_err(e)?;
                total += o.measure_outer;
            }
            means.push(total / int(20));
        }
        Ok(means)
    };
    let first = run()?;
    ensure(first.windows(2).all(|w| w[1] <= w[0]), || "mean measure of x_outer increased".into())?;
    let second = run()?;
    ensure(first == second, || "rerun differs".into())?;
    Ok(format!(
        "mean Leb x_outer over 20 seeds: {:?}; bit-identical rerun",
        first.iter().map(rational::to_f64).collect::<Vec<_>>()
    ))
}

fn c11() -> Outcome {
    let mut rng = RandomSeed::new(11).rng();
    for inst in 0..20 {
        let base = 3 + rng.below(4) as u32;
        let mut digits: Vec<u32> = (0..base).filter(|_| rng.below(2) == 0).collect();
        if digits.is_empty() {
            digits.push(0);
        }
        if digits.len() == base as usize {
            digits.pop();
        }
        let spec = DigitCantorSpec::new(base, &digits).unwrap().scaled(&rat(1, 8 + rng.below(24) as i64)).unwrap();
        let k = CantorSpec::Digit(spec);
        let gaps: Vec<Interval> = (0..1 + rng.below(30))
            .map(|_| {
                let a = rand_rat(&mut rng, 95, 100);
                Interval::open(a.clone(), a + rat(1 + rng.below(5) as i64, 100))
            })
            .collect();
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(1)), gaps, "random").unwrap();
        let mut prev: Option<IntervalUnion> = None;
        for depth in 0..5 {
            let xi = x_inner_outer(&k, &gc, depth, &GapBudget::All).map_err(e)?.x_inner.unwrap();
            if let Some(p) = &prev {
                ensure(p.is_subset(&xi), || format!("instance {inst}: x_inner shrank at depth {depth}"))?;
            }
            prev = Some(xi);
        }
        let mut prev: Option<IntervalUnion> = None;
        for count in 0..=gc.explicit_count() {
            let xo = x_inner_outer(&k, &gc, 3, &GapBudget::Count(count)).map_err(e)?.x_outer.unwrap();
            if let Some(p) = &prev {
                ensure(xo.is_subset(p), || format!("instance {inst}: x_outer grew at budget {count}"))?;
            }
            prev = Some(xo);
        }
    }
    for n in 0..10_000 {
        let parts: Vec<Interval> = (0..rng.below(8))
            .filter_map(|_| {
                let a = rand_rat(&mut rng, 40, 10);
                let b = &a + rand_rat(&mut rng, 10, 10);
                Interval::try_new(a, b, rng.below(2) == 0, rng.below(2) == 0)
            })
            .collect();
        let once = normalize(parts);
        let twice = normalize(once.parts().to_vec());
        ensure(once == twice, || format!("normalization not idempotent on collection {n}"))?;
    }
    Ok("20 instances monotone; 10^4 collections idempotent".into())
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "exactness for finite-union K", Duration::from_secs(1), c1),
        (2, "Leb(I - K) inequality suite", Duration::from_secs(10), c2),
        (3, "flagship bound and oracles", Duration::from_secs(60), c3),
        (4, "middle-gap closed-form measure", Duration::from_secs(1), c4),
        (5, "P-exponent recovery", Duration::from_secs(300), c5),
        (6, "strong-regularity bracket", Duration::from_secs(300), c6),
        (7, "decimal counterexample arithmetic", Duration::from_secs(120), c7),
        (8, "combinatorics oracle", Duration::from_secs(120), c8),
        (9, "Diophantine bound", Duration::from_secs(120), c9),
        (10, "random counterexample trend", Duration::from_secs(300), c10),
        (11, "monotone-oracle invariants", Duration::from_secs(60), c11),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        if filter.is_some_and(|x| x != n) {
            continue;
        }
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        let (ok, detail) = match out {
            Ok(d) if dt <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took longer than {limit:?}")),
            Err(m) => (false, m),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {} ({:.2} s, limit {} s) {name}: {detail}",
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
