//! Symbolic coding by the inverse branches of the even map
//! `f(x) = 2^m (|x| - 2^(1-m)) - 1` on `±I_m`, `I_m = (2^(1-m), 2^(2-m)]`,
//! and the Pesin-type gap sets cut out by admissibility rules on digit words.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cantor::{GapCantor, GapLevel, GapMeta};
use crate::error::{Error, Result};
use crate::interval::{sum_rationals, Interval};
use crate::rational::{self, int, pow2, Rational};

/// Signed digit word; every digit has absolute value at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicWord {
    digits: Vec<i64>,
    abs_sum: u64,
}

impl SymbolicWord {
    pub fn new(digits: Vec<i64>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|d| d.abs() < 2) {
            return Err(Error::InvalidParam(format!("invalid digit {d}: |digit| must be >= 2")));
        }
        let abs_sum = digits.iter().map(|d| d.unsigned_abs()).sum();
        Ok(SymbolicWord { digits, abs_sum })
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn abs_sum(&self) -> u64 {
        self.abs_sum
    }

    pub fn cylinder_length(&self) -> Rational {
        pow2(1 - self.abs_sum as i64)
    }
}

/// Points of `[-1, 1]` whose coding starts with `word`: inverse branches
/// `x = ±(2^(1-|m|) + (y+1) 2^(-|m|))` composed from the last digit inward.
pub fn chebyshev_cylinder(word: &SymbolicWord) -> Interval {
    let mut cur = Interval::closed(int(-1), int(1));
    let one = Rational::one();
    for &m in word.digits.iter().rev() {
        let a = m.unsigned_abs() as i64;
        let base = pow2(1 - a);
        let scale = pow2(-a);
        let lo = &base + (&cur.lo + &one) * &scale;
        let hi = &base + (&cur.hi + &one) * &scale;
        cur = if m > 0 {
            Interval {
                lo,
                hi,
                lo_closed: false,
                hi_closed: cur.hi_closed,
            }
        } else {
            Interval {
                lo: -hi,
                hi: -lo,
                lo_closed: cur.hi_closed,
                hi_closed: false,
            }
        };
    }
    cur
}

/// Admissibility rule: given the running sums `S = Σ|x_j|` and
/// `R = Σ_{|x_j| > M} |x_j|`, the next digit may have `|m|` in `2..=T(S, R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `|x_i| <= max(N, s·S)`.
    Growth { s: Rational, n: u64 },
    /// `R <= δ·S` after every digit.
    StrongRegularity { m: u64, delta: Rational },
}

impl Rule {
    pub fn max_digit(&self, s_sum: u64, r_sum: u64) -> u64 {
        match self {
            Rule::Growth { s, n } => {
                let t = rational::floor(&(s * int(s_sum as i64)));
                (*n).max(t.to_u64().unwrap_or(0))
            }
            Rule::StrongRegularity { m, delta } => {
                let num = delta * int(s_sum as i64) - int(r_sum as i64);
                let t = rational::floor(&(num / (Rational::one() - delta)));
                if t.is_negative() {
                    *m
                } else {
                    (*m).max(t.to_u64().unwrap_or(u64::MAX))
                }
            }
        }
    }

    pub fn next_r(&self, r_sum: u64, a: u64) -> u64 {
        match self {
            Rule::StrongRegularity { m, .. } if a > *m => r_sum + a,
            _ => r_sum,
        }
    }

    /// `|m|` of every digit allowed as the next one.
    pub fn admits(&self, s_sum: u64, r_sum: u64, a: u64) -> bool {
        a >= 2 && a <= self.max_digit(s_sum, r_sum)
    }

    /// Smallest `S + T(S, R)` over words with `S > budget`.
    fn min_missing_exponent(&self, budget: u64) -> u64 {
        match self {
            Rule::Growth { .. } => (budget + 1) + self.max_digit(budget + 1, 0),
            Rule::StrongRegularity { m, .. } => budget + 1 + m,
        }
    }
}

/// Exact word statistics, computed by dynamic programming over `(S, R)`.
#[derive(Clone, Debug, Default)]
pub struct WordCensus {
    /// Admissible words with `Σ|x_j| = S`, for `S <= budget`.
    pub words_by_sum: BTreeMap<u64, BigUint>,
    /// Gap length `2^(2-S-T)` and how many words produce it.
    pub histogram: BTreeMap<u64, BigUint>,
    /// Total length of the cylinders just past the budget.
    pub unresolved_measure: Rational,
}

pub fn census(rule: &Rule, budget: u64) -> WordCensus {
    let mut states: BTreeMap<(u64, u64), BigUint> = BTreeMap::new();
    states.insert((0, 0), BigUint::one());
    let mut out = WordCensus::default();
    let mut unresolved: BTreeMap<u64, BigUint> = BTreeMap::new();
    while let Some(((s, r), c)) = states.pop_first() {
        *out.words_by_sum.entry(s).or_default() += &c;
        let t = rule.max_digit(s, r);
        *out.histogram.entry(s + t).or_default() += &c;
        for a in 2..=t {
            let s2 = s + a;
            if s2 <= budget {
                *states.entry((s2, rule.next_r(r, a))).or_default() += &c * 2u32;
            } else {
                *unresolved.entry(s2).or_default() += &c * 2u32;
            }
        }
    }
    out.unresolved_measure = sum_rationals(
        unresolved
            .into_iter()
            .map(|(s, c)| Rational::from_integer(BigInt::from(c)) * pow2(1 - s as i64)),
    );
    out
}

/// Default number of gaps materialized as explicit intervals.
pub const DEFAULT_MATERIALIZE: u64 = 1 << 17;

/// Explicit gaps for all words with `S <= s_max`, level `S`, left to right.
pub fn enumerate_gaps(rule: &Rule, s_max: u64) -> Vec<GapLevel> {
    let mut by_level: BTreeMap<u64, Vec<Interval>> = BTreeMap::new();
    // (alpha, beta, S, R): the cylinder is alpha + beta·[-1, 1].
    let mut stack = vec![(Rational::zero(), Rational::one(), 0u64, 0u64)];
    while let Some((alpha, beta, s, r)) = stack.pop() {
        let t = rule.max_digit(s, r);
        let half = beta.abs() * pow2(1 - t as i64);
        by_level
            .entry(s)
            .or_default()
            .push(Interval::open(&alpha - &half, &alpha + &half));
        for a in 2..=t {
            if s + a > s_max {
                break;
            }
            let step = pow2(-(a as i64));
            for sign in [-1i64, 1] {
                let sg = int(sign);
                let alpha2 = &alpha + &beta * &sg * int(3) * &step;
                let beta2 = &beta * &sg * &step;
                stack.push((alpha2, beta2, s + a, rule.next_r(r, a)));
            }
        }
    }
    by_level
        .into_iter()
        .map(|(s, mut gaps)| {
            gaps.sort_by(|a, b| a.lo.cmp(&b.lo));
            GapLevel {
                level: s as u32,
                gaps,
            }
        })
        .collect()
}

fn build(rule: Rule, budget: u64, materialize: u64, name: &str, params: serde_json::Value) -> Result<GapCantor> {
    let c = census(&rule, budget);
    let cut = pow2(2 - rule.min_missing_exponent(budget) as i64);
    let histogram: Vec<(Rational, BigUint)> = c
        .histogram
        .iter()
        .map(|(e, n)| (pow2(2 - *e as i64), n.clone()))
        .collect();
    if !histogram.iter().any(|(l, _)| l > &cut) {
        return Err(Error::Construction("sum budget too small to resolve any gap".into()));
    }
    let mut s_mat = None;
    let mut acc = BigUint::zero();
    for (s, w) in &c.words_by_sum {
        acc += w;
        if acc > BigUint::from(materialize) {
            break;
        }
        s_mat = Some(*s);
    }
    let levels = match s_mat {
        Some(s) => enumerate_gaps(&rule, s),
        None => vec![],
    };
    let fully = s_mat == c.words_by_sum.keys().last().copied();
    let mut gc = GapCantor::new(
        Interval::closed(int(-1), int(1)),
        levels,
        GapMeta {
            construction: name.into(),
            params,
            complete: false,
            max_missing_length: Some(cut),
            unresolved_measure: Some(c.unresolved_measure),
            materialized_through: if fully { None } else { Some(s_mat.unwrap_or(0) as u32) },
        },
    )?;
    let mut hist = histogram;
    hist.reverse();
    gc.set_histogram(hist);
    Ok(gc)
}

/// `K̃₂(s, N)`: closure of points whose digits obey `|x_i| <= max(N, s Σ_{j<i}|x_j|)`.
/// Gaps are emitted for every admissible word with `Σ|x_j| <= sum_budget`.
pub fn pesin_k2(s: &Rational, n: u64, sum_budget: u64) -> Result<GapCantor> {
    pesin_k2_with(s, n, sum_budget, DEFAULT_MATERIALIZE)
}

pub fn pesin_k2_with(s: &Rational, n: u64, sum_budget: u64, materialize: u64) -> Result<GapCantor> {
    if !s.is_positive() {
        return Err(Error::InvalidParam("s must be positive".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParam("N must be at least 2".into()));
    }
    build(
        Rule::Growth { s: s.clone(), n },
        sum_budget,
        materialize,
        "pesin_k2",
        json!({ "s": rational::format(s), "N": n, "sum_budget": sum_budget }),
    )
}

/// `K̃₃(M, δ)`: after every digit, the digits of absolute value above `M`
/// carry at most a `δ` fraction of `Σ|x_j|`.
pub fn pesin_k3(m: u64, delta: &Rational, sum_budget: u64) -> Result<GapCantor> {
    pesin_k3_with(m, delta, sum_budget, DEFAULT_MATERIALIZE)
}

pub fn pesin_k3_with(m: u64, delta: &Rational, sum_budget: u64, materialize: u64) -> Result<GapCantor> {
    if m < 3 {
        return Err(Error::InvalidParam("M must be at least 3".into()));
    }
    if !(delta.is_positive() && delta < &rational::rat(1, 2)) {
        return Err(Error::InvalidParam("delta must lie in (0, 1/2)".into()));
    }
    build(
        Rule::StrongRegularity {
            m,
            delta: delta.clone(),
        },
        sum_budget,
        materialize,
        "pesin_k3",
        json!({ "M": m, "delta": rational::format(delta), "sum_budget": sum_budget }),
    )
}

/// Reference check of a whole word against a rule, digit by digit.
pub fn word_admissible(rule: &Rule, word: &SymbolicWord) -> bool {
    let (mut s, mut r) = (0u64, 0u64);
    for d in word.digits() {
        let a = d.unsigned_abs();
        if !rule.admits(s, r, a) {
            return false;
        }
        r = rule.next_r(r, a);
        s += a;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::GapBudget;
    use crate::interval::normalize;
    use crate::rational::rat;

    fn w(d: &[i64]) -> SymbolicWord {
        SymbolicWord::new(d.to_vec()).unwrap()
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(
            chebyshev_cylinder(&w(&[2])),
            Interval::new(rat(1, 2), int(1), false, true).unwrap()
        );
        assert_eq!(
            chebyshev_cylinder(&w(&[2, 2])),
            Interval::new(rat(7, 8), int(1), false, true).unwrap()
        );
        assert_eq!(chebyshev_cylinder(&w(&[])), Interval::closed(int(-1), int(1)));
        assert!(SymbolicWord::new(vec![2, 1]).is_err());
        assert!(SymbolicWord::new(vec![-1]).is_err());
    }

    #[test]
    fn cylinder_lengths_and_branch_images() {
        for word in [vec![3], vec![-2, 5], vec![4, -3, 2], vec![-6, -6]] {
            let sw = w(&word);
            let c = chebyshev_cylinder(&sw);
            assert_eq!(c.length(), sw.cylinder_length());
            let m = word[0];
            let n = m.abs() - 2;
            // The map is even: both branches send |x| through the same chart.
            let f = |x: &Rational| pow2(n + 2) * (x.abs() - pow2(-n - 1)) - Rational::one();
            let mid = (&c.lo + &c.hi) / int(2);
            let tail = chebyshev_cylinder(&w(&word[1..]));
            assert!(tail.contains(&f(&mid)) || tail.closure().contains(&f(&mid)));
        }
    }

    #[test]
    fn growth_rule_first_digit() {
        let rule = Rule::Growth { s: rat(1, 1), n: 3 };
        assert_eq!(rule.max_digit(0, 0), 3);
        assert!(word_admissible(&rule, &w(&[3, 3, 6])));
        assert!(!word_admissible(&rule, &w(&[4])));
        assert!(!word_admissible(&rule, &w(&[3, 3, 7])));
    }

    #[test]
    fn strong_regularity_examples() {
        let rule = Rule::StrongRegularity { m: 3, delta: rat(1, 3) };
        assert!(word_admissible(&rule, &w(&[2, -2, 2, 2, -2, 2, 2, 2, -2])));
        // A digit 4 needs the running sum, itself included, to reach 12.
        assert!(!word_admissible(&rule, &w(&[3, 3, 4])));
        assert!(!word_admissible(&rule, &w(&[3, 2, 2, 4])));
        assert!(word_admissible(&rule, &w(&[3, 3, 2, 4])));
        assert!(word_admissible(&rule, &w(&[2, 2, 2, 2, 4])));
    }

    #[test]
    fn census_matches_enumeration() {
        for rule in [
            Rule::Growth { s: rat(1, 1), n: 3 },
            Rule::Growth { s: rat(1, 2), n: 2 },
            Rule::StrongRegularity { m: 3, delta: rat(1, 3) },
        ] {
            let budget = 14;
            let c = census(&rule, budget);
            let levels = enumerate_gaps(&rule, budget);
            let mut hist: BTreeMap<Rational, BigUint> = BTreeMap::new();
            for g in levels.iter().flat_map(|l| &l.gaps) {
                *hist.entry(g.length()).or_default() += 1u32;
            }
            let expected: BTreeMap<Rational, BigUint> = c
                .histogram
                .iter()
                .map(|(e, n)| (pow2(2 - *e as i64), n.clone()))
                .collect();
            assert_eq!(hist, expected);
            for lv in &levels {
                assert_eq!(BigUint::from(lv.gaps.len()), c.words_by_sum[&(lv.level as u64)]);
            }
            // Gaps are pairwise disjoint open intervals.
            let all: Vec<Interval> = levels.iter().flat_map(|l| l.gaps.clone()).collect();
            let total: Rational = all.iter().map(Interval::length).sum();
            assert_eq!(normalize(all).measure(), total);
        }
    }

    #[test]
    fn gaps_sit_inside_their_cylinders() {
        let rule = Rule::Growth { s: rat(1, 1), n: 3 };
        // Word (3, -2): S = 5, T = max(3, 5) = 5, gap length 2^(2-10).
        let cyl = chebyshev_cylinder(&w(&[3, -2]));
        let levels = enumerate_gaps(&rule, 5);
        let lv = levels.iter().find(|l| l.level == 5).unwrap();
        let inside: Vec<_> = lv.gaps.iter().filter(|g| cyl.contains_interval(g)).collect();
        assert_eq!(inside.len(), 1);
        assert_eq!(inside[0].length(), pow2(-8));
        let mid = (&cyl.lo + &cyl.hi) / int(2);
        assert_eq!((&inside[0].lo + &inside[0].hi) / int(2), mid);
    }

    #[test]
    fn per_level_cylinder_cap() {
        let c = census(&Rule::Growth { s: rat(1, 1), n: 3 }, 30);
        for (s, n) in &c.words_by_sum {
            assert!(n <= &(BigUint::one() << *s as usize));
        }
    }

    #[test]
    fn pesin_gap_sets() {
        let g = pesin_k2_with(&rat(1, 1), 3, 12, 1 << 20).unwrap();
        assert!(g.meta.materialized_through.is_none());
        let total = g.total_count();
        assert_eq!(BigUint::from(g.explicit_count()), total);
        assert_eq!(g.gaps_up_to(&GapBudget::Level(0)).unwrap(), vec![Interval::open(rat(-1, 4), rat(1, 4))]);
        let big = pesin_k2_with(&rat(1, 1), 3, 24, 1000).unwrap();
        assert!(big.meta.materialized_through.is_some());
        assert!(big.total_count() > BigUint::from(1_000_000u32));
        let k3 = pesin_k3(3, &rat(1, 3), 16).unwrap();
        assert_eq!(k3.meta.max_missing_length, Some(pow2(1 - 16 - 3)));
        assert!(pesin_k3(2, &rat(1, 3), 16).is_err());
        assert!(pesin_k3(3, &rat(1, 2), 16).is_err());
    }

    #[test]
    fn resolved_mass_accounts_for_everything() {
        // Every point of [-1,1] lies in a gap, in the cylinder of a word past
        // the budget, or in the limit set; at finite budget the last is empty
        // up to measure zero boundaries, so gap mass + unresolved mass = 2.
        let g = pesin_k2_with(&rat(1, 1), 3, 10, 1 << 20).unwrap();
        let gaps: Rational = g.all_gaps().unwrap().iter().map(Interval::length).sum();
        assert_eq!(gaps + g.meta.unresolved_measure.clone().unwrap(), int(2));
    }
}
