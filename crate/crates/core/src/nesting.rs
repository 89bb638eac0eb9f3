//! When does `t + K ⊆ K̃` for a positive-measure set of `t`?
//!
//! The admissible set is `𝕏 = {t : t + K ⊆ K̃}`. Since `t + K` meets the gap
//! `(a, b)` exactly when `t ∈ (a, b) − K`,
//!
//! ```text
//! base ∖ 𝕏 = ⋃_n ((a_n, b_n) − K) ∩ base,   base = [min K̃ − min K, max K̃ − max K].
//! ```
//!
//! Replacing `K` by an outer cover gives a subset of `𝕏` (`x_inner`);
//! replacing it by cylinder endpoints, which lie in `K`, gives a superset
//! (`x_outer`). The sufficient condition
//!
//! ```text
//! Σ_{l > diam K} (diam K + l) + 2 C_K Σ_{l <= diam K} l^(1-d) < diam K̃ − diam K
//! ```
//!
//! is evaluated with certified rounding; its slack lower-bounds `Leb 𝕏`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{
    CantorSpec, DigitCantorSpec, FuzzyMeasureCert, GapBudget, GapCantor, GeometricTail, LatticeLevel,
    DEFAULT_PART_BUDGET,
};
use crate::error::{Error, Result};
use crate::interval::{self, complement_in, minkowski_diff, normalize, pairwise_minus_union, Interval, IntervalUnion};
use crate::rational::{self, int, Rational};
use crate::rounding::{self, DirectedRounding, Enclosure, PowCache, Side};

fn big(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Length histogram selected by a budget, longest first.
fn histogram(gc: &GapCantor, budget: &GapBudget) -> Result<Vec<(Rational, BigUint)>> {
    match budget {
        GapBudget::All => Ok(gc.length_histogram()),
        GapBudget::MinLength(ell) if gc.histogram.is_some() || gc.is_lattice() => Ok(gc
            .length_histogram()
            .into_iter()
            .filter(|(l, _)| l >= ell)
            .collect()),
        _ => {
            let mut lens: Vec<Rational> = gc.gaps_up_to(budget)?.iter().map(Interval::length).collect();
            lens.sort_unstable_by(|a, b| b.cmp(a));
            let mut out: Vec<(Rational, BigUint)> = Vec::new();
            for l in lens {
                match out.last_mut() {
                    Some((x, c)) if *x == l => *c += 1u32,
                    _ => out.push((l, BigUint::one())),
                }
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Condition (C_p)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CpVerdict {
    ConvergingEvidence,
    DivergingEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpPartialSum {
    /// Number of gaps summed; `None` for the entry that adds the closed-form tail.
    #[serde(with = "opt_uint")]
    pub gaps: Option<BigUint>,
    #[serde(with = "rational::serde_str")]
    pub sum: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpReport {
    #[serde(with = "rational::serde_str")]
    pub p: Rational,
    pub partial_sums: Vec<CpPartialSum>,
    pub verdict: CpVerdict,
}

mod opt_uint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(n) => s.serialize_some(&n.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Upper-rounded `Σ l^p`, checkpointed after each distinct gap length.
///
/// Verdict: a closed-form tail decides it; otherwise the mean ratio of the
/// last four per-length contributions is compared against 1 (below 0.95 is
/// converging evidence, above 1 diverging). The verdict is advisory only.
pub fn cp_partial_sum(gc: &GapCantor, p: &Rational, budget: &GapBudget, r: &DirectedRounding) -> Result<CpReport> {
    if !p.is_positive() || p > &Rational::one() {
        return Err(Error::InvalidParam("p must lie in (0, 1]".into()));
    }
    let pe = Enclosure::point(p.clone());
    let mut pc = PowCache::new(pe.clone(), *r);
    let mut partial_sums = Vec::new();
    let mut contributions = Vec::new();
    let mut sum = Rational::zero();
    let mut count = BigUint::zero();
    for (len, c) in histogram(gc, budget)? {
        let term = r.up(&(big(&c) * pc.get(&len)?.hi));
        contributions.push(rational::to_f64(&term));
        sum += term;
        count += &c;
        partial_sums.push(CpPartialSum {
            gaps: Some(count.clone()),
            sum: sum.clone(),
        });
    }
    let mut verdict = CpVerdict::Inconclusive;
    if gc.meta.complete && *budget == GapBudget::All {
        verdict = CpVerdict::ConvergingEvidence;
    } else if let (Some(tail), GapBudget::All) = (&gc.tail, budget) {
        match tail.power_sum_upper(&pe, r)? {
            Some(t) => {
                sum += t;
                partial_sums.push(CpPartialSum { gaps: None, sum: sum.clone() });
                verdict = CpVerdict::ConvergingEvidence;
            }
            None => verdict = CpVerdict::DivergingEvidence,
        }
    } else if contributions.len() >= 5 {
        let last = &contributions[contributions.len() - 5..];
        let ratios: Vec<f64> = last.windows(2).map(|w| w[1] / w[0]).collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        verdict = if mean < 0.95 {
            CpVerdict::ConvergingEvidence
        } else if mean > 1.0 {
            CpVerdict::DivergingEvidence
        } else {
            CpVerdict::Inconclusive
        };
    }
    Ok(CpReport {
        p: p.clone(),
        partial_sums,
        verdict,
    })
}

/// The gap set of `K̃₁ ∩ K̃₂` on a shared ambient interval: the components
/// of the union of both gap lists.
pub fn intersect_gapsets(a: &GapCantor, b: &GapCantor) -> Result<GapCantor> {
    if a.ambient != b.ambient {
        return Err(Error::InvalidParam("gap sets live on different ambient intervals".into()));
    }
    let mut gaps = a.all_gaps()?;
    gaps.extend(b.all_gaps()?);
    let mut gc = GapCantor::from_gaps(a.ambient.clone(), normalize(gaps).into_parts(), "intersection")?;
    gc.meta.complete = a.meta.complete && b.meta.complete;
    Ok(gc)
}

/// `(Σ over the intersection, Σ over K̃₁ + Σ over K̃₂)` of upper-rounded `l^p`.
pub fn intersection_closure_check(
    a: &GapCantor,
    b: &GapCantor,
    p: &Rational,
    r: &DirectedRounding,
) -> Result<(Rational, Rational)> {
    let total = |gc: &GapCantor| -> Result<Rational> {
        Ok(cp_partial_sum(gc, p, &GapBudget::All, r)?
            .partial_sums
            .iter()
            .filter(|s| s.gaps.is_some())
            .last()
            .map(|s| s.sum.clone())
            .unwrap_or_else(Rational::zero))
    };
    let meet = intersect_gapsets(a, b)?;
    Ok((total(&meet)?, total(a)? + total(b)?))
}

// ---------------------------------------------------------------------------
// Exponent of convergence
// ---------------------------------------------------------------------------

/// Minimum sample for [`estimate_p`].
pub const MIN_P_SAMPLE: u64 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PEstimate {
    /// `None` when the sample is too small to say anything.
    pub p_hat: Option<Enclosure>,
    pub method: String,
    #[serde(with = "rational::serde_uint")]
    pub sample_size: BigUint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Exponent of convergence `limsup log n / −log l_(n)` of the sorted gaps.
///
/// Gaps no longer than `meta.max_missing_length` are dropped first, since
/// their ranks are unreliable. Within each block of equal lengths the rank
/// runs from `start` to `end`; every block meeting the last quartile of ranks
/// contributes `log start / L` and `log end / L` (`L = −log l`). A secant
/// `Δ log end / Δ L` from the first block with `L >= L_last / 2` to the last
/// block is added, the hull of all of these is widened by the distance between
/// the last block's value and the secant, and the result is clamped to `[0, 1]`.
pub fn estimate_p(gc: &GapCantor, budget: &GapBudget, r: &DirectedRounding) -> Result<PEstimate> {
    let method = "sorted-gap exponent of convergence".to_string();
    let mut hist = histogram(gc, budget)?;
    if gc.meta.complete && *budget == GapBudget::All {
        let n: BigUint = hist.iter().map(|(_, c)| c.clone()).sum();
        return Ok(PEstimate {
            p_hat: Some(Enclosure::point(Rational::zero())),
            method,
            sample_size: n,
            note: Some("finitely many gaps".into()),
        });
    }
    if let Some(cut) = &gc.meta.max_missing_length {
        hist.retain(|(l, _)| l > cut);
    }
    let n: BigUint = hist.iter().map(|(_, c)| c.clone()).sum();
    if n < BigUint::from(MIN_P_SAMPLE) {
        return Ok(PEstimate {
            p_hat: None,
            method,
            sample_size: n,
            note: Some(format!("inconclusive: fewer than {MIN_P_SAMPLE} resolved gaps")),
        });
    }
    let bits = r.work_bits();
    // (L, log start, log end)
    let mut blocks = Vec::with_capacity(hist.len());
    let mut cum = BigUint::zero();
    for (len, c) in &hist {
        let start = &cum + 1u32;
        cum += c;
        if len >= &Rational::one() {
            continue;
        }
        let l = rounding::ln(&len.recip(), bits);
        blocks.push((l, rounding::ln(&big(&start), bits), rounding::ln(&big(&cum), bits), cum.clone()));
    }
    let Some(last) = blocks.last() else {
        return Ok(PEstimate {
            p_hat: None,
            method,
            sample_size: n,
            note: Some("inconclusive: no gap shorter than 1".into()),
        });
    };
    let quartile = big(&n) * rational::rat(3, 4);
    let mut hull: Option<Enclosure> = None;
    let mut add = |e: Enclosure| {
        hull = Some(match hull.take() {
            Some(h) => h.hull(&e),
            None => e,
        })
    };
    for (l, ls, le, end) in &blocks {
        if big(end) >= quartile {
            add(ls.div(l)?);
            add(le.div(l)?);
        }
    }
    let (l_last, _, le_last, _) = last;
    let e_last = le_last.div(l_last)?;
    let half = l_last.scale(&rational::rat(1, 2));
    let anchor = blocks.iter().position(|(l, ..)| l.lo >= half.hi).unwrap_or(blocks.len() - 1);
    let mut widen = Rational::zero();
    if anchor + 1 < blocks.len() {
        let (l_a, _, le_a, _) = &blocks[anchor];
        let secant = le_last.sub(le_a).div(&l_last.sub(l_a))?;
        widen = rational::max(&(&e_last.hi - &secant.lo), &(&secant.hi - &e_last.lo));
        add(secant);
    }
    let h = hull.expect("the last block meets the last quartile");
    let widened = Enclosure::new(&h.lo - &widen, &h.hi + &widen).clamp(&Rational::zero(), &Rational::one());
    Ok(PEstimate {
        p_hat: Some(r.snap(&widened)),
        method,
        sample_size: n,
        note: None,
    })
}

// ---------------------------------------------------------------------------
// The sufficient condition
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The inequality holds for every gap of `K̃`, so `Leb 𝕏 >= theo1_bound > 0`.
    CertifiedPositive,
    Indeterminate,
    /// Even with the lower end of every estimate the inequality fails.
    CertifiedViolation,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::CertifiedPositive => 0,
            Verdict::Indeterminate => 2,
            Verdict::CertifiedViolation => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "rational::serde_str")]
    pub diam_k: Rational,
    #[serde(with = "rational::serde_str")]
    pub diam_ktilde: Rational,
    /// `Σ_{l > diam K} (diam K + l)`, exact.
    #[serde(with = "rational::serde_str")]
    pub big_gap_sum: Rational,
    /// Upper bound of `2 C_K Σ_{l <= diam K} l^(1-d)`; `None` if the tail diverges.
    #[serde(with = "rational::serde_opt")]
    pub small_gap_sum_upper: Option<Rational>,
    /// `diam K̃ − diam K − big − small`, lower-rounded. Never clamped.
    #[serde(with = "rational::serde_opt")]
    pub theo1_bound: Option<Rational>,
    /// Same expression with `ck_lower` and lower powers, over the gaps seen.
    #[serde(with = "rational::serde_str")]
    pub theo1_bound_upper: Rational,
    pub ck: FuzzyMeasureCert,
    #[serde(with = "rational::serde_uint")]
    pub gaps_used: BigUint,
    /// Closed-form tail added to both sums.
    pub tail_included: bool,
    /// Some gaps of `K̃` are neither enumerated nor covered by a closed-form tail.
    pub tail_caveat: bool,
    pub verdict: Verdict,
}

fn check_cert(cert: &FuzzyMeasureCert) -> Result<()> {
    if cert.ck_upper.is_negative() || cert.ck_lower > cert.ck_upper {
        return Err(Error::Uncertifiable("inconsistent C_K bracket".into()));
    }
    if cert.d.lo.is_negative() || cert.d.hi > Rational::one() {
        return Err(Error::Uncertifiable("dimension enclosure outside [0, 1]".into()));
    }
    Ok(())
}

/// Evaluates the sufficient condition with certified rounding.
///
/// With `GapBudget::All` and a closed-form tail every gap is accounted for;
/// otherwise a positive value only speaks for the enumerated gaps and the
/// report carries `tail_caveat`. The upper evaluation only ever drops
/// nonnegative terms, so a nonpositive `theo1_bound_upper` is a certified
/// violation whatever the budget. When `diam K > diam K̃` the verdict is
/// indeterminate.
pub fn theo1_lower_bound(
    k: &CantorSpec,
    cert: &FuzzyMeasureCert,
    gc: &GapCantor,
    budget: &GapBudget,
    r: &DirectedRounding,
) -> Result<BoundReport> {
    check_cert(cert)?;
    let diam_k = k.diam();
    let diam_kt = gc.diam();
    let one_minus_d = Enclosure::point(Rational::one()).sub(&cert.d);
    let mut pc = PowCache::new(one_minus_d.clone(), *r);
    let mut big_sum = Rational::zero();
    let mut small_hi = Rational::zero();
    let mut small_lo = Rational::zero();
    let mut used = BigUint::zero();
    for (len, c) in histogram(gc, budget)? {
        used += &c;
        let c = big(&c);
        if len > diam_k {
            big_sum += &c * (&diam_k + &len);
        } else {
            let pw = pc.get(&len)?;
            small_hi += &c * &pw.hi;
            small_lo += &c * &pw.lo;
        }
    }
    let mut tail_included = false;
    let mut divergent = false;
    let complete = gc.meta.complete;
    if let (Some(tail), GapBudget::All) = (&gc.tail, budget) {
        let rest = absorb_big_tail_levels(tail, &diam_k, &mut big_sum)?;
        match rest.power_sum_upper(&one_minus_d, r)? {
            Some(t) => small_hi += t,
            None => divergent = true,
        }
        small_lo += rest.power_sum_lower(&one_minus_d, r)?;
        tail_included = true;
    }
    let tail_caveat = !(tail_included || (complete && *budget == GapBudget::All));
    let base = &diam_kt - &diam_k;
    let small_upper = (!divergent).then(|| r.up(&(int(2) * &cert.ck_upper * r.up(&small_hi))));
    let bound = small_upper.as_ref().map(|s| r.down(&(&base - &big_sum - s)));
    let small_lower = r.down(&(int(2) * &cert.ck_lower * r.down(&small_lo)));
    let bound_upper = r.up(&(&base - &big_sum - small_lower));
    let verdict = match &bound {
        // No translate fits at all; the inequality says nothing here.
        _ if diam_k > diam_kt => Verdict::Indeterminate,
        _ if !bound_upper.is_positive() => Verdict::CertifiedViolation,
        Some(b) if b.is_positive() && !tail_caveat => Verdict::CertifiedPositive,
        _ => Verdict::Indeterminate,
    };
    Ok(BoundReport {
        diam_k,
        diam_ktilde: diam_kt,
        big_gap_sum: big_sum,
        small_gap_sum_upper: small_upper,
        theo1_bound: bound,
        theo1_bound_upper: bound_upper,
        ck: cert.clone(),
        gaps_used: used,
        tail_included,
        tail_caveat,
        verdict,
    })
}

/// Adds tail levels longer than `diam_k` to the big-gap sum and returns the
/// remaining tail.
fn absorb_big_tail_levels(tail: &GeometricTail, diam_k: &Rational, big_sum: &mut Rational) -> Result<GeometricTail> {
    if tail.len_ratio >= Rational::one() || !tail.len_ratio.is_positive() {
        return Err(Error::InvalidParam("tail length ratio must lie in (0, 1)".into()));
    }
    let mut t = tail.clone();
    let mut steps = 0;
    while &t.len0 > diam_k {
        *big_sum += &t.count0 * (diam_k + &t.len0);
        t.first_level += 1;
        t.count0 = &t.count0 * &t.count_ratio;
        t.len0 = &t.len0 * &t.len_ratio;
        steps += 1;
        if steps > 4096 {
            return Err(Error::Budget("tail gaps stay above diam K for 4096 levels".into()));
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Inner and outer oracles
// ---------------------------------------------------------------------------

/// `[min K̃ − min K, max K̃ − max K]`, or `None` when `diam K > diam K̃`.
pub fn translation_base(k: &CantorSpec, gc: &GapCantor) -> Option<Interval> {
    Interval::try_new(
        &gc.ambient.lo - k.min_point(),
        &gc.ambient.hi - k.max_point(),
        true,
        true,
    )
}

/// `⋃_n (gap_n − cover) ∩ base`, normalized.
pub fn admissible_complement(gaps: &[Interval], cover: &IntervalUnion, base: &Interval) -> IntervalUnion {
    pairwise_minus_union(gaps, cover.parts(), base)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub base: Option<Interval>,
    /// Certified subset of `𝕏` (of the budgeted gap set). Absent on the
    /// periodic path, where only measures are computed.
    pub x_inner: Option<IntervalUnion>,
    /// Certified superset of `𝕏`.
    pub x_outer: Option<IntervalUnion>,
    /// Lower bound of `Leb x_inner` (exact when the set is present).
    #[serde(with = "rational::serde_str")]
    pub measure_inner: Rational,
    /// Upper bound of `Leb x_outer` (exact when the set is present).
    #[serde(with = "rational::serde_str")]
    pub measure_outer: Rational,
    #[serde(with = "rational::serde_str")]
    pub base_measure: Rational,
    pub depth_used: u32,
    #[serde(with = "rational::serde_uint")]
    pub gaps_used: BigUint,
    pub tail_caveat: bool,
    pub periodic: bool,
}

impl OracleReport {
    fn empty_base(depth: u32) -> OracleReport {
        OracleReport {
            base: None,
            x_inner: Some(IntervalUnion::empty()),
            x_outer: Some(IntervalUnion::empty()),
            measure_inner: Rational::zero(),
            measure_outer: Rational::zero(),
            base_measure: Rational::zero(),
            depth_used: depth,
            gaps_used: BigUint::zero(),
            tail_caveat: false,
            periodic: false,
        }
    }
}

/// Inner and outer approximations of `𝕏` from a depth-`depth` view of `K`
/// and the budgeted gaps of `K̃`.
///
/// Lattice gap levels are handled by folding modulo the lattice step, so
/// levels with astronomically many gaps cost as much as one period.
pub fn x_inner_outer(k: &CantorSpec, gc: &GapCantor, depth: u32, budget: &GapBudget) -> Result<OracleReport> {
    let Some(base) = translation_base(k, gc) else {
        return Ok(OracleReport::empty_base(depth));
    };
    let tail_caveat = !(gc.meta.complete && *budget == GapBudget::All);
    let periodic_ok = matches!(budget, GapBudget::All | GapBudget::Level(_) | GapBudget::MinLength(_));
    if gc.is_lattice() && periodic_ok {
        return periodic_oracle(k, gc, depth, budget, &base, tail_caveat);
    }
    let gaps = gc.gaps_up_to(budget)?;
    let cover = k.cover(depth, DEFAULT_PART_BUDGET)?;
    let kernel = k.kernel(depth, DEFAULT_PART_BUDGET)?;
    let base_u = IntervalUnion::single(base.clone());
    let x_inner = complement_in(&base, &admissible_complement(&gaps, &cover, &base))?;
    let x_outer = complement_in(&base, &admissible_complement(&gaps, &kernel, &base))?;
    debug_assert!(x_inner.is_subset(&x_outer) && x_outer.is_subset(&base_u));
    Ok(OracleReport {
        measure_inner: x_inner.measure(),
        measure_outer: x_outer.measure(),
        base_measure: base.length(),
        base: Some(base),
        x_inner: Some(x_inner),
        x_outer: Some(x_outer),
        depth_used: depth,
        gaps_used: BigUint::from(gaps.len()),
        tail_caveat,
        periodic: false,
    })
}

/// `x mod m` in `[0, m)`.
fn rem(x: &Rational, m: &Rational) -> Rational {
    x - Rational::from_integer(rational::floor(&(x / m))) * m
}

/// Residues modulo `period` of the depth-`depth` cylinder left endpoints of a
/// digit set, together with the cylinder length. Digit positions whose place
/// value is a multiple of `period` drop out, so only the trailing positions
/// are enumerated.
pub fn residue_cover(spec: &DigitCantorSpec, depth: u32, period: &Rational) -> Result<(Vec<Rational>, Rational)> {
    if !period.is_positive() {
        return Err(Error::InvalidParam("period must be positive".into()));
    }
    let b = int(spec.base as i64);
    let bm1 = int(spec.base as i64 - 1);
    let bn = rational::powi(spec.base as i64, -(depth as i64));
    let offset = &spec.translate + &spec.scale * int(spec.digits[0]) * &bn / &bm1;
    let mut res: BTreeSet<Rational> = BTreeSet::new();
    res.insert(rem(&offset, period));
    let mut place = spec.scale.clone();
    for _ in 0..depth {
        place /= &b;
        if rational::is_integer(&(&place / period)) {
            continue;
        }
        let count = res.len() as u64 * spec.digits.len() as u64;
        if count > DEFAULT_PART_BUDGET {
            return Err(Error::Budget(format!("{count} residues exceed the part budget")));
        }
        let mut next = BTreeSet::new();
        for r in &res {
            for &d in &spec.digits {
                next.insert(rem(&(r + &place * int(d)), period));
            }
        }
        res = next;
    }
    Ok((res.into_iter().collect(), spec.part_length(depth)))
}

/// The pieces of `K` (cover or kernel) to subtract from a lattice pattern,
/// reduced modulo `period` where that is valid.
fn residue_pieces(k: &CantorSpec, depth: u32, period: &Rational, kernel: bool) -> Result<Vec<Interval>> {
    match k {
        CantorSpec::Union { set } => Ok(set.parts().to_vec()),
        CantorSpec::Digit(spec) => {
            let (res, len) = residue_cover(spec, depth, period)?;
            let mut out = Vec::with_capacity(res.len() * 2);
            for r in res {
                if kernel {
                    out.push(Interval::point(&r + &len));
                    out.push(Interval::point(r));
                } else {
                    out.push(Interval::closed(r.clone(), &r + &len));
                }
            }
            Ok(out)
        }
    }
}

/// Folds a union into `[0, period]`.
fn fold(parts: impl IntoIterator<Item = Interval>, period: &Rational) -> IntervalUnion {
    let whole = Interval::closed(Rational::zero(), period.clone());
    let mut out = Vec::new();
    for x in parts {
        if x.length() >= *period {
            return IntervalUnion::single(whole);
        }
        let shift = -Rational::from_integer(rational::floor(&(&x.lo / period))) * period;
        let y = x.translate(&shift);
        if y.hi <= *period {
            out.push(y);
        } else {
            out.push(Interval::try_new(y.lo.clone(), period.clone(), y.lo_closed, true).unwrap());
            out.push(Interval::new(Rational::zero(), &y.hi - period, true, y.hi_closed).unwrap());
        }
    }
    normalize(out)
}

/// `Leb(F ∩ [0, y])` for `F ⊆ [0, period]`.
fn prefix_measure(f: &IntervalUnion, y: &Rational) -> Rational {
    interval::sum_rationals(f.parts().iter().filter(|p| &p.lo < y).map(|p| rational::min(&p.hi, y) - &p.lo))
}

/// `Leb((F + period·Z) ∩ [a, b])`.
fn periodic_measure(f: &IntervalUnion, period: &Rational, a: &Rational, b: &Rational) -> Rational {
    let g = |x: &Rational| {
        let q = rational::floor(&(x / period));
        Rational::from_integer(q.clone()) * f.measure() + prefix_measure(f, &(x - Rational::from_integer(q) * period))
    };
    if a >= b {
        Rational::zero()
    } else {
        g(b) - g(a)
    }
}

/// Measures of a superset and a subset of `⋃_k (start + k·step + pattern − K) ∩ base`.
fn lattice_level_measures(
    lv: &LatticeLevel,
    k: &CantorSpec,
    depth: u32,
    base: &Interval,
) -> Result<(Rational, Rational)> {
    let p = &lv.step;
    if lv.count.is_zero() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    let c = big(&lv.count);
    let hull = k.hull();
    let m_min = Rational::from_integer(rational::floor(&((&lv.pattern.lo - &hull.hi) / p)));
    let m_max = Rational::from_integer(rational::floor(&((&lv.pattern.hi - &hull.lo) / p)));
    let (x0, x1) = (&base.lo - &lv.start, &base.hi - &lv.start);
    let window = |n0: &Rational, n1: &Rational| {
        let a = rational::max(&x0, &(n0 * p));
        let b = rational::min(&x1, &((n1 + Rational::one()) * p));
        (a, b)
    };
    let one = Rational::one();
    let measure = |kernel: bool, n0: &Rational, n1: &Rational| -> Result<Rational> {
        if n0 > n1 {
            return Ok(Rational::zero());
        }
        let pieces = residue_pieces(k, depth, p, kernel)?;
        let f = fold(pieces.iter().map(|q| lv.pattern.minus(q)), p);
        let (a, b) = window(n0, n1);
        Ok(periodic_measure(&f, p, &a, &b))
    };
    let sup = measure(false, &m_min, &(&c - &one + &m_max))?;
    let sub = measure(true, &m_max, &(&c - &one + &m_min))?;
    Ok((sup, sub))
}

fn periodic_oracle(
    k: &CantorSpec,
    gc: &GapCantor,
    depth: u32,
    budget: &GapBudget,
    base: &Interval,
    tail_caveat: bool,
) -> Result<OracleReport> {
    let keep = |level: u32, len: &Rational| match budget {
        GapBudget::Level(l) => level <= *l,
        GapBudget::MinLength(m) => len >= m,
        _ => true,
    };
    let mut used = BigUint::zero();
    let explicit: Vec<Interval> = gc
        .levels
        .iter()
        .flat_map(|l| l.gaps.iter().filter(|g| keep(l.level, &g.length())).cloned())
        .collect();
    used += explicit.len();
    let bm = base.length();
    let (mut sup_total, mut sub_max) = if explicit.is_empty() {
        (Rational::zero(), Rational::zero())
    } else {
        let cover = k.cover(depth, DEFAULT_PART_BUDGET)?;
        let kernel = k.kernel(depth, DEFAULT_PART_BUDGET)?;
        (
            admissible_complement(&explicit, &cover, base).measure(),
            admissible_complement(&explicit, &kernel, base).measure(),
        )
    };
    for lv in gc.lattice.iter().filter(|l| keep(l.level, &l.pattern.length())) {
        let (sup, sub) = lattice_level_measures(lv, k, depth, base)?;
        used += &lv.count;
        sup_total += sup;
        if sub > sub_max {
            sub_max = sub;
        }
    }
    Ok(OracleReport {
        base: Some(base.clone()),
        x_inner: None,
        x_outer: None,
        measure_inner: rational::max(&(&bm - sup_total), &Rational::zero()),
        measure_outer: &bm - sub_max,
        base_measure: bm,
        depth_used: depth,
        gaps_used: used,
        tail_caveat,
        periodic: true,
    })
}

// ---------------------------------------------------------------------------
// Full report and λ-scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestingReport {
    pub bound: BoundReport,
    pub oracle: OracleReport,
}

/// Certificate, bound and both oracles for one pair.
pub fn nest(k: &CantorSpec, gc: &GapCantor, depth: u32, budget: &GapBudget, r: &DirectedRounding) -> Result<NestingReport> {
    let cert = k.ck_certificate(r)?;
    Ok(NestingReport {
        bound: theo1_lower_bound(k, &cert, gc, budget, r)?,
        oracle: x_inner_outer(k, gc, depth, budget)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(with = "rational::serde_str")]
    pub lambda: Rational,
    #[serde(with = "rational::serde_opt")]
    pub theo1_bound: Option<Rational>,
    #[serde(with = "rational::serde_str")]
    pub theo1_bound_upper: Rational,
    pub verdict: Verdict,
    #[serde(with = "rational::serde_opt")]
    pub measure_inner: Option<Rational>,
    #[serde(with = "rational::serde_opt")]
    pub measure_outer: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaScan {
    pub rows: Vec<ScanRow>,
    /// Largest grid value with a positive lower bound.
    #[serde(with = "rational::serde_opt")]
    pub largest_positive: Option<Rational>,
}

/// Geometric grid `ratio^first, ..., ratio^last`.
pub fn geometric_grid(ratio: &Rational, first: u32, last: u32) -> Vec<Rational> {
    (first..=last)
        .map(|m| num_traits::pow::Pow::pow(ratio, m as i32))
        .collect()
}

/// Evaluates the bound for `λK` over a grid, `K` first rescaled to diameter 1.
/// With `depth` set, both oracles are run at each grid point as well.
pub fn lambda_scan(
    k: &CantorSpec,
    gc: &GapCantor,
    grid: &[Rational],
    depth: Option<u32>,
    budget: &GapBudget,
    r: &DirectedRounding,
) -> Result<LambdaScan> {
    if grid.is_empty() {
        return Err(Error::InvalidParam("empty λ grid".into()));
    }
    let diam = k.diam();
    if !diam.is_positive() {
        return Err(Error::InvalidParam("K must have positive diameter".into()));
    }
    let unit = k.scaled(&diam.recip())?;
    let cert = unit.ck_certificate(r)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut largest: Option<Rational> = None;
    for lambda in grid {
        let kl = unit.scaled(lambda)?;
        let cl = cert.rescale(lambda, r)?;
        let b = theo1_lower_bound(&kl, &cl, gc, budget, r)?;
        if b.theo1_bound.as_ref().map_or(false, |x| x.is_positive())
            && largest.as_ref().map_or(true, |l| lambda > l)
        {
            largest = Some(lambda.clone());
        }
        let (mi, mo) = match depth {
            Some(d) => {
                let o = x_inner_outer(&kl, gc, d, budget)?;
                (Some(o.measure_inner), Some(o.measure_outer))
            }
            None => (None, None),
        };
        rows.push(ScanRow {
            lambda: lambda.clone(),
            theo1_bound: b.theo1_bound,
            theo1_bound_upper: b.theo1_bound_upper,
            verdict: b.verdict,
            measure_inner: mi,
            measure_outer: mo,
        });
    }
    Ok(LambdaScan {
        rows,
        largest_positive: largest,
    })
}

// ---------------------------------------------------------------------------
// Measure of I − K
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalCase {
    Small,
    Large,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCheck {
    /// `Leb(I − cover)`, at least `Leb(I − K)`.
    #[serde(with = "rational::serde_str")]
    pub measured: Rational,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub case: IntervalCase,
}

/// `Leb(I − K) <= 2 C_K (Leb I)^(1-d)` when `Leb I <= diam K`, and
/// `Leb(I − K) <= Leb I + diam K` always; returns the measured side and the
/// bound for the applicable case.
pub fn interval_minus_cantor_bound_check(
    i: &Interval,
    k: &CantorSpec,
    cert: &FuzzyMeasureCert,
    depth: u32,
    r: &DirectedRounding,
) -> Result<IntervalCheck> {
    let cover = k.cover(depth, DEFAULT_PART_BUDGET)?;
    let measured = minkowski_diff(&IntervalUnion::single(i.clone()), &cover).measure();
    let len = i.length();
    let diam = k.diam();
    let (bound, case) = if len <= diam && len.is_positive() {
        let one_minus_d = Enclosure::point(Rational::one()).sub(&cert.d);
        let pw = r.bound(&r.pow_enc(&len, &one_minus_d)?, Side::Upper)?;
        (r.up(&(int(2) * &cert.ck_upper * pw)), IntervalCase::Small)
    } else {
        (&len + &diam, IntervalCase::Large)
    };
    Ok(IntervalCheck { measured, bound, case })
}

/// Number of gaps a budget selects, without expanding lattice levels.
pub fn budget_count(gc: &GapCantor, budget: &GapBudget) -> Result<BigUint> {
    Ok(histogram(gc, budget)?.into_iter().map(|(_, c)| c).sum())
}

/// Cheap sanity bound used by reports: the union bound `Σ (l + diam K)` on
/// `Leb(base ∖ x_inner)`.
pub fn union_bound(gc: &GapCantor, k: &CantorSpec, budget: &GapBudget) -> Result<Rational> {
    let d = k.diam();
    Ok(histogram(gc, budget)?
        .into_iter()
        .map(|(l, c)| big(&c) * (l + &d))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{counterexample_kp, even_decimal_set, middle_gap};
    use crate::rational::{pow2, rat};
    use proptest::prelude::*;

    fn union_k(parts: &[(i64, i64, i64)]) -> CantorSpec {
        CantorSpec::union(normalize(
            parts.iter().map(|&(a, b, d)| Interval::closed(rat(a, d), rat(b, d))).collect(),
        ))
        .unwrap()
    }

    fn exact() -> DirectedRounding {
        DirectedRounding::default()
    }

    #[test]
    fn bound_with_no_gaps_is_the_diameter_slack() {
        let r = DirectedRounding::exact();
        let k = union_k(&[(0, 1, 10)]);
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(1)), vec![], "t").unwrap();
        let cert = k.ck_certificate(&r).unwrap();
        let b = theo1_lower_bound(&k, &cert, &gc, &GapBudget::All, &r).unwrap();
        assert_eq!(b.theo1_bound, Some(rat(9, 10)));
        assert_eq!(b.verdict, Verdict::CertifiedPositive);
    }

    #[test]
    fn only_big_gaps_fire() {
        let k = union_k(&[(0, 1, 2)]);
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(10)), vec![Interval::open(int(4), int(5))], "t")
            .unwrap();
        let r = DirectedRounding::exact();
        let cert = k.ck_certificate(&r).unwrap();
        let b = theo1_lower_bound(&k, &cert, &gc, &GapBudget::All, &r).unwrap();
        assert_eq!(b.big_gap_sum, rat(3, 2));
        assert_eq!(b.theo1_bound, Some(int(8)));
    }

    #[test]
    fn interval_k_complement_example() {
        let cover = IntervalUnion::single(Interval::closed(int(0), rat(1, 2)));
        let base = Interval::closed(int(0), rat(7, 2));
        let c = admissible_complement(&[Interval::open(int(1), int(2))], &cover, &base);
        assert_eq!(c.parts(), &[Interval::open(rat(1, 2), int(2))]);
        assert!(admissible_complement(&[], &cover, &base).is_empty());
    }

    #[test]
    fn middle_thirds_cover_against_one_gap() {
        let k = CantorSpec::Digit(DigitCantorSpec::new(3, &[0, 2]).unwrap());
        let cover = k.cover(2, DEFAULT_PART_BUDGET).unwrap();
        let c = admissible_complement(&[Interval::open(int(1), int(2))], &cover, &Interval::closed(int(-5), int(5)));
        let brute: IntervalUnion = cover.parts().iter().map(|p| Interval::open(int(1), int(2)).minus(p)).collect();
        assert_eq!(c, brute);
        assert_eq!(c.parts(), &[Interval::open(int(0), int(2))]);
    }

    #[test]
    fn interval_k_is_exact() {
        let k = union_k(&[(0, 1, 2)]);
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(4)), vec![Interval::open(int(1), int(2))], "t")
            .unwrap();
        let o = x_inner_outer(&k, &gc, 0, &GapBudget::All).unwrap();
        assert_eq!(o.x_inner, o.x_outer);
        assert_eq!(o.measure_inner, int(2));
        let none = x_inner_outer(&k, &gc, 0, &GapBudget::Count(0)).unwrap();
        assert_eq!(none.x_outer.unwrap().parts(), &[Interval::closed(int(0), rat(7, 2))]);
    }

    #[test]
    fn oversized_k_has_empty_base() {
        let k = union_k(&[(0, 5, 1)]);
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(4)), vec![], "t").unwrap();
        let o = x_inner_outer(&k, &gc, 0, &GapBudget::All).unwrap();
        assert!(o.base.is_none());
        assert!(o.measure_outer.is_zero());
    }

    #[test]
    fn cp_sum_of_lengths_is_one_with_tail() {
        let gc = middle_gap(&rat(1, 2), 6).unwrap();
        let rep = cp_partial_sum(&gc, &int(1), &GapBudget::All, &exact()).unwrap();
        let enumerated = &rep.partial_sums[rep.partial_sums.len() - 2];
        assert_eq!(enumerated.sum, Rational::one() - pow2(-6));
        assert_eq!(rep.partial_sums.last().unwrap().sum, Rational::one());
        assert_eq!(rep.verdict, CpVerdict::ConvergingEvidence);
        let p35 = cp_partial_sum(&gc, &rat(3, 5), &GapBudget::All, &exact()).unwrap();
        assert_eq!(p35.verdict, CpVerdict::ConvergingEvidence);
        let sums: Vec<_> = p35.partial_sums.iter().map(|s| s.sum.clone()).collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
        // Without the tail, per-level terms shrink by 2^(-1/5): still converging.
        let trunc = cp_partial_sum(&gc, &rat(3, 5), &GapBudget::Level(6), &exact()).unwrap();
        assert_eq!(trunc.verdict, CpVerdict::ConvergingEvidence);
        let diverge = cp_partial_sum(&gc, &rat(2, 5), &GapBudget::All, &exact()).unwrap();
        assert_eq!(diverge.verdict, CpVerdict::DivergingEvidence);
    }

    #[test]
    fn cp_of_empty_list_is_zero() {
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(1)), vec![], "t").unwrap();
        let rep = cp_partial_sum(&gc, &rat(1, 2), &GapBudget::All, &exact()).unwrap();
        assert!(rep.partial_sums.is_empty());
    }

    #[test]
    fn finite_gap_set_has_exponent_zero() {
        let gc = GapCantor::from_gaps(Interval::closed(int(0), int(1)), vec![Interval::open(rat(1, 3), rat(2, 3))], "t")
            .unwrap();
        let e = estimate_p(&gc, &GapBudget::All, &exact()).unwrap();
        assert_eq!(e.p_hat, Some(Enclosure::point(Rational::zero())));
        let few = middle_gap(&rat(1, 2), 4).unwrap();
        assert!(estimate_p(&few, &GapBudget::All, &exact()).unwrap().p_hat.is_none());
    }

    #[test]
    fn exponent_of_middle_gap_set() {
        let gc = middle_gap(&rat(1, 3), 12).unwrap();
        let e = estimate_p(&gc, &GapBudget::All, &exact()).unwrap().p_hat.unwrap();
        assert!(e.contains(&rat(1, 3)), "{:?}", e.to_f64());
    }

    #[test]
    fn residues_match_brute_force() {
        let spec = even_decimal_set();
        for (depth, i) in [(3u32, 2u32), (4, 2), (5, 3), (4, 4)] {
            let period = rational::powi(10, -(i as i64));
            let (res, len) = residue_cover(&spec, depth, &period).unwrap();
            let brute: BTreeSet<Rational> = spec
                .cylinders(depth, DEFAULT_PART_BUDGET)
                .unwrap()
                .iter()
                .map(|c| rem(&c.lo, &period))
                .collect();
            assert_eq!(res, brute.into_iter().collect::<Vec<_>>());
            assert_eq!(len, spec.part_length(depth));
        }
    }

    #[test]
    fn periodic_path_agrees_up_to_lattice_ends() {
        let k = CantorSpec::Digit(even_decimal_set());
        let gc = counterexample_kp(&rat(7, 10), 2, 2).unwrap();
        for depth in [1, 2, 3] {
            let fast = x_inner_outer(&k, &gc, depth, &GapBudget::All).unwrap();
            assert!(fast.periodic);
            let mut explicit = gc.clone();
            explicit.levels = vec![crate::cantor::GapLevel {
                level: 2,
                gaps: gc.all_gaps().unwrap(),
            }];
            explicit.lattice.clear();
            let slow = x_inner_outer(&k, &explicit, depth, &GapBudget::All).unwrap();
            // Only the partial periods at either end of the lattice differ.
            let slack = rat(2, 100);
            assert!(fast.measure_inner <= slow.measure_inner, "depth {depth}");
            assert!(fast.measure_outer >= slow.measure_outer, "depth {depth}");
            assert!(&slow.measure_inner - &fast.measure_inner <= slack, "depth {depth}");
            assert!(&fast.measure_outer - &slow.measure_outer <= slack, "depth {depth}");
        }
    }

    #[test]
    fn periodic_path_brackets_two_levels() {
        let k = CantorSpec::Digit(even_decimal_set());
        let gc = counterexample_kp(&rat(3, 5), 1, 2).unwrap();
        let fast = x_inner_outer(&k, &gc, 3, &GapBudget::All).unwrap();
        let mut explicit = gc.clone();
        explicit.levels = vec![crate::cantor::GapLevel {
            level: 1,
            gaps: gc.all_gaps().unwrap(),
        }];
        explicit.lattice.clear();
        let slow = x_inner_outer(&k, &explicit, 3, &GapBudget::All).unwrap();
        assert!(fast.measure_inner <= slow.measure_inner);
        assert!(fast.measure_outer >= slow.measure_outer);
    }

    #[test]
    fn prop43_examples() {
        let r = exact();
        let k = union_k(&[(0, 1, 2)]);
        let cert = k.ck_certificate(&r).unwrap();
        let c = interval_minus_cantor_bound_check(&Interval::closed(int(-1), int(0)), &k, &cert, 0, &r).unwrap();
        assert_eq!(c.measured, rat(3, 2));
        assert_eq!(c.measured, c.bound);
        assert_eq!(c.case, IntervalCase::Large);
        let mt = CantorSpec::Digit(DigitCantorSpec::new(3, &[0, 2]).unwrap());
        let cert = mt.ck_certificate(&r).unwrap();
        let c = interval_minus_cantor_bound_check(&Interval::closed(int(0), rat(1, 9)), &mt, &cert, 2, &r).unwrap();
        assert_eq!(c.measured, rat(8, 9));
        assert_eq!(c.case, IntervalCase::Small);
        assert!(c.measured <= c.bound);
        let pts: Vec<_> = (2..8)
            .map(|d| {
                interval_minus_cantor_bound_check(&Interval::point(int(0)), &mt, &cert, d, &r)
                    .unwrap()
                    .measured
            })
            .collect();
        assert!(pts.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn scan_finds_positive_scale_for_quarter_dimension() {
        let k = CantorSpec::Digit(DigitCantorSpec::new(16, &[0, 8]).unwrap());
        let gc = middle_gap(&rat(1, 2), 8).unwrap();
        let grid = geometric_grid(&rat(1, 2), 1, 12);
        let s = lambda_scan(&k, &gc, &grid, None, &GapBudget::All, &exact()).unwrap();
        let lmax = s.largest_positive.clone().expect("some λ works");
        for row in &s.rows {
            let pos = row.theo1_bound.as_ref().map_or(false, |b| b.is_positive());
            assert_eq!(pos, row.lambda <= lmax, "λ = {}", row.lambda);
        }
        assert!(lambda_scan(&k, &gc, &[], None, &GapBudget::All, &exact()).is_err());
        let huge = lambda_scan(&k, &gc, &[int(4)], None, &GapBudget::All, &exact()).unwrap();
        assert!(huge.rows[0].theo1_bound.as_ref().unwrap().is_negative());
    }

    #[test]
    fn lambda_one_is_a_violation() {
        let k = CantorSpec::Digit(DigitCantorSpec::new(16, &[0, 8]).unwrap());
        let gc = middle_gap(&rat(1, 2), 10).unwrap();
        let rep = nest(&k, &gc, 2, &GapBudget::All, &exact()).unwrap();
        assert_eq!(rep.bound.verdict, Verdict::CertifiedViolation);
    }

    #[test]
    fn intersection_is_no_worse() {
        let a = middle_gap(&rat(1, 2), 5).unwrap();
        let b = GapCantor::from_gaps(a.ambient.clone(), vec![Interval::open(rat(-1, 3), rat(1, 7))], "t").unwrap();
        let (lhs, rhs) = intersection_closure_check(&a, &b, &rat(3, 5), &exact()).unwrap();
        assert!(lhs <= rhs);
    }

    fn arb_instance() -> impl Strategy<Value = (CantorSpec, GapCantor)> {
        let part = (0i64..40, 1i64..6);
        let k = proptest::collection::vec(part, 1..4).prop_map(|v| {
            CantorSpec::union(normalize(
                v.into_iter().map(|(a, l)| Interval::closed(rat(a, 40), rat(a + l, 40))).collect(),
            ))
            .unwrap()
        });
        let gap = (1i64..199, 1i64..10);
        let gaps = proptest::collection::vec(gap, 0..12).prop_map(|v| {
            let gs = v
                .into_iter()
                .map(|(a, l)| Interval::open(rat(a, 50), rat((a + l).min(199), 50)))
                .filter(|g| g.lo < g.hi)
                .collect();
            GapCantor::from_gaps(Interval::closed(int(0), int(4)), gs, "t").unwrap()
        });
        (k, gaps)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn union_k_matches_pointwise_containment((k, gc) in arb_instance(), t_num in 0i64..400) {
            let o = x_inner_outer(&k, &gc, 0, &GapBudget::All).unwrap();
            let base = o.base.clone().unwrap();
            let t = rat(t_num, 100);
            if base.contains(&t) {
                let translated = match &k { CantorSpec::Union { set } => set.translate(&t), _ => unreachable!() };
                let kt = gc.complement_prefix(&GapBudget::All).unwrap();
                prop_assert_eq!(translated.is_subset(&kt), o.x_inner.as_ref().unwrap().contains(&t));
            }
        }

        #[test]
        fn theorem_bound_below_outer_measure((k, gc) in arb_instance()) {
            let r = DirectedRounding::default();
            let rep = nest(&k, &gc, 0, &GapBudget::All, &r).unwrap();
            if let Some(b) = &rep.bound.theo1_bound {
                if b.is_positive() {
                    prop_assert!(b <= &rep.oracle.measure_outer);
                }
            }
        }

        #[test]
        fn sandwich_and_union_bound((k, gc) in arb_instance()) {
            let o = x_inner_outer(&k, &gc, 0, &GapBudget::All).unwrap();
            let (xi, xo) = (o.x_inner.unwrap(), o.x_outer.unwrap());
            prop_assert!(xi.is_subset(&xo));
            let lost = &o.base_measure - xo.measure();
            prop_assert!(lost <= union_bound(&gc, &k, &GapBudget::All).unwrap());
        }
    }

    #[test]
    fn digit_k_oracles_are_monotone() {
        let k = CantorSpec::Digit(DigitCantorSpec::new(4, &[0, 2]).unwrap().scaled(&pow2(-6)).unwrap());
        let gc = middle_gap(&rat(1, 2), 6).unwrap();
        let mut prev_inner: Option<IntervalUnion> = None;
        for depth in 0..5 {
            let o = x_inner_outer(&k, &gc, depth, &GapBudget::All).unwrap();
            let xi = o.x_inner.unwrap();
            if let Some(p) = &prev_inner {
                assert!(p.is_subset(&xi));
            }
            prev_inner = Some(xi);
        }
        let mut prev_outer: Option<IntervalUnion> = None;
        for level in 0..7 {
            let o = x_inner_outer(&k, &gc, 3, &GapBudget::Level(level)).unwrap();
            let xo = o.x_outer.unwrap();
            if let Some(p) = &prev_outer {
                assert!(xo.is_subset(p));
            }
            prev_outer = Some(xo);
        }
        assert!(prev_inner.unwrap().measure().is_positive());
    }
}
