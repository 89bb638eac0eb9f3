//! The two roles a Cantor set plays: `K` given generatively (digit expansion
//! or a finite union) with covers and dimension data, and `K̃` given as an
//! ambient interval minus an enumerable list of open gaps.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{self, min_cover_count, normalize, Interval, IntervalUnion};
use crate::rational::{self, int, powi, Rational};
use crate::rounding::{self, DirectedRounding, Enclosure, Side};

/// Upper limit on the number of intervals any routine materializes.
pub const DEFAULT_PART_BUDGET: u64 = 1 << 22;

/// `{ translate + scale * Σ d_i base^-i : d_i ∈ digits }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitCantorSpec {
    pub base: u32,
    pub digits: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    pub translate: Rational,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverApprox {
    pub depth: u32,
    pub cover: IntervalUnion,
}

/// `log|J| / log b`, exact when `|J|^s = b^r` for small integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub card: u32,
    pub base: u32,
    #[serde(with = "rational::serde_opt")]
    pub exact: Option<Rational>,
    pub enclosure: Enclosure,
    pub degenerate: bool,
}

/// Certified bracket `[ck_lower, ck_upper]` around the box fuzzy measure
/// `C_K = sup_ε inf N ε^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzyMeasureCert {
    pub d: Enclosure,
    #[serde(with = "rational::serde_str")]
    pub ck_lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub ck_upper: Rational,
    #[serde(with = "rational::serde_vec")]
    pub scales_examined: Vec<Rational>,
}

impl FuzzyMeasureCert {
    /// Certificate for `λK`: both ends multiplied by `λ^d`.
    pub fn rescale(&self, lambda: &Rational, r: &DirectedRounding) -> Result<FuzzyMeasureCert> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParam("scale factor must be positive".into()));
        }
        let ld = r.pow_enc(lambda, &self.d)?;
        Ok(FuzzyMeasureCert {
            d: self.d.clone(),
            ck_lower: r.down(&(&self.ck_lower * &ld.lo)),
            ck_upper: r.up(&(&self.ck_upper * &ld.hi)),
            scales_examined: self.scales_examined.iter().map(|s| s * lambda).collect(),
        })
    }
}

impl DigitCantorSpec {
    pub fn new(base: u32, digits: &[u32]) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidParam("base must be at least 2".into()));
        }
        let mut ds = digits.to_vec();
        ds.sort_unstable();
        ds.dedup();
        if ds.is_empty() {
            return Err(Error::InvalidParam("digit set is empty".into()));
        }
        if ds.iter().any(|&d| d >= base) {
            return Err(Error::InvalidParam(format!("digits must lie in 0..{base}")));
        }
        if ds.len() == base as usize {
            return Err(Error::InvalidParam(
                "all digits present: the set is an interval, not a Cantor set".into(),
            ));
        }
        Ok(DigitCantorSpec {
            base,
            digits: ds,
            translate: Rational::zero(),
            scale: Rational::one(),
        })
    }

    /// `λ·K` (also scales the translation).
    pub fn scaled(&self, lambda: &Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParam("scale factor must be positive".into()));
        }
        Ok(DigitCantorSpec {
            translate: &self.translate * lambda,
            scale: &self.scale * lambda,
            ..self.clone()
        })
    }

    pub fn translated(&self, t: &Rational) -> Self {
        DigitCantorSpec {
            translate: &self.translate + t,
            ..self.clone()
        }
    }

    fn bm1(&self) -> Rational {
        int(self.base as i64 - 1)
    }

    fn min_digit(&self) -> u32 {
        self.digits[0]
    }

    fn max_digit(&self) -> u32 {
        *self.digits.last().unwrap()
    }

    pub fn min_point(&self) -> Rational {
        &self.translate + &self.scale * int(self.min_digit()) / self.bm1()
    }

    pub fn max_point(&self) -> Rational {
        &self.translate + &self.scale * int(self.max_digit()) / self.bm1()
    }

    pub fn diam(&self) -> Rational {
        &self.scale * int(self.max_digit() - self.min_digit()) / self.bm1()
    }

    pub fn hull(&self) -> Interval {
        Interval::closed(self.min_point(), self.max_point())
    }

    /// Length of each depth-`n` cover part.
    pub fn part_length(&self, n: u32) -> Rational {
        self.diam() * powi(self.base as i64, -(n as i64))
    }

    pub fn part_count(&self, n: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.digits.len()), n as usize)
    }

    fn check_budget(&self, n: u32, budget: u64) -> Result<()> {
        if self.part_count(n) > BigUint::from(budget) {
            return Err(Error::Budget(format!(
                "{}^{} cover parts exceed the part budget {}",
                self.digits.len(),
                n,
                budget
            )));
        }
        Ok(())
    }

    /// Integer prefix values `Σ d_i b^(n-i)` in increasing order.
    fn prefixes(&self, n: u32) -> Vec<BigInt> {
        let b = BigInt::from(self.base);
        let mut vals = vec![BigInt::zero()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(vals.len() * self.digits.len());
            for v in &vals {
                for &d in &self.digits {
                    next.push(v * &b + d);
                }
            }
            vals = next;
        }
        vals
    }

    /// The depth-`n` cylinder hulls, one per digit prefix, left to right.
    pub fn cylinders(&self, n: u32, budget: u64) -> Result<Vec<Interval>> {
        self.check_budget(n, budget)?;
        let den = powi(self.base as i64, n as i64) * self.bm1();
        let (dmin, dmax) = (int(self.min_digit()), int(self.max_digit()));
        let bm1 = self.bm1();
        Ok(self
            .prefixes(n)
            .into_iter()
            .map(|v| {
                let v = Rational::from_integer(v) * &bm1;
                let lo = &self.translate + &self.scale * (&v + &dmin) / &den;
                let hi = &self.translate + &self.scale * (&v + &dmax) / &den;
                Interval::closed(lo, hi)
            })
            .collect())
    }

    /// Outer cover at depth `n`: the union of the depth-`n` cylinder hulls.
    /// Depth 0 is the convex hull.
    pub fn cover(&self, n: u32) -> Result<CoverApprox> {
        self.cover_with_budget(n, DEFAULT_PART_BUDGET)
    }

    pub fn cover_with_budget(&self, n: u32, budget: u64) -> Result<CoverApprox> {
        Ok(CoverApprox {
            depth: n,
            cover: normalize(self.cylinders(n, budget)?),
        })
    }

    /// Cylinder endpoints at depth `n`; each is a point of the set.
    pub fn hull_points(&self, n: u32, budget: u64) -> Result<IntervalUnion> {
        let mut pts = Vec::new();
        for c in self.cylinders(n, budget)? {
            pts.push(Interval::point(c.lo.clone()));
            pts.push(Interval::point(c.hi));
        }
        Ok(normalize(pts))
    }

    pub fn dimension(&self, bits: u32) -> Dimension {
        dimension(self.digits.len() as u32, self.base, bits)
    }
}

/// `log card / log base`.
pub fn dimension(card: u32, base: u32, bits: u32) -> Dimension {
    if card <= 1 {
        return Dimension {
            card,
            base,
            exact: Some(Rational::zero()),
            enclosure: Enclosure::point(Rational::zero()),
            degenerate: true,
        };
    }
    let exact = exact_log_ratio(card, base);
    let enclosure = match &exact {
        Some(q) => Enclosure::point(q.clone()),
        None => rounding::log_ratio(&int(card), &int(base), bits),
    };
    Dimension {
        card,
        base,
        exact,
        enclosure,
        degenerate: false,
    }
}

/// `r/s` with `card^s = base^r`, searched over small `s`.
fn exact_log_ratio(card: u32, base: u32) -> Option<Rational> {
    let (c, b) = (BigUint::from(card), BigUint::from(base));
    for s in 1..=32u32 {
        let target = num_traits::pow(c.clone(), s as usize);
        let mut p = BigUint::one();
        let mut r = 0i64;
        while p < target {
            p *= &b;
            r += 1;
        }
        if p == target {
            return Some(rational::rat(r, s as i64));
        }
    }
    None
}

/// `K` in the nesting problem: a digit Cantor set or a finite union of
/// intervals (for which every approximation below is exact).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CantorSpec {
    Digit(DigitCantorSpec),
    Union { set: IntervalUnion },
}

impl CantorSpec {
    pub fn union(u: IntervalUnion) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InvalidParam("empty set".into()));
        }
        Ok(CantorSpec::Union { set: u })
    }

    pub fn hull(&self) -> Interval {
        match self {
            CantorSpec::Digit(s) => s.hull(),
            CantorSpec::Union { set } => set.hull().unwrap().closure(),
        }
    }

    pub fn min_point(&self) -> Rational {
        self.hull().lo
    }

    pub fn max_point(&self) -> Rational {
        self.hull().hi
    }

    pub fn diam(&self) -> Rational {
        self.hull().length()
    }

    /// Outer cover (`⊇ K`).
    pub fn cover(&self, depth: u32, budget: u64) -> Result<IntervalUnion> {
        match self {
            CantorSpec::Digit(s) => Ok(s.cover_with_budget(depth, budget)?.cover),
            CantorSpec::Union { set } => Ok(set.clone()),
        }
    }

    /// A set known to lie inside `K`.
    pub fn kernel(&self, depth: u32, budget: u64) -> Result<IntervalUnion> {
        match self {
            CantorSpec::Digit(s) => s.hull_points(depth, budget),
            CantorSpec::Union { set } => Ok(set.clone()),
        }
    }

    pub fn scaled(&self, lambda: &Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParam("scale factor must be positive".into()));
        }
        Ok(match self {
            CantorSpec::Digit(s) => CantorSpec::Digit(s.scaled(lambda)?),
            CantorSpec::Union { set } => CantorSpec::Union {
                set: set.scale(lambda),
            },
        })
    }

    pub fn dimension(&self, bits: u32) -> Enclosure {
        match self {
            CantorSpec::Digit(s) => s.dimension(bits).enclosure,
            CantorSpec::Union { set } => {
                if set.measure().is_positive() {
                    Enclosure::point(Rational::one())
                } else {
                    Enclosure::point(Rational::zero())
                }
            }
        }
    }

    pub fn ck_certificate(&self, r: &DirectedRounding) -> Result<FuzzyMeasureCert> {
        match self {
            CantorSpec::Digit(s) => ck_upper_bound(s, r),
            CantorSpec::Union { set } => Ok(union_ck(set)),
        }
    }
}

/// For a finite union with `m` parts and hull length `D`, `N(ε)ε` lies between
/// the measure and `measure + m·D`; for finitely many points `N(ε) <= m`.
fn union_ck(set: &IntervalUnion) -> FuzzyMeasureCert {
    let m = int(set.len() as i64);
    let mu = set.measure();
    let diam = set.hull().unwrap().length();
    if mu.is_positive() {
        FuzzyMeasureCert {
            d: Enclosure::point(Rational::one()),
            ck_upper: &mu + &m * &diam,
            ck_lower: mu,
            scales_examined: vec![],
        }
    } else {
        FuzzyMeasureCert {
            d: Enclosure::point(Rational::zero()),
            ck_lower: Rational::one(),
            ck_upper: m,
            scales_examined: vec![],
        }
    }
}

/// Deepest construction level examined for the lower certificate.
const CK_LOWER_LEVELS: u32 = 6;

/// Certified bracket for `C_K` of a digit Cantor set.
///
/// Upper: for `ε` in `[D b^-(k+1), D b^-k]`, `K` splits into `|J|^k` copies of
/// `b^-k K`, each covered by the `N_1` intervals that cover `K` at scale
/// `D/b`, so `N(ε) ε^d <= |J|^k N_1 (D b^-k)^d = N_1 D^d`.
///
/// Lower: any cover of `K` covers the cylinder endpoints, so the greedy count
/// of those points times `ε^d` is a lower bound at each examined `ε`.
pub fn ck_upper_bound(spec: &DigitCantorSpec, r: &DirectedRounding) -> Result<FuzzyMeasureCert> {
    let dim = spec.dimension(r.work_bits());
    let diam = spec.diam();
    let d = dim.enclosure.clone();
    if dim.degenerate || diam.is_zero() {
        return Ok(FuzzyMeasureCert {
            d,
            ck_lower: Rational::one(),
            ck_upper: Rational::one(),
            scales_examined: vec![],
        });
    }
    let b = int(spec.base as i64);
    let n1 = min_cover_count(&spec.cover(1)?.cover, &(&diam / &b))?;
    let dd = r.pow_enc(&diam, &d)?;
    let ck_upper = r.up(&(int(n1 as i64) * &dd.hi));

    let levels = CK_LOWER_LEVELS.min(levels_within_budget(spec, DEFAULT_PART_BUDGET / 4));
    let points = spec.hull_points(levels, DEFAULT_PART_BUDGET)?;
    let shrink = Rational::one() - rational::pow2(-16);
    let mut scales = Vec::new();
    let mut ck_lower = Rational::zero();
    for k in 0..levels {
        let base_eps = &diam * powi(spec.base as i64, -(k as i64));
        for eps in [base_eps.clone(), &base_eps * &shrink] {
            let n = min_cover_count(&points, &eps)?;
            let v = r.bound(&r.pow_enc(&eps, &d)?, Side::Lower)? * int(n as i64);
            if v > ck_lower {
                ck_lower = v;
            }
            scales.push(eps);
        }
    }
    let ck_lower = r.down(&ck_lower);
    debug_assert!(ck_lower <= ck_upper);
    Ok(FuzzyMeasureCert {
        d,
        ck_lower,
        ck_upper,
        scales_examined: scales,
    })
}

fn levels_within_budget(spec: &DigitCantorSpec, budget: u64) -> u32 {
    let mut n = 0;
    while spec.part_count(n + 1) <= BigUint::from(budget) && n < 64 {
        n += 1;
    }
    n
}

/// Least-squares slope of `log N(ε)` against `-log ε` (empirical only).
pub fn box_regression(set: &IntervalUnion, scales: &[Rational]) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for eps in scales {
        let n = min_cover_count(set, eps)?;
        xs.push(-rational::to_f64(eps).ln());
        ys.push((n as f64).ln());
    }
    let m = xs.len() as f64;
    if xs.len() < 2 {
        return Err(Error::InvalidParam("need at least two scales".into()));
    }
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Provenance carried with every gap set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GapMeta {
    pub construction: String,
    #[serde(default)]
    pub params: serde_json::Value,
    /// The gap list is all of `K̃`'s gaps, not a truncation.
    #[serde(default)]
    pub complete: bool,
    /// Longest gap that the truncation may have left out.
    #[serde(default, with = "rational::serde_opt", skip_serializing_if = "Option::is_none")]
    pub max_missing_length: Option<Rational>,
    /// Measure of the region left unexplored by a symbolic budget.
    #[serde(default, with = "rational::serde_opt", skip_serializing_if = "Option::is_none")]
    pub unresolved_measure: Option<Rational>,
    /// When only a prefix of the gaps is held explicitly: the last level held.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub materialized_through: Option<u32>,
}

/// Gaps emitted by one construction level, left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapLevel {
    pub level: u32,
    pub gaps: Vec<Interval>,
}

/// A level whose gaps form an arithmetic progression of translates of one
/// pattern: `start + k·step + pattern` for `k < count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLevel {
    pub level: u32,
    #[serde(with = "rational::serde_str")]
    pub start: Rational,
    #[serde(with = "rational::serde_str")]
    pub step: Rational,
    #[serde(with = "rational::serde_uint")]
    pub count: BigUint,
    pub pattern: Interval,
}

impl LatticeLevel {
    pub fn gap(&self, k: &BigUint) -> Interval {
        let off = &self.start + &self.step * Rational::from_integer(BigInt::from(k.clone()));
        self.pattern.translate(&off)
    }
}

/// Closed-form remainder beyond the enumerated levels: level `first + k`
/// has `count0·count_ratio^k` gaps of length `len0·len_ratio^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricTail {
    pub first_level: u32,
    #[serde(with = "rational::serde_str")]
    pub count0: Rational,
    #[serde(with = "rational::serde_str")]
    pub count_ratio: Rational,
    #[serde(with = "rational::serde_str")]
    pub len0: Rational,
    #[serde(with = "rational::serde_str")]
    pub len_ratio: Rational,
}

impl GeometricTail {
    /// Upper bound of `Σ count·len^p` over the whole tail, or `None` if the
    /// series diverges at this exponent.
    pub fn power_sum_upper(&self, p: &Enclosure, r: &DirectedRounding) -> Result<Option<Rational>> {
        let rl = r.pow_enc(&self.len_ratio, p)?;
        let ratio = &self.count_ratio * &rl.hi;
        if ratio >= Rational::one() {
            return Ok(None);
        }
        let l0 = r.pow_enc(&self.len0, p)?;
        Ok(Some(r.up(&(&self.count0 * &l0.hi / (Rational::one() - ratio)))))
    }

    pub fn power_sum_lower(&self, p: &Enclosure, r: &DirectedRounding) -> Result<Rational> {
        let rl = r.pow_enc(&self.len_ratio, p)?;
        let ratio = &self.count_ratio * &rl.lo;
        let l0 = r.pow_enc(&self.len0, p)?;
        if ratio >= Rational::one() {
            return Ok(&self.count0 * &l0.lo);
        }
        Ok(r.down(&(&self.count0 * &l0.lo / (Rational::one() - ratio))))
    }

    fn scale(&self, lambda: &Rational) -> GeometricTail {
        GeometricTail {
            len0: &self.len0 * lambda,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistEntry {
    #[serde(with = "rational::serde_str")]
    pub length: Rational,
    #[serde(with = "rational::serde_uint")]
    pub count: BigUint,
}

/// Truncation policy for enumerating gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapBudget {
    All,
    Level(u32),
    MinLength(Rational),
    Count(usize),
}

/// `K̃ = ambient ∖ ⋃ gaps`, with gaps held as explicit intervals, as
/// lattice progressions, or (for very large symbolic constructions) as a
/// length histogram beside a materialized prefix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCantor {
    pub ambient: Interval,
    #[serde(default)]
    pub levels: Vec<GapLevel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lattice: Vec<LatticeLevel>,
    /// Multiset of all gap lengths when it differs from the materialized list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<HistEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<GeometricTail>,
    pub meta: GapMeta,
}

impl GapCantor {
    pub fn new(ambient: Interval, levels: Vec<GapLevel>, meta: GapMeta) -> Result<Self> {
        let gc = GapCantor {
            ambient,
            levels,
            lattice: vec![],
            histogram: None,
            tail: None,
            meta,
        };
        gc.validate()?;
        Ok(gc)
    }

    /// Explicit gap list, all on level 1.
    pub fn from_gaps(ambient: Interval, gaps: Vec<Interval>, construction: &str) -> Result<Self> {
        Self::new(
            ambient,
            vec![GapLevel { level: 1, gaps }],
            GapMeta {
                construction: construction.into(),
                complete: true,
                ..Default::default()
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        for g in self.levels.iter().flat_map(|l| &l.gaps) {
            if !self.ambient.contains_interval(g) {
                return Err(Error::Domain("gap outside the ambient interval".into()));
            }
        }
        Ok(())
    }

    pub fn diam(&self) -> Rational {
        self.ambient.length()
    }

    pub fn is_lattice(&self) -> bool {
        !self.lattice.is_empty()
    }

    /// Number of materialized explicit gaps.
    pub fn explicit_count(&self) -> usize {
        self.levels.iter().map(|l| l.gaps.len()).sum()
    }

    pub fn total_count(&self) -> BigUint {
        self.length_histogram()
            .iter()
            .map(|(_, c)| c.clone())
            .sum()
    }

    /// Deterministic prefix in level-major, left-to-right order.
    pub fn gaps_up_to(&self, budget: &GapBudget) -> Result<Vec<Interval>> {
        let mut out = Vec::new();
        let explicit = self.levels.iter().map(|l| (l.level, None, Some(&l.gaps)));
        let lattice = self.lattice.iter().map(|l| (l.level, Some(l), None));
        let mut all: Vec<_> = explicit.chain(lattice).collect();
        all.sort_by_key(|(lv, _, _)| *lv);
        for (level, lat, gaps) in all {
            if let GapBudget::Level(l) = budget {
                if level > *l {
                    break;
                }
            }
            let it: Box<dyn Iterator<Item = Interval>> = match (lat, gaps) {
                (_, Some(g)) => Box::new(g.iter().cloned()),
                (Some(l), _) => {
                    if l.count > BigUint::from(DEFAULT_PART_BUDGET) {
                        return Err(Error::Budget("lattice level exceeds the part budget".into()));
                    }
                    let n = l.count.to_u64().unwrap();
                    Box::new((0..n).map(move |k| l.gap(&BigUint::from(k))))
                }
                _ => unreachable!(),
            };
            for g in it {
                match budget {
                    GapBudget::Count(m) if out.len() >= *m => return Ok(out),
                    GapBudget::MinLength(ell) if &g.length() < ell => continue,
                    _ => out.push(g),
                }
            }
        }
        Ok(out)
    }

    pub fn all_gaps(&self) -> Result<Vec<Interval>> {
        self.gaps_up_to(&GapBudget::All)
    }

    /// `(length, multiplicity)` for every gap, sorted by decreasing length.
    pub fn length_histogram(&self) -> Vec<(Rational, BigUint)> {
        let mut m: BTreeMap<Rational, BigUint> = BTreeMap::new();
        if let Some(h) = &self.histogram {
            for e in h {
                *m.entry(e.length.clone()).or_default() += &e.count;
            }
        } else {
            for g in self.levels.iter().flat_map(|l| &l.gaps) {
                *m.entry(g.length()).or_default() += 1u32;
            }
        }
        for l in &self.lattice {
            *m.entry(l.pattern.length()).or_default() += &l.count;
        }
        m.into_iter().rev().collect()
    }

    pub fn set_histogram(&mut self, h: Vec<(Rational, BigUint)>) {
        self.histogram = Some(
            h.into_iter()
                .map(|(length, count)| HistEntry { length, count })
                .collect(),
        );
    }

    /// `ambient ∖ (first n gaps)`, normalized.
    pub fn complement_prefix(&self, budget: &GapBudget) -> Result<IntervalUnion> {
        let gaps = normalize(self.gaps_up_to(budget)?);
        interval::complement_in(&self.ambient, &gaps)
    }

    pub fn scaled(&self, lambda: &Rational) -> Result<GapCantor> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParam("scale factor must be positive".into()));
        }
        let mut out = GapCantor {
            ambient: self.ambient.scale(lambda),
            levels: self
                .levels
                .iter()
                .map(|l| GapLevel {
                    level: l.level,
                    gaps: l.gaps.iter().map(|g| g.scale(lambda)).collect(),
                })
                .collect(),
            lattice: self
                .lattice
                .iter()
                .map(|l| LatticeLevel {
                    start: &l.start * lambda,
                    step: &l.step * lambda,
                    pattern: l.pattern.scale(lambda),
                    ..l.clone()
                })
                .collect(),
            histogram: None,
            tail: self.tail.as_ref().map(|t| t.scale(lambda)),
            meta: GapMeta {
                max_missing_length: self.meta.max_missing_length.as_ref().map(|m| m * lambda),
                ..self.meta.clone()
            },
        };
        if self.histogram.is_some() {
            out.set_histogram(
                self.length_histogram()
                    .into_iter()
                    .map(|(l, c)| (l * lambda, c))
                    .collect(),
            );
        }
        Ok(out)
    }
}
