//! Intervals with open/closed endpoint tags and normalized finite unions.
//!
//! Measures ignore endpoint tags; every set operation respects them.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    /// Rejects `lo > hi` and degenerate intervals that are not closed points.
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        Self::try_new(lo, hi, lo_closed, hi_closed)
            .ok_or_else(|| Error::Domain("empty interval".into()))
    }

    /// `None` when the described set is empty.
    pub fn try_new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Option<Self> {
        match lo.cmp(&hi) {
            Ordering::Greater => None,
            Ordering::Equal if !(lo_closed && hi_closed) => None,
            _ => Some(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, true).expect("closed interval with lo > hi")
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, false, false).expect("empty open interval")
    }

    pub fn point(x: Rational) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_open(&self) -> bool {
        !self.lo_closed && !self.hi_closed
    }

    pub fn closure(&self) -> Interval {
        Interval::closed(self.lo.clone(), self.hi.clone())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        let lo_ok = match self.lo.cmp(&o.lo) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed || !o.lo_closed,
            Ordering::Greater => false,
        };
        let hi_ok = match self.hi.cmp(&o.hi) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed || !o.hi_closed,
            Ordering::Less => false,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let (lo, lc) = match self.lo.cmp(&o.lo) {
            Ordering::Less => (o.lo.clone(), o.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && o.lo_closed),
        };
        let (hi, hc) = match self.hi.cmp(&o.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (o.hi.clone(), o.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && o.hi_closed),
        };
        Interval::try_new(lo, hi, lc, hc)
    }

    pub fn translate(&self, t: &Rational) -> Interval {
        Interval {
            lo: &self.lo + t,
            hi: &self.hi + t,
            ..self.clone()
        }
    }

    /// Dilation by a nonzero rational; negative factors reflect.
    pub fn scale(&self, lambda: &Rational) -> Interval {
        assert!(!lambda.is_zero(), "scale by zero");
        if lambda.is_positive() {
            Interval {
                lo: &self.lo * lambda,
                hi: &self.hi * lambda,
                ..self.clone()
            }
        } else {
            Interval {
                lo: &self.hi * lambda,
                hi: &self.lo * lambda,
                lo_closed: self.hi_closed,
                hi_closed: self.lo_closed,
            }
        }
    }

    pub fn negate(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }

    /// `{u - v : u in self, v in other}`.
    pub fn minus(&self, v: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &v.hi,
            hi: &self.hi - &v.lo,
            lo_closed: self.lo_closed && v.hi_closed,
            hi_closed: self.hi_closed && v.lo_closed,
        }
    }

    /// Sort key: by left endpoint, closed before open at ties.
    fn cmp_lo(&self, o: &Interval) -> Ordering {
        self.lo
            .cmp(&o.lo)
            .then_with(|| o.lo_closed.cmp(&self.lo_closed))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (
            rational::format(&self.lo),
            rational::format(&self.hi),
            self.lo_closed,
            self.hi_closed,
        )
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi, lc, hc) = <(String, String, bool, bool)>::deserialize(d)?;
        let lo = rational::parse(&lo).map_err(D::Error::custom)?;
        let hi = rational::parse(&hi).map_err(D::Error::custom)?;
        Interval::new(lo, hi, lc, hc).map_err(D::Error::custom)
    }
}

/// Finite union of pairwise disjoint, non-touching intervals sorted by `lo`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(normalize(Vec::<Interval>::deserialize(d)?))
    }
}

/// Do two sorted intervals (a.lo <= b.lo) overlap or touch so that their union
/// is a single interval?
fn joins(a: &Interval, b: &Interval) -> bool {
    match b.lo.cmp(&a.hi) {
        Ordering::Less => true,
        Ordering::Equal => a.hi_closed || b.lo_closed,
        Ordering::Greater => false,
    }
}

/// Sorts, merges overlapping and touching parts.
pub fn normalize(mut parts: Vec<Interval>) -> IntervalUnion {
    parts.sort_by(|a, b| a.cmp_lo(b));
    IntervalUnion {
        parts: merge_sorted(parts),
    }
}

fn merge_sorted(parts: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for p in parts {
        match out.last_mut() {
            Some(cur) if joins(cur, &p) => match p.hi.cmp(&cur.hi) {
                Ordering::Greater => {
                    cur.hi = p.hi;
                    cur.hi_closed = p.hi_closed;
                }
                Ordering::Equal => cur.hi_closed |= p.hi_closed,
                Ordering::Less => {}
            },
            _ => out.push(p),
        }
    }
    out
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn single(i: Interval) -> Self {
        IntervalUnion { parts: vec![i] }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn measure(&self) -> Rational {
        measure(self)
    }

    /// Closed convex hull, `None` when empty.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval::new(first.lo.clone(), last.hi.clone(), first.lo_closed, last.hi_closed).unwrap())
    }

    pub fn inf(&self) -> Option<&Rational> {
        self.parts.first().map(|p| &p.lo)
    }

    pub fn sup(&self) -> Option<&Rational> {
        self.parts.last().map(|p| &p.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let idx = self.parts.partition_point(|p| &p.hi < x);
        self.parts[idx..]
            .iter()
            .take(2)
            .any(|p| p.contains(x))
    }

    pub fn contains_interval(&self, i: &Interval) -> bool {
        let idx = self.parts.partition_point(|p| p.hi < i.lo);
        self.parts[idx..]
            .iter()
            .take(2)
            .any(|p| p.contains_interval(i))
    }

    /// Set inclusion `self ⊆ other`.
    pub fn is_subset(&self, other: &IntervalUnion) -> bool {
        self.parts.iter().all(|p| other.contains_interval(p))
    }

    pub fn union(&self, o: &IntervalUnion) -> IntervalUnion {
        let mut v = Vec::with_capacity(self.len() + o.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < o.len() {
            let take_self = j >= o.len()
                || (i < self.len() && self.parts[i].cmp_lo(&o.parts[j]) != Ordering::Greater);
            if take_self {
                v.push(self.parts[i].clone());
                i += 1;
            } else {
                v.push(o.parts[j].clone());
                j += 1;
            }
        }
        IntervalUnion {
            parts: merge_sorted(v),
        }
    }

    pub fn intersection(&self, o: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < o.len() {
            let (a, b) = (&self.parts[i], &o.parts[j]);
            if let Some(c) = a.intersect(b) {
                out.push(c);
            }
            let a_first = match a.hi.cmp(&b.hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a.hi_closed || b.hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces are already disjoint and sorted, but may touch.
        IntervalUnion {
            parts: merge_sorted(out),
        }
    }

    pub fn intersect_interval(&self, i: &Interval) -> IntervalUnion {
        self.intersection(&IntervalUnion::single(i.clone()))
    }

    /// `self ∖ o`.
    pub fn difference(&self, o: &IntervalUnion) -> IntervalUnion {
        let Some(h) = self.hull() else {
            return IntervalUnion::empty();
        };
        let h = h.closure();
        let clipped = o.intersect_interval(&h);
        let comp = complement_in(&h, &clipped).expect("clipped to hull");
        self.intersection(&comp)
    }

    pub fn translate(&self, t: &Rational) -> IntervalUnion {
        IntervalUnion {
            parts: self.parts.iter().map(|p| p.translate(t)).collect(),
        }
    }

    pub fn scale(&self, lambda: &Rational) -> IntervalUnion {
        let mut parts: Vec<Interval> = self.parts.iter().map(|p| p.scale(lambda)).collect();
        if lambda.is_negative() {
            parts.reverse();
        }
        IntervalUnion { parts }
    }

    pub fn negate(&self) -> IntervalUnion {
        self.scale(&rational::int(-1))
    }

    pub fn closure(&self) -> IntervalUnion {
        normalize(self.parts.iter().map(Interval::closure).collect())
    }
}

impl FromIterator<Interval> for IntervalUnion {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        normalize(iter.into_iter().collect())
    }
}

pub fn measure(u: &IntervalUnion) -> Rational {
    sum_rationals(u.parts.iter().map(Interval::length))
}

/// Exact sum; groups by denominator first, which is much cheaper than folding
/// when many terms share a denominator.
pub fn sum_rationals<I: IntoIterator<Item = Rational>>(it: I) -> Rational {
    let mut by_den: std::collections::BTreeMap<BigInt, BigInt> = Default::default();
    for q in it {
        let (n, d) = (q.numer().clone(), q.denom().clone());
        *by_den.entry(d).or_default() += n;
    }
    by_den
        .into_iter()
        .fold(Rational::zero(), |acc, (d, n)| acc + Rational::new(n, d))
}

/// `ambient ∖ u`. Every part of `u` must lie inside `ambient`.
pub fn complement_in(ambient: &Interval, u: &IntervalUnion) -> Result<IntervalUnion> {
    if let Some(p) = u.parts.iter().find(|p| !ambient.contains_interval(p)) {
        return Err(Error::Domain(format!(
            "part [{}, {}] lies outside the ambient interval",
            rational::format(&p.lo),
            rational::format(&p.hi)
        )));
    }
    let mut out = Vec::with_capacity(u.len() + 1);
    let mut cur = ambient.lo.clone();
    let mut cur_closed = ambient.lo_closed;
    for p in &u.parts {
        if let Some(i) = Interval::try_new(cur, p.lo.clone(), cur_closed, !p.lo_closed) {
            out.push(i);
        }
        cur = p.hi.clone();
        cur_closed = !p.hi_closed;
    }
    if let Some(i) = Interval::try_new(cur, ambient.hi.clone(), cur_closed, ambient.hi_closed) {
        out.push(i);
    }
    Ok(IntervalUnion { parts: out })
}

/// Exact Minkowski difference `u − v`.
pub fn minkowski_diff(u: &IntervalUnion, v: &IntervalUnion) -> IntervalUnion {
    let mut parts = Vec::with_capacity(u.len() * v.len());
    for a in &u.parts {
        for b in &v.parts {
            parts.push(a.minus(b));
        }
    }
    normalize(parts)
}

/// `{0} − u`.
pub fn negate(u: &IntervalUnion) -> IntervalUnion {
    u.negate()
}

/// Minimal number of closed intervals of length `eps` covering `u`.
///
/// Leftmost-point greedy: start an interval at the first uncovered point and
/// skip whole runs of intervals inside long parts.
pub fn min_cover_count(u: &IntervalUnion, eps: &Rational) -> Result<u64> {
    if !eps.is_positive() {
        return Err(Error::InvalidParam("cover scale must be positive".into()));
    }
    let mut count: u64 = 0;
    let mut reach: Option<Rational> = None;
    for p in &u.parts {
        let covered = reach.as_ref().is_some_and(|r| &p.lo <= r);
        if !covered {
            count += 1;
            reach = Some(&p.lo + eps);
        }
        let r = reach.as_mut().unwrap();
        if &p.hi > r {
            let k = rational::ceil(&((&p.hi - &*r) / eps));
            count += k
                .to_u64()
                .ok_or_else(|| Error::Budget("cover count overflow".into()))?;
            *r += eps * Rational::from_integer(k);
        }
    }
    Ok(count)
}

/// Largest common denominator (in bits) for which [`pairwise_minus_union`]
/// works on integer numerators.
const COMMON_DEN_BITS: u64 = 1024;

/// Endpoints in some ordered number type, with the same tag rules as
/// [`Interval`].
#[derive(Clone)]
struct Iv<T> {
    lo: T,
    hi: T,
    lc: bool,
    hc: bool,
}

impl<T: Ord + Clone> Iv<T>
where
    for<'a> &'a T: std::ops::Sub<&'a T, Output = T>,
{
    fn nonempty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.lc && self.hc,
            Ordering::Greater => false,
        }
    }

    fn minus(&self, v: &Iv<T>) -> Iv<T> {
        Iv {
            lo: &self.lo - &v.hi,
            hi: &self.hi - &v.lo,
            lc: self.lc && v.hc,
            hc: self.hc && v.lc,
        }
    }

    fn clip(mut self, c: &Iv<T>) -> Option<Iv<T>> {
        match self.lo.cmp(&c.lo) {
            Ordering::Less => (self.lo, self.lc) = (c.lo.clone(), c.lc),
            Ordering::Equal => self.lc &= c.lc,
            Ordering::Greater => {}
        }
        match self.hi.cmp(&c.hi) {
            Ordering::Greater => (self.hi, self.hc) = (c.hi.clone(), c.hc),
            Ordering::Equal => self.hc &= c.hc,
            Ordering::Less => {}
        }
        self.nonempty().then_some(self)
    }
}

fn pairwise_generic<T: Ord + Clone>(a: &[Iv<T>], b: &[Iv<T>], clip: &Iv<T>) -> Vec<Iv<T>>
where
    for<'x> &'x T: std::ops::Sub<&'x T, Output = T>,
{
    let mut parts: Vec<Iv<T>> = a
        .iter()
        .flat_map(|x| b.iter().filter_map(move |y| x.minus(y).clip(clip)))
        .collect();
    parts.sort_by(|x, y| x.lo.cmp(&y.lo).then_with(|| y.lc.cmp(&x.lc)));
    let mut out: Vec<Iv<T>> = Vec::with_capacity(parts.len() / 4 + 1);
    for p in parts {
        match out.last_mut() {
            Some(cur)
                if match p.lo.cmp(&cur.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => cur.hc || p.lc,
                    Ordering::Greater => false,
                } =>
            {
                match p.hi.cmp(&cur.hi) {
                    Ordering::Greater => (cur.hi, cur.hc) = (p.hi, p.hc),
                    Ordering::Equal => cur.hc |= p.hc,
                    Ordering::Less => {}
                }
            }
            _ => out.push(p),
        }
    }
    out
}

/// `⋃_{x ∈ a, y ∈ b} (x − y) ∩ clip`, normalized.
///
/// Same result as normalizing the pairwise [`Interval::minus`] pieces, but
/// when all endpoints share a moderate common denominator the work is done
/// on integer numerators.
pub fn pairwise_minus_union(a: &[Interval], b: &[Interval], clip: &Interval) -> IntervalUnion {
    let all = || a.iter().chain(b).chain(std::iter::once(clip));
    let mut den = BigInt::from(1u8);
    let mut last = BigInt::from(1u8);
    let mut small = true;
    for i in all() {
        for q in [&i.lo, &i.hi] {
            if *q.denom() != last {
                last = q.denom().clone();
                den = num_integer::Integer::lcm(&den, &last);
                if den.bits() > COMMON_DEN_BITS {
                    small = false;
                }
            }
        }
        if !small {
            break;
        }
    }
    let parts = if !small {
        let conv = |i: &Interval| Iv {
            lo: i.lo.clone(),
            hi: i.hi.clone(),
            lc: i.lo_closed,
            hc: i.hi_closed,
        };
        let a: Vec<_> = a.iter().map(conv).collect();
        let b: Vec<_> = b.iter().map(conv).collect();
        pairwise_generic(&a, &b, &conv(clip))
            .into_iter()
            .map(|p| Interval { lo: p.lo, hi: p.hi, lo_closed: p.lc, hi_closed: p.hc })
            .collect()
    } else {
        let num = |q: &Rational| q.numer() * (&den / q.denom());
        let max_bits = all()
            .flat_map(|i| [num(&i.lo).bits(), num(&i.hi).bits()])
            .max()
            .unwrap_or(0);
        let back = |n: BigInt| Rational::new(n, den.clone());
        let to_interval = |lo, hi, lc, hc| Interval { lo: back(lo), hi: back(hi), lo_closed: lc, hi_closed: hc };
        if max_bits <= 120 {
            let conv = |i: &Interval| Iv {
                lo: num(&i.lo).to_i128().expect("fits"),
                hi: num(&i.hi).to_i128().expect("fits"),
                lc: i.lo_closed,
                hc: i.hi_closed,
            };
            let a: Vec<_> = a.iter().map(conv).collect();
            let b: Vec<_> = b.iter().map(conv).collect();
            pairwise_generic(&a, &b, &conv(clip))
                .into_iter()
                .map(|p| to_interval(BigInt::from(p.lo), BigInt::from(p.hi), p.lc, p.hc))
                .collect()
        } else {
            let conv = |i: &Interval| Iv { lo: num(&i.lo), hi: num(&i.hi), lc: i.lo_closed, hc: i.hi_closed };
            let a: Vec<_> = a.iter().map(conv).collect();
            let b: Vec<_> = b.iter().map(conv).collect();
            pairwise_generic(&a, &b, &conv(clip))
                .into_iter()
                .map(|p| to_interval(p.lo, p.hi, p.lc, p.hc))
                .collect()
        }
    };
    IntervalUnion { parts }
}
