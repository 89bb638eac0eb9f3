//! Every named construction, plus a string registry so callers can build
//! them from JSON parameters.

mod cf;
mod gapsets;
mod random;
mod symbolic;

pub use cf::{cf_cantor, cf_value};
pub use gapsets::{
    counterexample_kp, counterexample_measure_bound, counterexample_removed_bound,
    decimal_ratio_upper, dio_gapset, dio_lower_bound, dio_measure_bound, dio_q0_for_tolerance,
    is_dyadic, j_of, middle_gap, middle_gap_length, middle_gap_rounded, n_start_helper,
    periodic_power_tail, random_kp, random_removed_bound,
};
pub use random::{DyadicRng, RandomSeed};
pub use symbolic::{
    census, chebyshev_cylinder, enumerate_gaps, pesin_k2, pesin_k2_with, pesin_k3, pesin_k3_with,
    word_admissible, Rule, SymbolicWord, WordCensus, DEFAULT_MATERIALIZE,
};

use serde_json::{Map, Value};

use crate::cantor::{CoverApprox, DigitCantorSpec, GapCantor};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};
use crate::rounding::DirectedRounding;

/// The even-digit decimal set with a leading zero digit:
/// `{ Σ d_i 10^-(i+1) : d_i ∈ {0,2,4,6,8} }`, of diameter `8/90`.
pub fn even_decimal_set() -> DigitCantorSpec {
    DigitCantorSpec::new(10, &[0, 2, 4, 6, 8])
        .unwrap()
        .scaled(&rational::rat(1, 10))
        .unwrap()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Built {
    Gap(GapCantor),
    Digit(DigitCantorSpec),
    Cover(CoverApprox),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    /// `"num/den"` string or JSON integer.
    Rational,
    UInt,
    /// `[lo, hi]` pair of rationals.
    Range,
    /// Array of non-negative integers.
    Digits,
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub required: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ConstructionInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
}

const fn req(name: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        required: true,
    }
}

const fn opt(name: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        required: false,
    }
}

use ParamKind as K;

pub const REGISTRY: &[ConstructionInfo] = &[
    ConstructionInfo {
        name: "middle_gap",
        summary: "[-1,1] minus centered gaps of length 2^(-n/s)/(1-2^(1-1/s)) per level",
        params: &[req("s", K::Rational), req("levels", K::UInt)],
    },
    ConstructionInfo {
        name: "counterexample_kp",
        summary: "[0,1] minus q/10^i + (0, 10^-floor(i/p)); n_start defaults to the helper value",
        params: &[req("p", K::Rational), opt("n_start", K::UInt), opt("i_max", K::UInt)],
    },
    ConstructionInfo {
        name: "random_kp",
        summary: "[0,1] minus u_ik + (0, 10^-floor(i/p)) with seeded dyadic u_ik",
        params: &[
            req("p", K::Rational),
            req("i0", K::UInt),
            req("i1", K::UInt),
            opt("seed", K::UInt),
            opt("resolution", K::UInt),
        ],
    },
    ConstructionInfo {
        name: "pesin_k2",
        summary: "digits bounded by max(N, s * running sum)",
        params: &[req("s", K::Rational), req("N", K::UInt), req("sum_budget", K::UInt)],
    },
    ConstructionInfo {
        name: "pesin_k3",
        summary: "large digits carry at most a delta fraction of the running sum",
        params: &[req("M", K::UInt), req("delta", K::Rational), req("sum_budget", K::UInt)],
    },
    ConstructionInfo {
        name: "dio_gapset",
        summary: "range minus (a/q - q^-d, a/q + q^-d) for q0 <= q <= q_max",
        params: &[
            req("d", K::UInt),
            req("q0", K::UInt),
            req("q_max", K::UInt),
            opt("range", K::Range),
        ],
    },
    ConstructionInfo {
        name: "cf_cantor",
        summary: "cover of the continued fractions with partial quotients at most k",
        params: &[req("k", K::UInt), req("depth", K::UInt)],
    },
    ConstructionInfo {
        name: "digit_cantor",
        summary: "translate + scale * {sum d_i base^-i : d_i in digits}",
        params: &[
            req("base", K::UInt),
            req("digits", K::Digits),
            opt("translate", K::Rational),
            opt("scale", K::Rational),
        ],
    },
];

pub fn lookup(name: &str) -> Result<&'static ConstructionInfo> {
    REGISTRY
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownConstruction(name.to_string()))
}

fn bad(name: &str, why: &str) -> Error {
    Error::InvalidParam(format!("parameter {name:?}: {why}"))
}

fn parse_rational(name: &str, v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s).map_err(|_| bad(name, "expected \"num/den\"")),
        Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().unwrap())),
        _ => Err(bad(name, "expected a rational string or an integer")),
    }
}

/// Validated parameter bag.
pub struct Params<'a> {
    map: &'a Map<String, Value>,
}

impl<'a> Params<'a> {
    fn check(info: &ConstructionInfo, v: &'a Value) -> Result<Self> {
        let map = v
            .as_object()
            .ok_or_else(|| Error::InvalidParam("parameters must be a JSON object".into()))?;
        for key in map.keys() {
            if !info.params.iter().any(|p| p.name == key) {
                return Err(bad(key, &format!("not accepted by {}", info.name)));
            }
        }
        for p in info.params {
            match map.get(p.name) {
                None if p.required => return Err(bad(p.name, "missing")),
                None => {}
                Some(v) => match p.kind {
                    K::Rational => {
                        parse_rational(p.name, v)?;
                    }
                    K::UInt => {
                        v.as_u64().ok_or_else(|| bad(p.name, "expected a non-negative integer"))?;
                    }
                    K::Range => {
                        let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(p.name, "expected [lo, hi]"))?;
                        let lo = parse_rational(p.name, &a[0])?;
                        let hi = parse_rational(p.name, &a[1])?;
                        if lo > hi {
                            return Err(bad(p.name, "lo > hi"));
                        }
                    }
                    K::Digits => {
                        let a = v.as_array().ok_or_else(|| bad(p.name, "expected an array"))?;
                        if a.iter().any(|d| d.as_u64().is_none()) {
                            return Err(bad(p.name, "digits must be non-negative integers"));
                        }
                    }
                },
            }
        }
        Ok(Params { map })
    }

    pub fn rational(&self, name: &str) -> Option<Rational> {
        self.map.get(name).map(|v| parse_rational(name, v).unwrap())
    }

    pub fn uint(&self, name: &str) -> Option<u64> {
        self.map.get(name).and_then(Value::as_u64)
    }

    fn u32(&self, name: &str) -> Result<Option<u32>> {
        self.uint(name)
            .map(|v| u32::try_from(v).map_err(|_| bad(name, "too large")))
            .transpose()
    }

    fn range(&self, name: &str) -> Option<Interval> {
        self.map.get(name).map(|v| {
            let a = v.as_array().unwrap();
            Interval::closed(parse_rational(name, &a[0]).unwrap(), parse_rational(name, &a[1]).unwrap())
        })
    }

    fn digits(&self, name: &str) -> Result<Vec<u32>> {
        self.map
            .get(name)
            .and_then(Value::as_array)
            .map(|a| {
                a.iter()
                    .map(|d| u32::try_from(d.as_u64().unwrap()).map_err(|_| bad(name, "digit too large")))
                    .collect()
            })
            .unwrap_or_else(|| Ok(vec![]))
    }
}

/// Builds a registered construction from JSON parameters.
pub fn build(name: &str, params: &Value) -> Result<Built> {
    let info = lookup(name)?;
    let p = Params::check(info, params)?;
    let rq = |n: &str| p.rational(n).ok_or_else(|| bad(n, "missing"));
    let uq = |n: &str| p.u32(n)?.ok_or_else(|| bad(n, "missing"));
    Ok(match name {
        "middle_gap" => Built::Gap(middle_gap(&rq("s")?, uq("levels")?)?),
        "counterexample_kp" => {
            let pp = rq("p")?;
            let n_start = match p.u32("n_start")? {
                Some(n) => n,
                None => {
                    let d = even_decimal_set().dimension(DirectedRounding::default().work_bits());
                    n_start_helper(&pp, &d.enclosure, &DirectedRounding::default())?
                }
            };
            let i_max = p.u32("i_max")?.unwrap_or(n_start);
            Built::Gap(counterexample_kp(&pp, n_start, i_max)?)
        }
        "random_kp" => {
            let seed = RandomSeed::new(p.uint("seed").unwrap_or(0));
            let res = p.u32("resolution")?.unwrap_or(53);
            Built::Gap(random_kp(&rq("p")?, uq("i0")?, uq("i1")?, &seed, res)?)
        }
        "pesin_k2" => Built::Gap(pesin_k2(&rq("s")?, uq("N")? as u64, uq("sum_budget")? as u64)?),
        "pesin_k3" => Built::Gap(pesin_k3(uq("M")? as u64, &rq("delta")?, uq("sum_budget")? as u64)?),
        "dio_gapset" => {
            let range = p
                .range("range")
                .unwrap_or_else(|| Interval::closed(rational::int(0), rational::int(1)));
            Built::Gap(dio_gapset(
                uq("d")?,
                p.uint("q0").unwrap(),
                p.uint("q_max").unwrap(),
                &range,
            )?)
        }
        "cf_cantor" => Built::Cover(cf_cantor(uq("k")?, uq("depth")?)?),
        "digit_cantor" => {
            let mut spec = DigitCantorSpec::new(uq("base")?, &p.digits("digits")?)?;
            if let Some(s) = p.rational("scale") {
                spec = spec.scaled(&s)?;
            }
            if let Some(t) = p.rational("translate") {
                spec = spec.translated(&t);
            }
            Built::Digit(spec)
        }
        _ => unreachable!("registry and dispatch disagree"),
    })
}
