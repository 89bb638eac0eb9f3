use std::path::{Path, PathBuf};

use clap::Args;
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use cantor_nest::cantor::{CantorSpec, GapBudget, GapCantor};
use cantor_nest::combinatorics::{
    binom_bound_check, card_e, composition_count_check, count_ck, count_ck_brute, CARD_E_CAP,
};
use cantor_nest::constructions::{self, dio_gapset, dio_lower_bound, dio_q0_for_tolerance, random_kp, RandomSeed};
use cantor_nest::exchange::{self, SetFile, SCHEMA};
use cantor_nest::interval::{Interval, IntervalUnion};
use cantor_nest::nesting::{self, cp_partial_sum, estimate_p, geometric_grid, lambda_scan, x_inner_outer};
use cantor_nest::rational::{self, Rational};
use cantor_nest::rounding::DEFAULT_PRECISION;
use cantor_nest::{DirectedRounding, Enclosure, Error};

use crate::config::Resolver;
use crate::{CliError, Common, Context};

/// Exit code when an uncertifiable quantity was requested.
const EXIT_UNCERTIFIABLE: u8 = 4;
/// Largest `k` for which the brute-force sequence count is run.
const BRUTE_MAX_K: u32 = 20;

fn parse_rat(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn fmt(q: &Rational) -> String {
    rational::format(q)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// `"a"` or `"lo,hi"`.
fn parse_pair(s: &str, what: &str) -> Result<(Rational, Rational), CliError> {
    let bad = || CliError::usage(format!("--{what}: expected a rational or \"lo,hi\", got {s:?}"));
    let mut it = s.split(',').map(|t| rational::parse(t.trim()));
    let lo = it.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let hi = match it.next() {
        None => lo.clone(),
        Some(h) => h.map_err(|_| bad())?,
    };
    if it.next().is_some() || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Shared state of one command run.
struct Run {
    res: Resolver,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    rounding: DirectedRounding,
}

impl Run {
    fn start(command: &str, c: &Common) -> Result<Run, CliError> {
        let mut res = Resolver::new(command, c.config.as_deref())?;
        let out = res.opt("out", c.out.clone())?;
        let csv = res.opt("csv", c.csv.clone())?;
        let precision = res.or("precision", c.precision, DEFAULT_PRECISION)?;
        if precision == 0 || precision > 4096 {
            return Err(CliError::usage("--precision must lie in 1..=4096"));
        }
        Ok(Run {
            res,
            out,
            csv,
            rounding: DirectedRounding::outward(precision),
        })
    }

    fn budget(&mut self, c: &Common, min_length: Option<Rational>) -> Result<GapBudget, CliError> {
        let gaps = self.res.opt("gaps", c.gaps)?;
        let levels = self.res.opt("levels", c.levels)?;
        let min_length = self.res.opt("min-length", min_length)?;
        match (gaps, levels, min_length) {
            (None, None, None) => Ok(GapBudget::All),
            (Some(n), None, None) => Ok(GapBudget::Count(n)),
            (None, Some(l), None) => Ok(GapBudget::Level(l)),
            (None, None, Some(m)) => Ok(GapBudget::MinLength(m)),
            _ => Err(CliError::usage("give at most one of --gaps, --levels, --min-length")),
        }
    }

    fn csv_path(&self) -> Option<PathBuf> {
        self.csv
            .clone()
            .or_else(|| self.out.as_ref().map(|o| o.with_extension("csv")))
    }

    /// Writes the report and, when a CSV path is known, the table.
    fn finish(self, result: Value, table: Option<(Vec<&str>, Vec<Vec<String>>)>) -> Result<(), CliError> {
        let csv_path = self.csv_path();
        let out = self.out.clone();
        let run_config = self.res.finish()?;
        let command = run_config["command"].clone();
        let report = json!({
            "schema": SCHEMA,
            "command": command,
            "run_config": Value::Object(run_config),
            "result": result,
        });
        if let (Some(path), Some((header, rows))) = (csv_path, table) {
            exchange::write_csv(&path, &header, rows).context(|| format!("writing {}", path.display()))?;
        }
        match out {
            Some(path) => exchange::write_json(&path, &report).context(|| format!("writing {}", path.display())),
            None => {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                Ok(())
            }
        }
    }
}

fn read_set(path: &Path) -> Result<SetFile, CliError> {
    SetFile::read(path).context(|| "reading set file".into())
}

fn read_k(path: &Path) -> Result<CantorSpec, CliError> {
    let set = read_set(path)?;
    set.as_cantor_spec().ok_or_else(|| {
        CliError::usage(format!(
            "{}: K must be a digit or non-empty union set, got kind {:?}",
            path.display(),
            set.kind()
        ))
    })
}

fn read_gaps(path: &Path) -> Result<GapCantor, CliError> {
    match read_set(path)? {
        SetFile::Gap(g) => Ok(g),
        other => Err(CliError::usage(format!(
            "{}: expected a gap set, got kind {:?}",
            path.display(),
            other.kind()
        ))),
    }
}

fn union_table(sets: &[(&str, Option<&IntervalUnion>)]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let rows = sets
        .iter()
        .filter_map(|(name, u)| u.map(|u| (name, u)))
        .flat_map(|(name, u)| {
            exchange::union_rows(u).into_iter().map(move |mut r| {
                r.insert(0, name.to_string());
                r
            })
        })
        .collect();
    (vec!["set", "lo", "hi", "lo_closed", "hi_closed"], rows)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct BuildArgs {
    /// Registered construction name.
    #[arg(long)]
    name: Option<String>,
    /// Parameters as a JSON object, or @path to a file holding one.
    #[arg(long)]
    params: Option<String>,
}

pub fn build(c: &Common, a: BuildArgs) -> Result<u8, CliError> {
    let mut run = Run::start("build", c)?;
    let name: String = run.res.required("name", a.name)?;
    let info = constructions::lookup(&name).context(|| "build".into())?;
    let flag_params = match a.params {
        None => None,
        Some(s) => {
            let text = match s.strip_prefix('@') {
                Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::usage(format!("--params {p}: {e}")))?,
                None => s,
            };
            Some(serde_json::from_str::<Value>(&text).map_err(|e| CliError::usage(format!("--params: {e}")))?)
        }
    };
    let mut params = run.res.or("params", flag_params, Value::Object(Map::new()))?;
    // Common flags fill the construction parameter of the same name.
    let accepts = |p: &str| info.params.iter().any(|x| x.name == p);
    let overrides = [
        ("levels", run.res.opt("levels", c.levels)?.map(Value::from)),
        ("seed", run.res.opt("seed", c.seed)?.map(Value::from)),
        ("depth", run.res.opt("depth", c.depth)?.map(Value::from)),
    ];
    for (key, v) in overrides {
        if let (Some(v), Some(obj)) = (v, params.as_object_mut()) {
            if !accepts(key) {
                return Err(CliError::usage(format!("{name} takes no {key:?} parameter")));
            }
            obj.insert(key.into(), v);
        }
    }
    let built = constructions::build(&name, &params).context(|| format!("build {name}"))?;
    let set = SetFile::from(built);
    run.res.finish()?;
    if let Some(path) = &run.csv {
        let rows = match &set {
            SetFile::Gap(g) => {
                let gaps = g.all_gaps().context(|| "listing gaps".into())?;
                gaps.iter()
                    .map(|i| vec![fmt(&i.lo), fmt(&i.hi)])
                    .collect()
            }
            SetFile::Cover(cv) => exchange::union_rows(&cv.cover).into_iter().map(|r| r[..2].to_vec()).collect(),
            SetFile::Digit(_) | SetFile::Union(_) => vec![],
        };
        exchange::write_csv(path, &["lo", "hi"], rows).context(|| format!("writing {}", path.display()))?;
    }
    match &run.out {
        Some(path) => set.write(path).context(|| format!("writing {}", path.display()))?,
        None => print!("{}", set.to_json().context(|| "serializing".into())?),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Set file to analyze.
    #[arg(long)]
    set: Option<PathBuf>,
    /// Estimate the exponent of convergence of the gap lengths.
    #[arg(long)]
    p_estimate: bool,
    /// Partial sums of Σ l^p for this p.
    #[arg(long, value_parser = parse_rat)]
    cp: Option<Rational>,
    /// Certified bracket for the box fuzzy measure C_K.
    #[arg(long)]
    ck: bool,
    /// Dimension enclosure.
    #[arg(long)]
    dim: bool,
}

pub fn analyze(c: &Common, a: AnalyzeArgs) -> Result<u8, CliError> {
    let mut run = Run::start("analyze", c)?;
    let path: PathBuf = run.res.required("set", a.set)?;
    let mut pe = run.res.switch("p-estimate", a.p_estimate)?;
    let cp = run.res.opt("cp", a.cp)?;
    let mut ck = run.res.switch("ck", a.ck)?;
    let mut dim = run.res.switch("dim", a.dim)?;
    if !(pe || cp.is_some() || ck || dim) {
        (pe, ck, dim) = (true, true, true);
    }
    let budget = run.budget(c, None)?;
    let r = run.rounding;
    let set = read_set(&path)?;
    let gap = match &set {
        SetFile::Gap(g) => Some(g),
        _ => None,
    };
    let spec = set.as_cantor_spec();
    let na = |why: &str| json!({ "not_applicable": why });

    let mut out = Map::new();
    out.insert("kind".into(), Value::from(set.kind()));
    if let Some(g) = gap {
        out.insert("gap_count".into(), Value::from(g.total_count().to_string()));
    }
    let mut code = 0;
    let mut table = None;
    if pe {
        let v = match gap {
            Some(g) => to_value(&estimate_p(g, &budget, &r).context(|| "estimating p".into())?),
            None => na("needs a gap set"),
        };
        out.insert("p_estimate".into(), v);
    }
    if let Some(p) = &cp {
        let v = match gap {
            Some(g) => {
                let rep = cp_partial_sum(g, p, &budget, &r).context(|| "partial sums".into())?;
                let rows = rep
                    .partial_sums
                    .iter()
                    .map(|s| {
                        vec![
                            s.gaps.as_ref().map_or("tail".into(), BigUint::to_string),
                            fmt(&s.sum),
                            rational::to_f64(&s.sum).to_string(),
                        ]
                    })
                    .collect();
                table = Some((vec!["gaps", "sum", "sum_f64"], rows));
                to_value(&rep)
            }
            None => na("needs a gap set"),
        };
        out.insert("cp".into(), v);
    }
    if ck {
        let v = match &spec {
            Some(k) => match k.ck_certificate(&r) {
                Ok(cert) => to_value(&cert),
                Err(Error::Uncertifiable(why)) => {
                    code = EXIT_UNCERTIFIABLE;
                    json!({ "uncertifiable": why })
                }
                Err(e) => return Err(e).context(|| "certifying C_K".into()),
            },
            None => {
                code = EXIT_UNCERTIFIABLE;
                json!({ "uncertifiable": format!("a {} set carries no self-similar structure to certify", set.kind()) })
            }
        };
        out.insert("ck".into(), v);
    }
    if dim {
        let v = match &set {
            SetFile::Digit(d) => to_value(&d.dimension(r.work_bits())),
            SetFile::Union(_) => to_value(&spec.as_ref().map(|k| k.dimension(r.work_bits()))),
            _ => na("defined for digit and union sets; use --p-estimate for gap sets"),
        };
        out.insert("dimension".into(), v);
    }
    if table.is_none() {
        if let Some(g) = gap {
            let rows = g
                .length_histogram()
                .into_iter()
                .map(|(l, n)| vec![fmt(&l), n.to_string()])
                .collect();
            table = Some((vec!["length", "count"], rows));
        }
    }
    run.finish(Value::Object(out), table)?;
    Ok(code)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct NestArgs {
    /// Set to translate (digit or union).
    #[arg(long)]
    k: Option<PathBuf>,
    /// Gap set receiving the translates.
    #[arg(long)]
    ktilde: Option<PathBuf>,
    /// Scale K by λ first.
    #[arg(long, value_parser = parse_rat)]
    lambda: Option<Rational>,
    /// Use only gaps at least this long.
    #[arg(long, value_parser = parse_rat)]
    min_length: Option<Rational>,
}

pub fn nest(c: &Common, a: NestArgs) -> Result<u8, CliError> {
    let mut run = Run::start("nest", c)?;
    let kp: PathBuf = run.res.required("k", a.k)?;
    let gp: PathBuf = run.res.required("ktilde", a.ktilde)?;
    let lambda = run.res.opt("lambda", a.lambda)?;
    let depth = run.res.or("depth", c.depth, 8)?;
    let budget = run.budget(c, a.min_length)?;
    let mut k = read_k(&kp)?;
    if let Some(l) = &lambda {
        k = k.scaled(l).context(|| "scaling K".into())?;
    }
    let gc = read_gaps(&gp)?;
    let rep = nesting::nest(&k, &gc, depth, &budget, &run.rounding).context(|| "nest".into())?;
    let code = rep.bound.verdict.exit_code() as u8;
    let table = union_table(&[("x_inner", rep.oracle.x_inner.as_ref()), ("x_outer", rep.oracle.x_outer.as_ref())]);
    run.finish(to_value(&rep), Some(table))?;
    Ok(code)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct ScanArgs {
    #[arg(long)]
    k: Option<PathBuf>,
    #[arg(long)]
    ktilde: Option<PathBuf>,
    /// Grid ratio; the grid is ratio^first, ..., ratio^last.
    #[arg(long, value_parser = parse_rat)]
    ratio: Option<Rational>,
    #[arg(long)]
    first: Option<u32>,
    #[arg(long)]
    last: Option<u32>,
    /// Also run both oracles at --depth for every grid point.
    #[arg(long)]
    oracles: bool,
    #[arg(long, value_parser = parse_rat)]
    min_length: Option<Rational>,
}

pub fn scan(c: &Common, a: ScanArgs) -> Result<u8, CliError> {
    let mut run = Run::start("scan", c)?;
    let kp: PathBuf = run.res.required("k", a.k)?;
    let gp: PathBuf = run.res.required("ktilde", a.ktilde)?;
    let ratio = run.res.or("ratio", a.ratio, rational::rat(1, 2))?;
    let first = run.res.or("first", a.first, 1)?;
    let last = run.res.or("last", a.last, 12)?;
    let oracles = run.res.switch("oracles", a.oracles)?;
    let depth = if oracles { Some(run.res.or("depth", c.depth, 8)?) } else { None };
    let budget = run.budget(c, a.min_length)?;
    if first > last {
        return Err(CliError::usage("--first must not exceed --last"));
    }
    let k = read_k(&kp)?;
    let gc = read_gaps(&gp)?;
    let grid = geometric_grid(&ratio, first, last);
    let s = lambda_scan(&k, &gc, &grid, depth, &budget, &run.rounding).context(|| "scan".into())?;
    let opt = |q: &Option<Rational>| q.as_ref().map_or(String::new(), fmt);
    let rows = s
        .rows
        .iter()
        .map(|row| {
            vec![
                fmt(&row.lambda),
                opt(&row.theo1_bound),
                fmt(&row.theo1_bound_upper),
                to_value(&row.verdict).as_str().unwrap_or_default().to_string(),
                opt(&row.measure_inner),
                opt(&row.measure_outer),
            ]
        })
        .collect();
    let header = vec!["lambda", "theo1_bound", "theo1_bound_upper", "verdict", "measure_inner", "measure_outer"];
    run.finish(to_value(&s), Some((header, rows)))?;
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct DioArgs {
    /// Exponent d of the approximation condition.
    #[arg(long)]
    d: Option<u32>,
    /// Dimension enclosure of K, as "s" or "lo,hi".
    #[arg(long)]
    s: Option<String>,
    /// Mass M.
    #[arg(long, value_parser = parse_rat)]
    m: Option<Rational>,
    /// K as a set file; supplies C_K and the oracle set.
    #[arg(long)]
    k: Option<PathBuf>,
    /// Upper bound for C_K, used when --k is absent.
    #[arg(long, value_parser = parse_rat)]
    ck_upper: Option<Rational>,
    #[arg(long)]
    q0_min: Option<u64>,
    #[arg(long)]
    q0_max: Option<u64>,
    /// Also report the least q0 whose bound exceeds 2M - tol.
    #[arg(long, value_parser = parse_rat)]
    tol: Option<Rational>,
    /// Run the oracles on the gap set truncated at this denominator (needs --k).
    #[arg(long)]
    q_max: Option<u64>,
    /// Range of centers a/q, as "lo,hi".
    #[arg(long)]
    range: Option<String>,
}

pub fn dio(c: &Common, a: DioArgs) -> Result<u8, CliError> {
    let mut run = Run::start("dio", c)?;
    let d = run.res.or("d", a.d, 8)?;
    let s_str = run.res.or("s", a.s, "1/5".to_string())?;
    let m = run.res.or("m", a.m, rational::int(1))?;
    let kp: Option<PathBuf> = run.res.opt("k", a.k)?;
    let ck_flag = run.res.opt("ck-upper", a.ck_upper)?;
    let q0_min = run.res.or("q0-min", a.q0_min, 2)?;
    let q0_max = run.res.or("q0-max", a.q0_max, 64)?;
    let tol = run.res.opt("tol", a.tol)?;
    let q_max = run.res.opt("q-max", a.q_max)?;
    let range_str = run.res.or("range", a.range, "0,1".to_string())?;
    let depth = run.res.or("depth", c.depth, 6)?;
    let r = run.rounding;
    let (slo, shi) = parse_pair(&s_str, "s")?;
    let s = Enclosure::new(slo, shi);
    let (rlo, rhi) = parse_pair(&range_str, "range")?;
    if q0_min < 2 || q0_min > q0_max {
        return Err(CliError::usage("need 2 <= --q0-min <= --q0-max"));
    }
    let k = kp.as_deref().map(read_k).transpose()?;
    let ck_upper = match (&k, ck_flag) {
        (_, Some(v)) => v,
        (Some(k), None) => k.ck_certificate(&r).context(|| "certifying C_K".into())?.ck_upper,
        (None, None) => return Err(CliError::usage("dio: give --k or --ck-upper")),
    };
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for q0 in q0_min..=q0_max {
        let b = dio_lower_bound(&m, &ck_upper, &s, d, q0, &r).context(|| format!("bound at q0 = {q0}"))?;
        rows.push(vec![q0.to_string(), fmt(&b), rational::to_f64(&b).to_string()]);
        bounds.push(b);
    }
    let increasing = bounds.windows(2).all(|w| w[0] < w[1]);
    let mut out = Map::new();
    out.insert("ck_upper".into(), Value::from(fmt(&ck_upper)));
    out.insert("limit".into(), Value::from(fmt(&(&m * rational::int(2)))));
    out.insert("increasing".into(), Value::from(increasing));
    out.insert(
        "sweep".into(),
        Value::Array(
            (q0_min..=q0_max)
                .zip(&bounds)
                .map(|(q, b)| json!({"q0": q, "lower_bound": fmt(b)}))
                .collect(),
        ),
    );
    let mut q_star = q0_min;
    if let Some(t) = &tol {
        q_star = dio_q0_for_tolerance(&m, &ck_upper, &s, d, t, &r).context(|| "solving for q0".into())?;
        let b = dio_lower_bound(&m, &ck_upper, &s, d, q_star, &r).context(|| "bound at q0".into())?;
        out.insert("q0_for_tolerance".into(), json!({"q0": q_star, "lower_bound": fmt(&b)}));
    }
    if let Some(qm) = q_max {
        let k = k.as_ref().ok_or_else(|| CliError::usage("--q-max needs --k"))?;
        let gc = dio_gapset(d, q_star, qm, &Interval::closed(rlo, rhi)).context(|| "dio_gapset".into())?;
        let o = x_inner_outer(k, &gc, depth, &GapBudget::All).context(|| "oracles".into())?;
        out.insert(
            "oracle".into(),
            json!({
                "q0": q_star,
                "q_max": qm,
                "gaps": gc.total_count().to_string(),
                "measure_inner": fmt(&o.measure_inner),
                "measure_outer": fmt(&o.measure_outer),
                "base_measure": fmt(&o.base_measure),
            }),
        );
    }
    run.finish(Value::Object(out), Some((vec!["q0", "lower_bound", "lower_bound_f64"], rows)))?;
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct CombArgs {
    /// Largest k in the C_k table.
    #[arg(long)]
    max_k: Option<u32>,
    /// Enumerate the ensemble for N = 0..=card-n.
    #[arg(long)]
    card_n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_parser = parse_rat)]
    delta: Option<Rational>,
    /// Largest N in the binomial-bound sweep.
    #[arg(long)]
    sweep_n: Option<u32>,
    /// Largest R in the composition-count sweep.
    #[arg(long)]
    sweep_r: Option<u32>,
}

pub fn comb(c: &Common, a: CombArgs) -> Result<u8, CliError> {
    let mut run = Run::start("comb", c)?;
    let max_k = run.res.or("max-k", a.max_k, 14)?;
    let card_n = run.res.or("card-n", a.card_n, 12)?;
    let m = run.res.or("m", a.m, 3)?;
    let delta = run.res.or("delta", a.delta, rational::rat(1, 3))?;
    let sweep_n = run.res.or("sweep-n", a.sweep_n, 24)?;
    let sweep_r = run.res.or("sweep-r", a.sweep_r, 30)?;
    if m == 0 {
        return Err(CliError::usage("--m must be positive"));
    }
    if card_n > CARD_E_CAP {
        return Err(CliError::usage(format!("--card-n is capped at {CARD_E_CAP}")));
    }
    let bits = run.rounding.work_bits();
    let table = count_ck(max_k).context(|| "count_ck".into())?;
    let mut brute_ok = true;
    let rows: Vec<Vec<String>> = table
        .rows()
        .map(|(k, ck)| {
            let brute = (k <= BRUTE_MAX_K).then(|| count_ck_brute(k));
            if let Some(b) = brute {
                brute_ok &= BigUint::from(b) == *ck;
            }
            vec![
                k.to_string(),
                ck.to_string(),
                brute.map_or(String::new(), |b| b.to_string()),
                (BigUint::from(1u8) << k).to_string(),
            ]
        })
        .collect();
    let ensembles = (0..=card_n)
        .map(|n| card_e(n, m, &delta, bits).map(|e| to_value(&e)))
        .collect::<cantor_nest::Result<Vec<_>>>()
        .context(|| "card_e".into())?;

    // The binomial bound is only stated for M >= 3.
    let mut binom = (0u64, Vec::new());
    for nt in (if m >= 3 { 2 } else { sweep_n + 1 })..=sweep_n {
        for n in 1..=nt / 2 {
            for r in 1..=nt {
                for t in 0..=(r / m).min(n) {
                    let chk = binom_bound_check(n, t, nt, r, m, bits).context(|| "binomial bound".into())?;
                    binom.0 += 1;
                    if !chk.holds {
                        binom.1.push(json!({"n": n, "t": t, "N": nt, "R": r}));
                    }
                }
            }
        }
    }
    let mut comp = (0u64, Vec::new());
    for r in 1..=sweep_r {
        for t in 0..=r / m {
            let (x, y) = composition_count_check(r, t, m, bits).context(|| "composition count".into())?;
            comp.0 += 1;
            if !(x.holds && y.holds) {
                comp.1.push(json!({"R": r, "t": t}));
            }
        }
    }
    let result = json!({
        "count_table": to_value(&table),
        "matches_enumeration": brute_ok,
        "within_power_of_two": table.within_power_of_two(),
        "ensembles": ensembles,
        "binomial_sweep": {"checked": binom.0, "violations": binom.1},
        "composition_sweep": {"checked": comp.0, "violations": comp.1},
    });
    run.finish(result, Some((vec!["k", "c_k", "brute_force", "two_pow_k"], rows)))?;
    Ok(0)
}

// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct RandomCeArgs {
    /// Gap-length exponent p.
    #[arg(long, value_parser = parse_rat)]
    p: Option<Rational>,
    /// K as a set file.
    #[arg(long)]
    k: Option<PathBuf>,
    #[arg(long)]
    i0: Option<u32>,
    /// Largest level; ranges i0..=j are run for every j from i0 to i1.
    #[arg(long)]
    i1: Option<u32>,
    /// Number of seeds, starting at --seed.
    #[arg(long)]
    seeds: Option<u64>,
    /// Bits of the random position grid.
    #[arg(long)]
    resolution: Option<u32>,
}

pub fn random_ce(c: &Common, a: RandomCeArgs) -> Result<u8, CliError> {
    let mut run = Run::start("random-ce", c)?;
    let p = run.res.required("p", a.p)?;
    let kp: PathBuf = run.res.required("k", a.k)?;
    let i0 = run.res.or("i0", a.i0, 2)?;
    let i1 = run.res.required("i1", a.i1)?;
    let seeds = run.res.or("seeds", a.seeds, 20)?;
    let base = run.res.or("seed", c.seed, 0)?;
    let depth = run.res.or("depth", c.depth, 3)?;
    let resolution = run.res.or("resolution", a.resolution, 53)?;
    if i1 < i0 || seeds == 0 {
        return Err(CliError::usage("need --i1 >= --i0 and --seeds >= 1"));
    }
    let k = read_k(&kp)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut means = Vec::new();
    for top in i0..=i1 {
        let mut total = Rational::from_integer(0.into());
        for s in 0..seeds {
            let seed = base + s;
            let gc = random_kp(&p, i0, top, &RandomSeed::new(seed), resolution)
                .context(|| format!("random_kp seed {seed}"))?;
            let o = x_inner_outer(&k, &gc, depth, &GapBudget::All).context(|| format!("oracles seed {seed}"))?;
            rows.push(vec![
                top.to_string(),
                seed.to_string(),
                fmt(&o.measure_inner),
                fmt(&o.measure_outer),
            ]);
            total += &o.measure_outer;
        }
        let mean = total / rational::int(seeds as i64);
        summary.push(json!({"i_range": [i0, top], "mean_measure_outer": fmt(&mean)}));
        means.push(mean);
    }
    let result = json!({
        "levels": summary,
        "non_increasing": means.windows(2).all(|w| w[1] <= w[0]),
    });
    run.finish(result, Some((vec!["i1", "seed", "measure_inner", "measure_outer"], rows)))?;
    Ok(0)
}
