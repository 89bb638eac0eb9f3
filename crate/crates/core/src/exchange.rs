//! The on-disk set-exchange format and report/CSV writers.
//!
//! ```json
//! { "schema": "cantor-nest/1", "kind": "gap", "ambient": ["-1/1", "1/1", true, true],
//!   "gaps": [["-1/3", "1/3", false, false]], "levels": [{"level": 1, "count": 1}],
//!   "meta": { "construction": "middle_gap", ... } }
//! ```
//!
//! Every number is a `"num/den"` string; intervals carry their closedness flags.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cantor::{
    CantorSpec, CoverApprox, DigitCantorSpec, GapCantor, GapLevel, GapMeta, GeometricTail, HistEntry, LatticeLevel,
};
use crate::constructions::Built;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalUnion};

pub const SCHEMA: &str = "cantor-nest/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpan {
    pub level: u32,
    pub count: usize,
}

/// Gap set on the wire: a flat gap list split into levels by `levels`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapWire {
    pub ambient: Interval,
    #[serde(default)]
    pub gaps: Vec<Interval>,
    #[serde(default)]
    pub levels: Vec<LevelSpan>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lattice: Vec<LatticeLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<HistEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<GeometricTail>,
    #[serde(default)]
    pub meta: GapMeta,
}

impl From<&GapCantor> for GapWire {
    fn from(gc: &GapCantor) -> Self {
        GapWire {
            ambient: gc.ambient.clone(),
            gaps: gc.levels.iter().flat_map(|l| l.gaps.iter().cloned()).collect(),
            levels: gc
                .levels
                .iter()
                .map(|l| LevelSpan {
                    level: l.level,
                    count: l.gaps.len(),
                })
                .collect(),
            lattice: gc.lattice.clone(),
            histogram: gc.histogram.clone(),
            tail: gc.tail.clone(),
            meta: gc.meta.clone(),
        }
    }
}

impl TryFrom<GapWire> for GapCantor {
    type Error = Error;

    fn try_from(w: GapWire) -> Result<GapCantor> {
        let mut levels = Vec::with_capacity(w.levels.len().max(1));
        let mut it = w.gaps.into_iter();
        if w.levels.is_empty() {
            let gaps: Vec<Interval> = it.collect();
            if !gaps.is_empty() {
                levels.push(GapLevel { level: 1, gaps });
            }
        } else {
            for span in &w.levels {
                let gaps: Vec<Interval> = it.by_ref().take(span.count).collect();
                if gaps.len() != span.count {
                    return Err(Error::Parse("level counts exceed the gap list".into()));
                }
                levels.push(GapLevel { level: span.level, gaps });
            }
            if it.next().is_some() {
                return Err(Error::Parse("gaps left over after the listed levels".into()));
            }
        }
        let mut gc = GapCantor::new(w.ambient, levels, w.meta)?;
        gc.lattice = w.lattice;
        gc.histogram = w.histogram;
        gc.tail = w.tail;
        Ok(gc)
    }
}

/// Any set this crate reads or writes.
#[derive(Clone, Debug, PartialEq)]
pub enum SetFile {
    Gap(GapCantor),
    Digit(DigitCantorSpec),
    Union(IntervalUnion),
    Cover(CoverApprox),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Body {
    Gap(GapWire),
    Digit(DigitCantorSpec),
    Union { set: IntervalUnion },
    Cover(CoverApprox),
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema: String,
    #[serde(flatten)]
    body: Body,
}

impl From<Built> for SetFile {
    fn from(b: Built) -> Self {
        match b {
            Built::Gap(g) => SetFile::Gap(g),
            Built::Digit(d) => SetFile::Digit(d),
            Built::Cover(c) => SetFile::Cover(c),
        }
    }
}

impl SetFile {
    pub fn kind(&self) -> &'static str {
        match self {
            SetFile::Gap(_) => "gap",
            SetFile::Digit(_) => "digit",
            SetFile::Union(_) => "union",
            SetFile::Cover(_) => "cover",
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let body = match self {
            SetFile::Gap(g) => Body::Gap(g.into()),
            SetFile::Digit(d) => Body::Digit(d.clone()),
            SetFile::Union(u) => Body::Union { set: u.clone() },
            SetFile::Cover(c) => Body::Cover(c.clone()),
        };
        let mut s = serde_json::to_string_pretty(&Envelope {
            schema: SCHEMA.into(),
            body,
        })?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<SetFile> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        match v.get("schema").and_then(|x| x.as_str()) {
            Some(SCHEMA) => {}
            Some(other) => return Err(Error::Parse(format!("unsupported schema {other:?}"))),
            None => return Err(Error::Parse("missing \"schema\" field".into())),
        }
        let env: Envelope = serde_json::from_value(v)?;
        Ok(match env.body {
            Body::Gap(w) => SetFile::Gap(w.try_into()?),
            Body::Digit(d) => SetFile::Digit(d),
            Body::Union { set } => SetFile::Union(set),
            Body::Cover(c) => SetFile::Cover(c),
        })
    }

    pub fn read(path: &Path) -> Result<SetFile> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&s).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            Error::Json(m) => Error::Json(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    /// The set as `K` in a nesting problem, if it has the structure for it.
    pub fn as_cantor_spec(&self) -> Option<CantorSpec> {
        match self {
            SetFile::Digit(d) => Some(CantorSpec::Digit(d.clone())),
            SetFile::Union(u) if !u.is_empty() => CantorSpec::union(u.clone()).ok(),
            _ => None,
        }
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// CSV text for a header and string rows.
pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    write_atomic(path, csv_string(header, rows)?.as_bytes())
}

/// `(lo, hi, lo_closed, hi_closed)` rows of a union.
pub fn union_rows(u: &IntervalUnion) -> Vec<Vec<String>> {
    u.parts()
        .iter()
        .map(|p| {
            vec![
                crate::rational::format(&p.lo),
                crate::rational::format(&p.hi),
                p.lo_closed.to_string(),
                p.hi_closed.to_string(),
            ]
        })
        .collect()
}
