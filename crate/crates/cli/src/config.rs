//! Option resolution: command-line flag, then config file, then default.
//! Every resolved value is recorded so the report carries its own run config.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use cantor_nest::rational::{self, Rational};
use serde_json::{Map, Value};

use crate::CliError;

pub trait ConfigValue: Sized {
    fn from_json(v: &Value) -> Option<Self>;
    fn to_json(&self) -> Value;
}

impl ConfigValue for u32 {
    fn from_json(v: &Value) -> Option<Self> {
        v.as_u64().and_then(|x| u32::try_from(x).ok())
    }
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
}

impl ConfigValue for u64 {
    fn from_json(v: &Value) -> Option<Self> {
        v.as_u64()
    }
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
}

impl ConfigValue for usize {
    fn from_json(v: &Value) -> Option<Self> {
        v.as_u64().and_then(|x| usize::try_from(x).ok())
    }
    fn to_json(&self) -> Value {
        Value::from(*self as u64)
    }
}

impl ConfigValue for bool {
    fn from_json(v: &Value) -> Option<Self> {
        v.as_bool()
    }
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
}

impl ConfigValue for String {
    fn from_json(v: &Value) -> Option<Self> {
        v.as_str().map(str::to_owned)
    }
    fn to_json(&self) -> Value {
        Value::from(self.as_str())
    }
}

impl ConfigValue for PathBuf {
    fn from_json(v: &Value) -> Option<Self> {
        v.as_str().map(PathBuf::from)
    }
    fn to_json(&self) -> Value {
        Value::from(self.to_string_lossy().into_owned())
    }
}

impl ConfigValue for Rational {
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => rational::parse(s).ok(),
            Value::Number(n) => n.as_i64().map(rational::int),
            _ => None,
        }
    }
    fn to_json(&self) -> Value {
        Value::from(rational::format(self))
    }
}

impl ConfigValue for Value {
    fn from_json(v: &Value) -> Option<Self> {
        Some(v.clone())
    }
    fn to_json(&self) -> Value {
        self.clone()
    }
}

pub struct Resolver {
    command: String,
    file: Map<String, Value>,
    used: BTreeSet<String>,
    resolved: Map<String, Value>,
}

impl Resolver {
    pub fn new(command: &str, config: Option<&Path>) -> Result<Self, CliError> {
        let file = match config {
            None => Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::usage(format!("config {}: {e}", p.display())))?;
                match serde_json::from_str(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::usage(format!("config {}: expected a JSON object", p.display()))),
                    Err(e) => return Err(CliError::usage(format!("config {}: {e}", p.display()))),
                }
            }
        };
        if let Some(c) = file.get("command") {
            if c.as_str() != Some(command) {
                return Err(CliError::usage(format!("config is for command {c}, not {command:?}")));
            }
        }
        let mut resolved = Map::new();
        resolved.insert("command".into(), Value::from(command));
        Ok(Resolver {
            command: command.into(),
            file,
            used: BTreeSet::new(),
            resolved,
        })
    }

    pub fn opt<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        self.used.insert(key.into());
        let v = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                None | Some(Value::Null) => None,
                Some(v) => Some(
                    T::from_json(v)
                        .ok_or_else(|| CliError::usage(format!("config key {key:?}: unexpected value {v}")))?,
                ),
            },
        };
        if let Some(v) = &v {
            self.resolved.insert(key.into(), v.to_json());
        }
        Ok(v)
    }

    pub fn or<T: ConfigValue>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.into(), v.to_json());
        Ok(v)
    }

    pub fn required<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.opt(key, flag)?
            .ok_or_else(|| CliError::usage(format!("{}: --{key} is required", self.command)))
    }

    /// A switch counts as set when given on the command line or set in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        self.or(key, flag.then_some(true), false)
    }

    /// Rejects config keys no option of this command consumed.
    pub fn finish(self) -> Result<Map<String, Value>, CliError> {
        let unknown: Vec<&String> = self
            .file
            .keys()
            .filter(|k| *k != "command" && !self.used.contains(*k))
            .collect();
        if !unknown.is_empty() {
            return Err(CliError::usage(format!("unknown config keys for {}: {unknown:?}", self.command)));
        }
        Ok(self.resolved)
    }
}
