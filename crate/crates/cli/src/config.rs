//! Experiment configuration: a flat `key = value` file with optional
//! `[section]` headers, a one-line `--spec` shorthand, and command-line
//! overrides, merged in that order.
//!
//! Common keys (valid in any section): `p`, `k`, `field`, `variety`, `g`,
//! `n`, `cap`, `max_qn`, `out`, `format`. Everything else is a subcommand
//! option and is checked against the subcommand's list.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use ffartin::expr::parse_field_spec;

/// A configuration problem; reported with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<ffartin::Error> for ConfigError {
    fn from(e: ffartin::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Raw settings before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const COMMON: &[&str] = &["p", "k", "field", "variety", "g", "n", "cap", "max_qn", "out", "format"];

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return err(format!("empty key in {key}={value}"));
        }
        if key == "field" {
            let (p, k) = parse_field_spec(value)?;
            self.values.insert("p".into(), p.to_string());
            self.values.insert("k".into(), k.to_string());
        } else {
            self.values.insert(key.to_string(), value.to_string());
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Reads a config file. Sections only group keys; `#` and `;` start
    /// comment lines.
    pub fn read_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return err(format!("line {}: malformed section header {line:?}", i + 1));
                }
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Reads the shorthand `p=2; P1; g=t; n=1..6`. A token without `=` names
    /// the variety.
    pub fn read_spec(&mut self, spec: &str) -> Result<(), ConfigError> {
        for token in spec.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let is_variety = token.starts_with("curve") || !token.contains('=');
            if is_variety {
                self.set("variety", token)?;
            } else if token.starts_with('p') && token.contains(',') {
                self.set("field", token)?;
            } else {
                let (k, v) = token.split_once('=').expect("checked above");
                self.set(k, v)?;
            }
        }
        Ok(())
    }

    pub fn options(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values
            .iter()
            .filter(|(k, _)| !COMMON.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Parses `3`, `1..6`, `1..=6` or `1,2,5` into a nonempty list.
pub fn parse_n_range(src: &str) -> Result<Vec<u32>, ConfigError> {
    let src = src.trim();
    let num = |s: &str| -> Result<u32, ConfigError> {
        s.trim()
            .parse::<u32>()
            .map_err(|_| ConfigError(format!("bad n value {s:?} in {src:?}")))
    };
    let out: Vec<u32> = if let Some((a, b)) = src.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        (a..=b).collect()
    } else if src.is_empty() {
        Vec::new()
    } else {
        src.split(',').map(num).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return err(format!("n range {src:?} is empty"));
    }
    if out.contains(&0) {
        return err("n must be >= 1");
    }
    Ok(out)
}

fn parse_u64(key: &str, v: &str) -> Result<u64, ConfigError> {
    let cleaned: String = v.chars().filter(|&c| c != '_').collect();
    cleaned
        .trim()
        .parse::<u64>()
        .map_err(|_| ConfigError(format!("{key}: expected a nonnegative integer, got {v:?}")))
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub p: u64,
    pub k: u32,
    pub variety: String,
    pub g: Option<String>,
    pub n: Vec<u32>,
    /// Maximum number of points or candidates enumerated.
    pub cap: u64,
    /// Optional separate bound on `q^n`.
    pub max_qn: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub options: BTreeMap<String, String>,
}

pub const DEFAULT_CAP: u64 = ffartin::DEFAULT_CAP;

impl ExperimentConfig {
    /// Validates `s` for a subcommand accepting the option keys `allowed`.
    /// `need_g` and `need_n` say which common keys are mandatory.
    pub fn from_settings(
        s: &Settings,
        allowed: &[&str],
        need_g: bool,
        need_n: bool,
    ) -> Result<Self, ConfigError> {
        let p = match s.get("p") {
            Some(v) => parse_u64("p", v)?,
            None if need_g || need_n => return err("missing field: set p (and optionally k)"),
            None => 2,
        };
        let k = match s.get("k") {
            Some(v) => parse_u64("k", v)? as u32,
            None => 1,
        };
        let n = match s.get("n") {
            Some(v) => parse_n_range(v)?,
            None if need_n => return err("missing n range"),
            None => vec![1],
        };
        let cap = match s.get("cap") {
            Some(v) => parse_u64("cap", v)?,
            None => DEFAULT_CAP,
        };
        if cap == 0 {
            return err("cap must be positive");
        }
        let max_qn = match s.get("max_qn") {
            Some(v) => {
                let m = parse_u64("max_qn", v)?;
                if m == 0 {
                    return err("max_qn must be positive");
                }
                Some(m)
            }
            None => None,
        };
        let g = s.get("g").map(str::to_string);
        if need_g && g.is_none() {
            return err("missing function g");
        }
        let mut options = BTreeMap::new();
        for (key, v) in s.options() {
            if !allowed.contains(&key) {
                return err(format!(
                    "unknown option {key:?} (allowed here: {})",
                    if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
                ));
            }
            options.insert(key.to_string(), v.to_string());
        }
        Ok(ExperimentConfig {
            p,
            k,
            variety: s.get("variety").unwrap_or("P1").to_string(),
            g,
            n,
            cap,
            max_qn,
            out: s.get("out").map(PathBuf::from),
            format: s.get("format").map(str::parse).transpose()?,
            options,
        })
    }

    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.get(key).map(String::as_str)
    }

    pub fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.option(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => err(format!("{key}: expected true or false, got {v:?}")),
        }
    }

    pub fn option_u64(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        self.option(key).map_or(Ok(default), |v| parse_u64(key, v))
    }
}
