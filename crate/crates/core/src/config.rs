//! Run configuration shared by every front end, read from `key = value` text.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::MAX_LEVEL;
use crate::oracle::cantor::MAX_DEPTH;
use crate::oracle::DEFAULT_CANTOR_DEPTH;
use crate::peano::MAX_ORDER;
use crate::refine::TraceConfig;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const MAX_SAMPLES: usize = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Oracle name; each command has its own default.
    pub function: Option<String>,
    pub k_start: u32,
    pub k_max: u32,
    pub prune: bool,
    pub seed: u64,
    pub samples: usize,
    pub out: PathBuf,
    pub curve_order: Option<u32>,
    pub claimed_set: Option<PathBuf>,
    pub cantor_depth: u32,
    pub param_dims: u32,
    /// Tabulated oracle file; replaces `function` when set.
    pub table: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let trace = TraceConfig::default();
        RunConfig {
            function: None,
            k_start: trace.k_start,
            k_max: trace.k_max,
            prune: trace.prune,
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            out: PathBuf::from("out"),
            curve_order: None,
            claimed_set: None,
            cantor_depth: DEFAULT_CANTOR_DEPTH,
            param_dims: 1,
            table: None,
        }
    }
}

pub const KEYS: [&str; 12] = [
    "function",
    "k_start",
    "k_max",
    "prune",
    "seed",
    "samples",
    "out",
    "curve_order",
    "claimed_set",
    "cantor_depth",
    "param_dims",
    "table",
];

impl RunConfig {
    /// Parse a config file on top of the defaults. Blank lines and `#`
    /// comments are skipped; dashes in keys are read as underscores.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            config.set(key.trim(), value.trim()).map_err(|e| Error::Parse { line: n + 1, message: e.to_string() })?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Assign one key. Unknown keys are rejected by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key_norm = key.replace('-', "_");
        let bad = |what: &str| Error::InvalidArgument(format!("key `{key}`: expected {what}, found `{value}`"));
        match key_norm.as_str() {
            "function" => self.function = Some(value.to_string()),
            "k_start" => self.k_start = value.parse().map_err(|_| bad("an integer"))?,
            "k_max" => self.k_max = value.parse().map_err(|_| bad("an integer"))?,
            "prune" => {
                self.prune = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad("a boolean")),
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("an unsigned integer"))?,
            "samples" => self.samples = value.parse().map_err(|_| bad("an unsigned integer"))?,
            "out" => self.out = PathBuf::from(value),
            "curve_order" => self.curve_order = Some(value.parse().map_err(|_| bad("an integer"))?),
            "claimed_set" => self.claimed_set = Some(PathBuf::from(value)),
            "cantor_depth" => self.cantor_depth = value.parse().map_err(|_| bad("an integer"))?,
            "param_dims" => self.param_dims = value.parse().map_err(|_| bad("an integer"))?,
            "table" => self.table = Some(PathBuf::from(value)),
            _ => return Err(Error::InvalidArgument(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.trace_config().validate()?;
        let range = |name: &str, v: u64, lo: u64, hi: u64| {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be in {lo}..={hi}, got {v}")))
            }
        };
        range("samples", self.samples as u64, 1, MAX_SAMPLES as u64)?;
        range("cantor_depth", self.cantor_depth.into(), 1, MAX_DEPTH.into())?;
        range("param_dims", self.param_dims.into(), 1, 2)?;
        if let Some(m) = self.curve_order {
            range("curve_order", m.into(), 1, MAX_ORDER.into())?;
            if 2 * m > MAX_LEVEL {
                return Err(Error::InvalidArgument(format!(
                    "curve_order {m} needs trace level {} > {MAX_LEVEL}",
                    2 * m
                )));
            }
        }
        if self.function.as_deref() == Some("") {
            return Err(Error::InvalidArgument("function must not be empty".into()));
        }
        Ok(())
    }

    pub fn function_or<'a>(&'a self, default: &'a str) -> &'a str {
        self.function.as_deref().unwrap_or(default)
    }

    pub fn trace_config(&self) -> TraceConfig {
        TraceConfig { k_start: self.k_start, k_max: self.k_max, prune: self.prune }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides_defaults() {
        let c =
            RunConfig::parse("# run\nfunction = example2\nk-max = 6 # deep enough\nprune=false\nseed = 7\n").unwrap();
        assert_eq!(c.function_or("x"), "example2");
        assert_eq!(c.k_max, 6);
        assert!(!c.prune);
        assert_eq!(c.seed, 7);
        assert_eq!(c.k_start, 2);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse("k_max = 5\nkmax = 6\n").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("`kmax`"), "{err}");
    }

    #[test]
    fn bounds_are_checked() {
        assert!(RunConfig::parse("k_max = 31").is_err());
        assert!(RunConfig::parse("k_start = 5\nk_max = 4").is_err());
        assert!(RunConfig::parse("samples = 0").is_err());
        assert!(RunConfig::parse("param_dims = 3").is_err());
        assert!(RunConfig::parse("prune = maybe").is_err());
        assert!(RunConfig::parse("just words").is_err());
    }
}
