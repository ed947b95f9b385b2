//! `key = value` experiment config files.
//!
//! ```text
//! # default-scale uniform sweep
//! n = 96
//! m = 32
//! p = 8
//! k_list = 4
//! me_list = 0, 8, 16, 24, 32, 40, 48, 56
//! snr_db_list = 10, 15, 20
//! dist = uniform
//! trials = 500
//! master_seed = 42
//! noise_mode = subsample
//! arms = traditional_short, proposed, bound_long
//! ```
//!
//! Keys are the [`ExperimentConfig`] field names; omitted keys keep their
//! defaults. Lists are comma-separated and `#` starts a comment.

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use crate::evaluation::ExperimentConfig;
use crate::{Error, Result};

fn config_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| config_err(key, format!("cannot parse `{value}`: {e}")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(key, s))
        .collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(
                line,
                format!("line {}: expected `key = value`", lineno + 1),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(config_err(key, "given more than once"));
        }
        match key {
            "n" => cfg.n = scalar(key, value)?,
            "m" => cfg.m = scalar(key, value)?,
            "p" => cfg.p = scalar(key, value)?,
            "k_list" => cfg.k_list = list(key, value)?,
            "me_list" => cfg.me_list = list(key, value)?,
            "snr_db_list" => cfg.snr_db_list = list(key, value)?,
            "dist" => cfg.dist = scalar(key, value)?,
            "trials" => cfg.trials = scalar(key, value)?,
            "master_seed" => cfg.master_seed = scalar(key, value)?,
            "noise_mode" => cfg.noise_mode = scalar(key, value)?,
            "arms" => cfg.arms = list(key, value)?,
            other => return Err(config_err(other, "unknown key")),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err("<file>", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
