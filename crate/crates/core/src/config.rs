//! `key = value` parameter files.
//!
//! Lines are UTF-8, `#` starts a comment, blank lines are ignored. Keys not
//! present in a file keep the value of the base parameters the file is
//! applied to. Unknown keys are rejected.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::types::{Culture, ModelParams};

pub const KEYS: &[&str] = &[
    "mixing",
    "mixing_jitter",
    "basic.p_incumbent",
    "basic.q_repeat",
    "basic.mean_team_size",
    "basic.team_size_jitter",
    "clinical.p_incumbent",
    "clinical.q_repeat",
    "clinical.mean_team_size",
    "clinical.team_size_jitter",
    "team_culture_weight_basic",
    "max_downtime",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("{location}unknown key `{key}`")]
    UnknownKey { location: String, key: String },
    #[error("{location}invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        location: String,
        key: String,
        value: String,
        reason: String,
    },
}

fn parse_value<T: FromStr>(key: &str, value: &str, location: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue {
        location: location.to_string(),
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

impl ModelParams {
    /// Sets a single canonical key. `location` prefixes error messages.
    fn set_at(&mut self, key: &str, value: &str, location: &str) -> Result<(), ConfigError> {
        if let Some((prefix, field)) = key.split_once('.') {
            let culture: Culture = prefix.parse().map_err(|_| ConfigError::UnknownKey {
                location: location.to_string(),
                key: key.to_string(),
            })?;
            let cp = &mut self.per_culture[culture];
            match field {
                "p_incumbent" => cp.p_incumbent = parse_value(key, value, location)?,
                "q_repeat" => cp.q_repeat = parse_value(key, value, location)?,
                "mean_team_size" => cp.mean_team_size = parse_value(key, value, location)?,
                "team_size_jitter" => cp.team_size_jitter = parse_value(key, value, location)?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        location: location.to_string(),
                        key: key.to_string(),
                    })
                }
            }
            return Ok(());
        }
        match key {
            "mixing" => self.mixing = parse_value(key, value, location)?,
            "mixing_jitter" => self.mixing_jitter = parse_value(key, value, location)?,
            "team_culture_weight_basic" => {
                self.team_culture_weight_basic = parse_value(key, value, location)?
            }
            "max_downtime" => self.max_downtime = parse_value(key, value, location)?,
            "seed" => self.seed = parse_value(key, value, location)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    location: location.to_string(),
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set_at(key.trim(), value.trim(), "")
    }

    /// Applies a config file's settings on top of `self`. Later lines win.
    pub fn apply_config(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    text: raw.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    text: raw.to_string(),
                });
            }
            self.set_at(key, value, &format!("line {line_no}: "))?;
        }
        Ok(())
    }

    /// Parses a config file over the built-in defaults.
    pub fn from_config(text: &str) -> Result<ModelParams, ConfigError> {
        let mut p = ModelParams::default();
        p.apply_config(text)?;
        Ok(p)
    }

    /// Serializes every canonical key in a fixed order.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mixing = {}", self.mixing);
        let _ = writeln!(out, "mixing_jitter = {}", self.mixing_jitter);
        for (culture, cp) in self.per_culture.iter() {
            let _ = writeln!(out, "{culture}.p_incumbent = {}", cp.p_incumbent);
            let _ = writeln!(out, "{culture}.q_repeat = {}", cp.q_repeat);
            let _ = writeln!(out, "{culture}.mean_team_size = {}", cp.mean_team_size);
            let _ = writeln!(out, "{culture}.team_size_jitter = {}", cp.team_size_jitter);
        }
        let _ = writeln!(out, "team_culture_weight_basic = {}", self.team_culture_weight_basic);
        let _ = writeln!(out, "max_downtime = {}", self.max_downtime);
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }
}

/// Splits a `--set key=value` argument.
pub fn parse_override(arg: &str) -> Result<(String, String), ConfigError> {
    match arg.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Syntax {
            line: 0,
            text: arg.to_string(),
        }),
    }
}
