//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys are case-sensitive,
//! duplicated keys are rejected, and every lookup reports the offending key
//! on a parse failure.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                key: format!("line {}", lineno + 1),
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config {
                    key: format!("line {}", lineno + 1),
                    message: "empty key".into(),
                });
            }
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::Config {
                    key,
                    message: "duplicated".into(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            key: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Parse `key` with `FromStr`; `Ok(None)` when absent.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| Error::Config {
                    key: key.to_string(),
                    message: format!("{v:?}: {e}"),
                })
            })
            .transpose()
    }

    /// Fails on the first key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::Config {
                key: k.to_string(),
                message: "unknown key".into(),
            }),
            None => Ok(()),
        }
    }
}

/// Inclusive integer range `a:b` or a single value `a`.
pub fn parse_range(s: &str) -> std::result::Result<Vec<i64>, String> {
    let s = s.trim();
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {a}:{b}"));
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![parse(s)?]),
    }
}
