//! Flat `key = value` configuration files.
//!
//! Every key mirrors the long name of the command-line flag it backs; flags
//! win over file values, file values win over defaults, so a run is fully
//! captured by one small artifact plus any overrides.

use crate::error::{CliError, Result};
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "line {}: expected key=value, got {raw:?}",
                    lineno + 1
                ));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::input(format!("config key {key}={raw}: {e}"))),
        }
    }

    /// Flag value if given, else config value, else default.
    pub fn resolve<T: FromStr + Clone>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(flag.or(self.get(key)?).unwrap_or(default))
    }

    /// Same, but without a default.
    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        Ok(flag.or(self.get(key)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let cfg = ConfigFile::parse("# comment\nalpha = 0.01\n\nshuffles=500\n").unwrap();
        assert_eq!(cfg.get::<f64>("alpha").unwrap(), Some(0.01));
        assert_eq!(cfg.get::<usize>("shuffles").unwrap(), Some(500));
        assert_eq!(cfg.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn flags_beat_config_beat_default() {
        let cfg = ConfigFile::parse("alpha=0.01").unwrap();
        assert_eq!(cfg.resolve(Some(0.2), "alpha", 0.05).unwrap(), 0.2);
        assert_eq!(cfg.resolve(None, "alpha", 0.05).unwrap(), 0.01);
        assert_eq!(cfg.resolve::<f64>(None, "beta", 0.05).unwrap(), 0.05);
    }

    #[test]
    fn malformed_line_is_reported() {
        let err = ConfigFile::parse("just words").unwrap_err();
        assert!(err.contains("line 1"));
    }
}
