//! Flat `key = value` run configuration, merged with command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<platelab::Error> for ConfigError {
    fn from(e: platelab::Error) -> Self {
        ConfigError(e.to_string())
    }
}

/// Where a value came from, for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Flag,
    File { line: usize },
}

/// Keys are stored with `_` folded to `-`, so `sigma_grid` and
/// `sigma-grid` are the same key.
pub fn normalize_key(k: &str) -> String {
    k.trim().replace('_', "-")
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, (String, usize)>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError(format!("config line {}: expected `key = value`", i + 1)));
        };
        let key = normalize_key(k);
        if key.is_empty() {
            return Err(ConfigError(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), (v.trim().to_string(), i + 1)).is_some() {
            return Err(ConfigError(format!("config line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(out)
}

/// Resolved parameters of one command.
#[derive(Debug, Default)]
pub struct Params {
    values: BTreeMap<String, (String, Source)>,
}

impl Params {
    /// Flags override the file. Keys in the file that the command does not
    /// know are rejected.
    pub fn merge(
        known: &[&str],
        file: BTreeMap<String, (String, usize)>,
        flags: BTreeMap<String, String>,
    ) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (k, (v, line)) in file {
            if !known.contains(&k.as_str()) {
                return Err(ConfigError(format!("config line {line}: unknown key `{k}` for this command")));
            }
            values.insert(k, (v, Source::File { line }));
        }
        for (k, v) in flags {
            values.insert(k, (v, Source::Flag));
        }
        Ok(Self { values })
    }

    fn locate(&self, key: &str) -> String {
        match self.values.get(key).map(|v| &v.1) {
            Some(Source::File { line }) => format!("`{key}` (config line {line})"),
            _ => format!("--{key}"),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|v| v.0.as_str())
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    pub fn err(&self, key: &str, msg: impl fmt::Display) -> ConfigError {
        ConfigError(format!("{}: {msg}", self.locate(key)))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| self.err(key, format!("cannot parse `{v}`"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| self.err(key, format!("cannot parse `{s}` as a number"))))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    /// Positive finite number.
    pub fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v: f64 = self.get_or(key, default)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(self.err(key, "must be positive and finite"));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = parse_config("# run\nbc = clamped\nn=40 # nodes\nsigma_grid = 0:10:1\n").unwrap();
        let mut flags = BTreeMap::new();
        flags.insert("n".to_string(), "80".to_string());
        let p = Params::merge(&["bc", "n", "sigma-grid"], file, flags).unwrap();
        assert_eq!(p.raw("bc"), Some("clamped"));
        assert_eq!(p.get::<usize>("n").unwrap(), Some(80));
        assert_eq!(p.raw("sigma-grid"), Some("0:10:1"));
    }

    #[test]
    fn diagnostics_name_the_line() {
        let e = parse_config("bc = clamped\nnonsense\n").unwrap_err();
        assert!(e.0.contains("line 2"), "{e}");
        let file = parse_config("n = forty\n").unwrap();
        let p = Params::merge(&["n"], file, BTreeMap::new()).unwrap();
        let e = p.get::<usize>("n").unwrap_err();
        assert!(e.0.contains("config line 1"), "{e}");
        let file = parse_config("colour = red\n").unwrap();
        assert!(Params::merge(&["n"], file, BTreeMap::new()).is_err());
        assert!(parse_config("n = 1\nn = 2\n").is_err());
    }
}
