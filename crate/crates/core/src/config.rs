//! Flat `key=value` configuration with dotted section paths.
//!
//! ```text
//! # comment
//! seed=7
//! measure.kind=cantor
//! measure.levels=8
//! young.B=linlog:k=1
//! exp.id=weak_modular,a1
//! weak_modular.alpha_over_n=0.25
//! ```
//!
//! Experiment parameters are looked up as `<experiment>.<key>` first, then
//! `exp.<key>`. A value of the form `+N` on a numeric key is relative: it is
//! added to the existing value, or to the derived default when the key is
//! unset (`family.k_max=+1`).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn valid_key(key: &str) -> Option<usize> {
    key.char_indices()
        .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_' || *c == '.'))
        .map(|(i, _)| i)
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            if content.trim().is_empty() {
                continue;
            }
            let lead = content.len() - content.trim_start().len();
            let Some(eq) = content.find('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    column: lead + 1,
                    message: "expected `key=value`".into(),
                });
            };
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    column: eq + 1,
                    message: "empty key".into(),
                });
            }
            if let Some(bad) = valid_key(key) {
                return Err(Error::Parse {
                    line: line_no,
                    column: lead + bad + 1,
                    message: format!("invalid character in key `{key}`"),
                });
            }
            let value = content[eq + 1..].trim();
            if value.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    column: eq + 2,
                    message: format!("missing value for `{key}`"),
                });
            }
            if cfg.entries.contains_key(key) {
                return Err(Error::Parse {
                    line: line_no,
                    column: lead + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
            cfg.entries.insert(key.to_string(), value.to_string());
        }
        Ok(cfg)
    }

    /// Sorted `key=value` lines; parses back to the same config.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key.is_empty() || valid_key(key).is_some() {
            return Err(Error::Config(format!("invalid key `{key}`")));
        }
        if value.trim().is_empty() || value.contains('#') || value.contains('\n') {
            return Err(Error::Config(format!("invalid value `{value}` for `{key}`")));
        }
        self.entries.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// Apply `KEY=VAL`; `+N` adds to an existing numeric value.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{spec}` must look like KEY=VAL")))?;
        let key = key.trim();
        let value = value.trim();
        if let Some(delta) = value.strip_prefix('+') {
            let delta = parse_number(delta)
                .map_err(|_| Error::Config(format!("bad relative override `{spec}`")))?;
            match self.get(key) {
                Some(old) if old.starts_with('+') => {
                    let base = parse_number(&old[1..])?;
                    return self.set(key, &format!("+{}", base + delta));
                }
                Some(old) => {
                    let base = parse_number(old).map_err(|_| {
                        Error::Config(format!("cannot add to non-numeric `{key}={old}`"))
                    })?;
                    return self.set(key, &format_number(base + delta));
                }
                None => return self.set(key, &format!("+{}", format_number(delta))),
            }
        }
        self.set(key, value)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Experiment ids from `exp.id` (comma separated).
    pub fn experiment_ids(&self) -> Vec<String> {
        self.get("exp.id")
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                parse_number(v).map_err(|_| Error::Config(format!("`{key}={v}` is not a number")))
            })
            .transpose()
    }

    pub fn integer(&self, key: &str) -> Result<Option<i64>> {
        match self.number(key)? {
            Some(x) if x.fract() == 0.0 && x.abs() < 9e15 => Ok(Some(x as i64)),
            Some(x) => Err(Error::Config(format!("`{key}={x}` is not an integer"))),
            None => Ok(None),
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Plain float or `a^b` (e.g. `2^-9`).
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("`{s}` is not a number"));
    let v = match s.split_once('^') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a.powf(b)
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_nan() {
        return Err(bad());
    }
    Ok(v)
}

fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = "# smoke\nseed = 7\nmeasure.kind=cantor  # inline\n\nyoung.B=powerlog:p=1.5,k=2\n";
        let cfg = Config::parse(text).unwrap();
        assert_eq!(cfg.get("seed"), Some("7"));
        assert_eq!(cfg.get("measure.kind"), Some("cantor"));
        assert_eq!(cfg.get("young.B"), Some("powerlog:p=1.5,k=2"));
        assert_eq!(Config::parse(&cfg.serialize()).unwrap(), cfg);
    }

    #[test]
    fn parse_errors_carry_position() {
        match Config::parse("seed=1\n  novalue\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match Config::parse("a=1\na b=2\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Config::parse("a=\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Config::parse("a=1\na=2\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn relative_overrides() {
        let mut cfg = Config::parse("family.k_max=9\n").unwrap();
        cfg.apply_override("family.k_max=+1").unwrap();
        assert_eq!(cfg.get("family.k_max"), Some("10"));
        cfg.apply_override("family.k_min=+2").unwrap();
        assert_eq!(cfg.get("family.k_min"), Some("+2"));
        cfg.apply_override("family.k_min=+1").unwrap();
        assert_eq!(cfg.get("family.k_min"), Some("+3"));
        cfg.apply_override("young.B=power:p=2").unwrap();
        assert_eq!(cfg.get("young.B"), Some("power:p=2"));
        assert!(cfg.apply_override("novalue").is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("2^-9").unwrap(), 2f64.powi(-9));
        assert_eq!(parse_number(" 0.25 ").unwrap(), 0.25);
        assert!(parse_number("two").is_err());
        let cfg = Config::parse("exp.id=a1, lp_bounds ,\nk=3\n").unwrap();
        assert_eq!(cfg.experiment_ids(), vec!["a1", "lp_bounds"]);
        assert_eq!(cfg.integer("k").unwrap(), Some(3));
    }
}
