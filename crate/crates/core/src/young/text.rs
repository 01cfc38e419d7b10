//! Text form of Young-function families.
//!
//! ```text
//! power:p=2            linlog:k=1            powerlog:p=1.5,k=2
//! prec:base=<spec>,r=0.5                     scaled:base=<spec>,r=1.5
//! ```
//!
//! Every form accepts a trailing `,c=<coef>` multiplying the function.

use std::str::FromStr;

use super::{Family, YoungFunction};
use crate::error::{Error, Result};

fn bad(spec: &str, why: &str) -> Error {
    Error::Config(format!("bad Young function spec `{spec}`: {why}"))
}

fn parse_num(spec: &str, key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| bad(spec, &format!("`{key}` is not a number: `{v}`")))
}

fn leaf_params<'a>(spec: &str, rest: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    rest.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(spec, &format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn take(spec: &str, params: &[(&str, &str)], key: &str) -> Result<Option<f64>> {
    match params.iter().find(|(k, _)| *k == key) {
        Some((_, v)) => Ok(Some(parse_num(spec, key, v)?)),
        None => Ok(None),
    }
}

fn ensure_known(spec: &str, params: &[(&str, &str)], allowed: &[&str]) -> Result<()> {
    for (k, _) in params {
        if !allowed.contains(k) {
            return Err(bad(spec, &format!("unknown key `{k}`")));
        }
    }
    Ok(())
}

fn apply_coef(f: YoungFunction, c: Option<f64>) -> Result<YoungFunction> {
    match c {
        Some(c) if c != 1.0 => f.with_coef(c),
        _ => Ok(f),
    }
}

impl YoungFunction {
    /// Parse the text form.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (tag, rest) = spec
            .split_once(':')
            .ok_or_else(|| bad(spec, "missing `family:` prefix"))?;
        match tag {
            "power" | "linlog" | "powerlog" => {
                let params = leaf_params(spec, rest)?;
                let c = take(spec, &params, "c")?;
                let f = match tag {
                    "power" => {
                        ensure_known(spec, &params, &["p", "c"])?;
                        let p = take(spec, &params, "p")?.ok_or_else(|| bad(spec, "missing p"))?;
                        YoungFunction::power(p)?
                    }
                    "linlog" => {
                        ensure_known(spec, &params, &["k", "c"])?;
                        let k = take(spec, &params, "k")?.ok_or_else(|| bad(spec, "missing k"))?;
                        YoungFunction::linear_log(k)?
                    }
                    _ => {
                        ensure_known(spec, &params, &["p", "k", "c"])?;
                        let p = take(spec, &params, "p")?.ok_or_else(|| bad(spec, "missing p"))?;
                        let k = take(spec, &params, "k")?.ok_or_else(|| bad(spec, "missing k"))?;
                        YoungFunction::power_log(p, k)?
                    }
                };
                apply_coef(f, c)
            }
            "prec" | "scaled" => {
                let body = rest
                    .strip_prefix("base=")
                    .ok_or_else(|| bad(spec, "composite family must start with base="))?;
                let (base, tail) = body
                    .rsplit_once(",r=")
                    .ok_or_else(|| bad(spec, "composite family needs a trailing r="))?;
                let (r_str, c) = match tail.split_once(",c=") {
                    Some((r, c)) => (r, Some(parse_num(spec, "c", c)?)),
                    None => (tail, None),
                };
                let r = parse_num(spec, "r", r_str)?;
                let base = YoungFunction::parse_spec(base)?;
                let f = if tag == "prec" {
                    YoungFunction::pre_composed(&base, r)?
                } else {
                    YoungFunction::power_scaled(&base, r)?
                };
                apply_coef(f, c)
            }
            other => Err(bad(spec, &format!("unknown family `{other}`"))),
        }
    }

    /// Text form; custom functions have none.
    pub fn to_spec(&self) -> Result<String> {
        let body = match self.family() {
            Family::Power { p } => format!("power:p={p}"),
            Family::LinearLog { k } => format!("linlog:k={k}"),
            Family::PowerLog { p, k } => format!("powerlog:p={p},k={k}"),
            Family::PreComposed { base, r } => format!("prec:base={},r={r}", base.to_spec()?),
            Family::PowerScaled { base, r } => format!("scaled:base={},r={r}", base.to_spec()?),
            Family::Custom { name, .. } => {
                return Err(Error::Config(format!("custom function `{name}` has no text form")))
            }
        };
        if self.coef() == 1.0 {
            Ok(body)
        } else {
            Ok(format!("{body},c={}", self.coef()))
        }
    }
}

impl FromStr for YoungFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        YoungFunction::parse_spec(s)
    }
}
