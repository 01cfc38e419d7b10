//! Weight specifications for the two-weight experiments.
//!
//! `one`, `dist:gamma=G` for `(|x - c| + h)^G` around the box center,
//! `wave` for `2 + cos(2π x_1 / side)`, and `maxpair`, which stands for
//! `(M_μ u)^{p/q}` and is only meaningful for `v`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maximal::{m_mu, CubeFamilySpec};
use crate::measure::{AtomicMeasure, MuFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    One,
    Dist { gamma: f64 },
    Wave,
    MaxPair,
}

impl WeightSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one" => return Ok(WeightSpec::One),
            "wave" => return Ok(WeightSpec::Wave),
            "maxpair" => return Ok(WeightSpec::MaxPair),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("dist:gamma=") {
            let gamma: f64 = rest
                .parse()
                .map_err(|_| Error::Config(format!("bad weight exponent in `{s}`")))?;
            if !gamma.is_finite() {
                return Err(Error::Config(format!("bad weight exponent in `{s}`")));
            }
            return Ok(WeightSpec::Dist { gamma });
        }
        Err(Error::Config(format!(
            "unknown weight `{s}` (expected one, dist:gamma=G, wave or maxpair)"
        )))
    }

    /// Values on `measure`. `maxpair` needs the partner weight `u` and the
    /// exponent ratio `p/q`.
    pub fn build(
        &self,
        measure: &Arc<AtomicMeasure>,
        family: &CubeFamilySpec,
        partner: Option<(&MuFunction, f64)>,
    ) -> Result<MuFunction> {
        let bbox = measure.bbox();
        let center = bbox.center();
        let side = bbox.side();
        Ok(match self {
            WeightSpec::One => MuFunction::constant(measure, 1.0),
            WeightSpec::Dist { gamma } => {
                let eps = measure.resolution();
                MuFunction::from_fn(measure, |x| {
                    let r: f64 =
                        x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    (r + eps).powf(*gamma)
                })
            }
            WeightSpec::Wave => MuFunction::from_fn(measure, |x| {
                2.0 + (std::f64::consts::TAU * (x[0] - bbox.corner()[0]) / side).cos()
            }),
            WeightSpec::MaxPair => {
                let (u, ratio) = partner.ok_or_else(|| {
                    Error::Config("`maxpair` is only available for the weight v".into())
                })?;
                m_mu(u, family)?.values.powf(ratio)
            }
        })
    }
}
