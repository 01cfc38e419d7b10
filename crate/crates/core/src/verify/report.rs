//! Experiment reports: samples, empirical constants and verdicts.

use std::fmt;

/// Whether a sample enters the empirical constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Main,
    Info,
}

impl Group {
    pub fn as_str(&self) -> &'static str {
        match self {
            Group::Main => "main",
            Group::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub case_id: String,
    pub group: Group,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `lhs/rhs`, or `None` when both sides vanish; `inf` if only `rhs` does.
pub fn ratio_of(lhs: f64, rhs: f64) -> Option<f64> {
    if lhs == 0.0 && rhs == 0.0 {
        None
    } else if rhs == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(lhs / rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A maximal field exported alongside a report.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub atoms_text: String,
    pub cubes_csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    /// Resolved parameters in the order they were read.
    pub params: Vec<(String, String)>,
    pub samples: Vec<Sample>,
    pub empirical_c: f64,
    pub empirical_c_refined: Option<f64>,
    pub refinement_drift: Option<f64>,
    pub verdict: Verdict,
    pub criterion: String,
    /// Named scalar diagnostics (condition constants, gaps, ...).
    pub extras: Vec<(String, f64)>,
    pub dump: Option<FieldDump>,
}

/// Max ratio over the main samples; 0 when there are none.
pub fn max_main_ratio(samples: &[Sample]) -> f64 {
    samples
        .iter()
        .filter(|s| s.group == Group::Main)
        .map(|s| s.ratio)
        .fold(0.0, f64::max)
}

/// `|refined - base| / base`, with `0/0 = 0`.
pub fn relative_drift(base: f64, refined: f64) -> f64 {
    if base == refined {
        0.0
    } else if base == 0.0 || !base.is_finite() || !refined.is_finite() {
        f64::INFINITY
    } else {
        (refined - base).abs() / base.abs()
    }
}

impl ExperimentReport {
    pub fn n_main(&self) -> usize {
        self.samples.iter().filter(|s| s.group == Group::Main).count()
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn params_text(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn extras_text(&self) -> String {
        self.extras
            .iter()
            .map(|(k, v)| format!("{k}={v:.11e}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Accumulates samples for one measure/family level.
#[derive(Debug, Default, Clone)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
}

impl SampleSet {
    pub fn push(&mut self, case_id: impl Into<String>, group: Group, lhs: f64, rhs: f64) {
        if let Some(ratio) = ratio_of(lhs, rhs) {
            self.samples.push(Sample {
                case_id: case_id.into(),
                group,
                lhs,
                rhs,
                ratio,
            });
        }
    }

    pub fn main(&mut self, case_id: impl Into<String>, lhs: f64, rhs: f64) {
        self.push(case_id, Group::Main, lhs, rhs);
    }

    pub fn info(&mut self, case_id: impl Into<String>, lhs: f64, rhs: f64) {
        self.push(case_id, Group::Info, lhs, rhs);
    }

    pub fn empirical_c(&self) -> f64 {
        max_main_ratio(&self.samples)
    }
}
