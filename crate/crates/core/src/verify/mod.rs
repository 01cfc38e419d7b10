//! Experiments: one per inequality or counterexample.
//!
//! Each experiment reads its parameters from a [`Config`], runs its
//! hypothesis checks first, then sweeps seeded test functions on the base
//! measure and on one refinement (half the resolution or one more Cantor
//! level, one more cube generation). The report carries the empirical
//! constant of both runs and their relative drift.
//!
//! Parameters are looked up as `<id>.<key>`, then `exp.<key>`; Young
//! functions additionally fall back to `young.<key>`. Measure and family
//! keys (`measure.*`, `family.*`) are shared by all experiments.

mod ahlfors;
mod norms;
mod pointwise;
pub mod report;
mod scalar;
pub mod testfn;
pub mod weights;

use std::fmt::Display;
use std::sync::{Arc, Mutex};

use crate::config::Config;
use crate::cubes::Cube;
use crate::error::{Error, Result};
use crate::maximal::CubeFamilySpec;
use crate::measure::{build_cantor, build_gaussian_1d, build_lebesgue, AtomicMeasure};
use crate::young::YoungFunction;

pub use report::{ExperimentReport, FieldDump, Group, Sample, SampleSet, Verdict};
pub use pointwise::{pointwise_exponents, threshold_grid};
pub use scalar::{gaussian_average, tail_integral};
pub use testfn::TestFunction;

/// Default relative drift allowed under one refinement step.
pub const DRIFT_LIMIT: f64 = 0.25;

pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
    /// The inequality or identity under test.
    pub statement: &'static str,
    run: fn(&Context) -> Result<ExperimentReport>,
}

static REGISTRY: [ExperimentInfo; 9] = [
    ExperimentInfo {
        id: "weak_modular",
        summary: "modular weak-type bound for M_{alpha,B} with phi_1(s) = s / h_B(s^{alpha/n})",
        statement: "phi_1(mu{M_{alpha,B} f > t}) <= C int B(|f|/t) dmu",
        run: pointwise::weak_modular,
    },
    ExperimentInfo {
        id: "two_weight",
        summary: "two-weight strong type for M_{alpha,B} under the cube testing condition",
        statement: "||M_{alpha,B} f||_{L^q(u)} <= C ||f||_{L^p(v)} when l(Q)^{alpha-n/p} u(3Q)^{1/q} ||v^{-1/p}||_{A,Q} <= K",
        run: norms::two_weight,
    },
    ExperimentInfo {
        id: "condition_wtl",
        summary: "testing condition for the mu(5Q)-normalized fractional maximal operator",
        statement: "sup_Q l(Q)^{n(1-1/p)} mu(Q)^{alpha-1} u(3Q)^{1/q} ||v^{-1/p}||_{Phi,Q}, compared with sup_Q l(Q)^n / mu(Q)",
        run: ahlfors::condition_wtl,
    },
    ExperimentInfo {
        id: "pointwise_control",
        summary: "pointwise control of M_{alpha,B} by M_psi of a power of f",
        statement: "M_{alpha,B} f(x) <= C M_psi(|f|^{p/s})(x)^{1-alpha/n} (int |f|^p dmu)^{alpha/n}",
        run: pointwise::pointwise_control,
    },
    ExperimentInfo {
        id: "lp_bounds",
        summary: "L^p -> L^p bound for M_B and L^p -> L^q bound for M_{alpha,B}",
        statement: "||M_{alpha,B} f||_q <= C ||f||_p with 1/q = 1/p - alpha/n; M_{alpha,B} f <= C ||f||_{n/alpha} at p = n/alpha",
        run: norms::lp_bounds,
    },
    ExperimentInfo {
        id: "a1",
        summary: "the fractional maximal function is an A_1 weight",
        statement: "M_mu(M_alpha f)(x) <= C M_alpha f(x)",
        run: pointwise::a1,
    },
    ExperimentInfo {
        id: "bp_inheritance",
        summary: "psi(t) = phi(t^{1-alpha/n}) inherits the B_s condition",
        statement: "int_1^inf psi(t) t^{-s} dt/t < inf with s = q(1-alpha/n)",
        run: scalar::bp_inheritance,
    },
    ExperimentInfo {
        id: "gaussian_failure",
        summary: "radial averages fail to differentiate for dmu = exp(-t^2) dt",
        statement: "(2r)^{-1} int_{x-r}^{x+r} exp(theta t^2) dmu -> exp((theta-1) x^2) != exp(theta x^2)",
        run: scalar::gaussian_failure,
    },
    ExperimentInfo {
        id: "ahlfors_gap",
        summary: "weight condition with the pair (u, (M_mu u)^{p/q}) forces a two-sided growth bound",
        statement: "sup_Q of the testing expression grows with sup_Q l(Q)^n / mu(Q)",
        run: ahlfors::ahlfors_gap,
    },
];

pub fn registry() -> &'static [ExperimentInfo] {
    &REGISTRY
}

pub fn find(id: &str) -> Option<&'static ExperimentInfo> {
    REGISTRY.iter().find(|e| e.id == id)
}

const GLOBAL_KEYS: [&str; 2] = ["seed", "jobs"];
const SECTIONS: [&str; 4] = ["measure", "family", "young", "exp"];

/// Reject keys outside the known sections and unknown experiment ids.
pub fn validate_config(cfg: &Config) -> Result<()> {
    for key in cfg.keys() {
        if GLOBAL_KEYS.contains(&key) {
            continue;
        }
        let head = key.split('.').next().unwrap_or(key);
        if head == key {
            return Err(Error::Config(format!("unknown top-level key `{key}`")));
        }
        if !SECTIONS.contains(&head) && find(head).is_none() {
            return Err(Error::Config(format!("unknown section `{head}` in key `{key}`")));
        }
    }
    for id in cfg.experiment_ids() {
        if find(&id).is_none() {
            return Err(Error::UnknownExperiment(id));
        }
    }
    Ok(())
}

/// Run one experiment by id.
pub fn run_experiment(id: &str, cfg: &Config, seed: u64, dump_fields: bool) -> Result<ExperimentReport> {
    let info = find(id).ok_or_else(|| Error::UnknownExperiment(id.to_string()))?;
    let ctx = Context::new(info.id, cfg, seed, dump_fields);
    (info.run)(&ctx)
}

/// Parameter access and shared construction for one experiment run.
pub struct Context<'a> {
    pub id: &'static str,
    cfg: &'a Config,
    pub seed: u64,
    pub dump_fields: bool,
    params: Mutex<Vec<(String, String)>>,
}

impl<'a> Context<'a> {
    pub fn new(id: &'static str, cfg: &'a Config, seed: u64, dump_fields: bool) -> Self {
        Context {
            id,
            cfg,
            seed,
            dump_fields,
            params: Mutex::new(vec![("seed".into(), seed.to_string())]),
        }
    }

    /// `measure.kind`, defaulting to `lebesgue`.
    pub fn measure_kind(&self) -> &'a str {
        self.cfg.get("measure.kind").unwrap_or("lebesgue")
    }

    pub fn record(&self, key: &str, value: impl Display) {
        let mut p = self.params.lock().expect("params lock");
        if !p.iter().any(|(k, _)| k == key) {
            p.push((key.to_string(), value.to_string()));
        }
    }

    pub fn params(&self) -> Vec<(String, String)> {
        self.params.lock().expect("params lock").clone()
    }

    fn lookup(&self, key: &str) -> Option<(String, &'a str)> {
        [format!("{}.{key}", self.id), format!("exp.{key}")]
            .into_iter()
            .find_map(|k| self.cfg.get(&k).map(|v| (k, v)))
    }

    pub fn opt_num(&self, key: &str) -> Result<Option<f64>> {
        match self.lookup(key) {
            Some((k, v)) => {
                let x = crate::config::parse_number(v)
                    .map_err(|_| Error::Config(format!("`{k}={v}` is not a number")))?;
                self.record(key, x);
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    pub fn num(&self, key: &str, default: f64) -> Result<f64> {
        let x = self.opt_num(key)?.unwrap_or(default);
        self.record(key, x);
        Ok(x)
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        let x = self.num(key, default as f64)?;
        if !(x >= 1.0 && x.fract() == 0.0 && x < 1e6) {
            return Err(Error::Config(format!("`{key}` must be a positive integer, got {x}")));
        }
        Ok(x as usize)
    }

    pub fn text(&self, key: &str, default: &str) -> String {
        let v = self.lookup(key).map(|(_, v)| v).unwrap_or(default).to_string();
        self.record(key, &v);
        v
    }

    pub fn young(&self, key: &str, default: &str) -> Result<YoungFunction> {
        let spec = self
            .lookup(key)
            .map(|(_, v)| v)
            .or_else(|| self.cfg.get(&format!("young.{key}")))
            .unwrap_or(default);
        let b = YoungFunction::parse_spec(spec)
            .map_err(|e| Error::Config(format!("Young function `{key}={spec}`: {e}")))?;
        self.record(key, spec);
        Ok(b)
    }

    /// The configured measure at refinement `level` (0 = base).
    pub fn measure(&self, level: u32) -> Result<Arc<AtomicMeasure>> {
        let m = build_measure(self.cfg, level)?;
        if level == 0 {
            self.record("measure", m.label());
            self.record("d", m.dim());
            self.record("n", m.ahlfors_n());
        }
        Ok(Arc::new(m))
    }

    /// The configured cube family for `measure` at refinement `level`.
    pub fn family(&self, measure: &AtomicMeasure, level: u32) -> Result<CubeFamilySpec> {
        let fam = build_family(self.cfg, measure, level)?;
        if level == 0 {
            self.record("family", &fam);
        }
        Ok(fam)
    }

    pub fn functions(&self, measure: &Arc<AtomicMeasure>, default_count: usize) -> Result<Vec<TestFunction>> {
        let count = self.count("functions", default_count)?;
        testfn::generate(self.seed, self.id, measure, count)
    }

    /// Assemble a report from the base and refined sample sets.
    pub fn report(&self, parts: ReportParts) -> ExperimentReport {
        let c = parts.base.empirical_c();
        let c_ref = parts.refined.as_ref().map(|r| r.empirical_c());
        let drift = c_ref.map(|r| report::relative_drift(c, r));
        let verdict = match parts.verdict {
            Some(v) => v,
            None => Verdict::from_bool(c.is_finite() && drift.map_or(true, |d| d <= DRIFT_LIMIT)),
        };
        ExperimentReport {
            id: self.id.to_string(),
            params: self.params(),
            samples: parts.base.samples,
            empirical_c: c,
            empirical_c_refined: c_ref,
            refinement_drift: drift,
            verdict,
            criterion: parts.criterion,
            extras: parts.extras,
            dump: parts.dump,
        }
    }
}

/// Inputs to [`Context::report`]. With `verdict = None` the standard rule
/// applies: finite empirical constant and drift at most [`DRIFT_LIMIT`].
pub struct ReportParts {
    pub base: SampleSet,
    pub refined: Option<SampleSet>,
    pub criterion: String,
    pub verdict: Option<Verdict>,
    pub extras: Vec<(String, f64)>,
    pub dump: Option<FieldDump>,
}

impl ReportParts {
    pub fn standard(base: SampleSet, refined: SampleSet) -> Self {
        ReportParts {
            base,
            refined: Some(refined),
            criterion: format!("empirical_C finite and refinement_drift <= {DRIFT_LIMIT}"),
            verdict: None,
            extras: Vec::new(),
            dump: None,
        }
    }
}

fn cfg_num(cfg: &Config, key: &str) -> Result<Option<f64>> {
    cfg.number(key)
}

fn cfg_box(cfg: &Config, default: &str) -> Result<Cube> {
    Cube::parse(cfg.get("measure.box").unwrap_or(default))
        .map_err(|e| Error::Config(format!("measure.box: {e}")))
}

/// Build the measure described by `measure.*` at refinement `level`.
pub fn build_measure(cfg: &Config, level: u32) -> Result<AtomicMeasure> {
    let kind = cfg.get("measure.kind").unwrap_or("lebesgue");
    let refine = 2f64.powi(-(level as i32));
    let m = match kind {
        "lebesgue" => {
            let d = cfg.integer("measure.d")?.unwrap_or(1);
            if !(1..=3).contains(&d) {
                return Err(Error::Config(format!("measure.d must be 1, 2 or 3, got {d}")));
            }
            let default_box = format!("{} @ 1", vec!["0"; d as usize].join(" "));
            let bbox = cfg_box(cfg, &default_box)?;
            if bbox.dim() != d as usize {
                return Err(Error::Config("measure.box dimension differs from measure.d".into()));
            }
            let h = cfg_num(cfg, "measure.resolution")?.unwrap_or(2f64.powi(-9));
            build_lebesgue(d as usize, &bbox, h * refine)?
        }
        "gaussian" => {
            let bbox = cfg_box(cfg, "-8 @ 16")?;
            let h = cfg_num(cfg, "measure.resolution")?.unwrap_or(2f64.powi(-9));
            build_gaussian_1d(&bbox, h * refine)?
        }
        "cantor" => {
            let levels = cfg.integer("measure.levels")?.unwrap_or(8);
            if !(0..=18).contains(&levels) {
                return Err(Error::Config(format!("measure.levels must be in [0, 18], got {levels}")));
            }
            build_cantor(levels as u32 + level)?
        }
        "file" => {
            let path = cfg
                .get("measure.path")
                .ok_or_else(|| Error::Config("measure.kind=file needs measure.path".into()))?;
            AtomicMeasure::read_atoms(std::path::Path::new(path))?.0
        }
        other => {
            return Err(Error::Config(format!(
                "unknown measure.kind `{other}` (expected lebesgue, gaussian, cantor or file)"
            )))
        }
    };
    match cfg_num(cfg, "measure.n")? {
        Some(n) => m.with_ahlfors_n(n),
        None => Ok(m),
    }
}

fn resolve_generation(cfg: &Config, key: &str, default: i32) -> Result<i32> {
    match cfg.get(key) {
        None => Ok(default),
        Some(v) => {
            let (rel, body) = match v.strip_prefix('+') {
                Some(rest) => (true, rest),
                None => (false, v),
            };
            let x = crate::config::parse_number(body)?;
            if x.fract() != 0.0 || x.abs() > 1e6 {
                return Err(Error::Config(format!("`{key}={v}` is not an integer")));
            }
            Ok(if rel { default + x as i32 } else { x as i32 })
        }
    }
}

/// Cube family from `family.*`; `level` adds generations at the fine end.
pub fn build_family(cfg: &Config, measure: &AtomicMeasure, level: u32) -> Result<CubeFamilySpec> {
    let base_measure_default = CubeFamilySpec::default_for(measure);
    let k_min = resolve_generation(cfg, "family.k_min", base_measure_default.k_min)?;
    // The default k_max already follows the measure resolution, so only an
    // explicit value needs the extra refinement generations.
    let k_max = match cfg.get("family.k_max") {
        None => base_measure_default.k_max,
        Some(_) => resolve_generation(cfg, "family.k_max", base_measure_default.k_max - level as i32)? + level as i32,
    };
    let shifts = cfg.integer("family.shifts")?.unwrap_or(3);
    if !(1..=16).contains(&shifts) {
        return Err(Error::Config(format!("family.shifts must be in [1, 16], got {shifts}")));
    }
    CubeFamilySpec::new(k_min, k_max, shifts as u32, measure.bbox().clone())
}

/// Hypothesis error named `check` unless `cond` holds.
pub(crate) fn hypothesis_ok(cond: bool, check: &str, detail: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::hypothesis(check, detail()))
    }
}

/// Run `sweep` on the base level and on one refinement, with the test
/// functions drawn once against the base measure.
pub(crate) fn two_levels<F>(ctx: &Context, default_count: usize, sweep: F) -> Result<(SampleSet, SampleSet)>
where
    F: Fn(u32, &Arc<AtomicMeasure>, &CubeFamilySpec, &[TestFunction]) -> Result<SampleSet>,
{
    let base = ctx.measure(0)?;
    let fns = ctx.functions(&base, default_count)?;
    let fam0 = ctx.family(&base, 0)?;
    let s0 = sweep(0, &base, &fam0, &fns)?;
    let fine = ctx.measure(1)?;
    let fam1 = ctx.family(&fine, 1)?;
    let s1 = sweep(1, &fine, &fam1, &fns)?;
    Ok((s0, s1))
}

/// Atom with the largest `lhs/rhs`, ties to the lowest index; atoms where
/// both sides vanish are skipped.
pub(crate) fn worst_atom(lhs: &[f64], rhs: &[f64]) -> Option<(usize, f64, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (&l, &r)) in lhs.iter().zip(rhs).enumerate() {
        if let Some(q) = report::ratio_of(l, r) {
            if best.map_or(true, |(_, b)| q > b) {
                best = Some((i, q));
            }
        }
    }
    best.map(|(i, _)| (i, lhs[i], rhs[i]))
}

pub(crate) fn dump_of(field: &crate::maximal::MaximalField) -> Result<FieldDump> {
    Ok(FieldDump {
        atoms_text: field.values.measure().to_atom_text(Some(field.values.values()))?,
        cubes_csv: field.cubes_csv(),
    })
}
