//! Config-driven runs: dispatch experiments, write CSV reports, and
//! consolidate summaries across runs.
//!
//! Exit codes: `0` all verdicts pass, `2` some verdict fails, `3` a
//! hypothesis check or numerical precondition failed, `4` configuration,
//! parse, unknown-id, schema or I/O problems. The largest applicable code
//! wins.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::verify::{self, ExperimentReport, Group, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

pub const SUMMARY_HEADER: [&str; 9] = [
    "experiment_id",
    "verdict",
    "empirical_C",
    "empirical_C_refined",
    "refinement_drift",
    "n_samples",
    "criterion",
    "params",
    "extras",
];

const REQUIRED_SUMMARY_COLUMNS: [&str; 4] = ["experiment_id", "verdict", "empirical_C", "refinement_drift"];

pub const CONSOLIDATED_FILE: &str = "consolidated_summary.csv";

/// Exit code for an error raised while loading or running.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Parse { .. } | Error::UnknownExperiment(_) | Error::Io(_) | Error::Schema(_) => {
            EXIT_USAGE
        }
        _ => EXIT_HYPOTHESIS,
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub overrides: Vec<String>,
    pub dump_fields: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub results: Vec<(String, Result<ExperimentReport>)>,
    pub exit_code: i32,
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Config::parse(&text)
}

/// Apply overrides and command-line settings, then validate.
pub fn effective_config(mut cfg: Config, opts: &RunOptions) -> Result<Config> {
    for o in &opts.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(seed) = opts.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(jobs) = opts.jobs {
        cfg.set("jobs", &jobs.to_string())?;
    }
    verify::validate_config(&cfg)?;
    if cfg.experiment_ids().is_empty() {
        return Err(Error::Config("no experiments listed in exp.id".into()));
    }
    Ok(cfg)
}

fn seed_of(cfg: &Config) -> Result<u64> {
    match cfg.get("seed") {
        None => Ok(0),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Config(format!("seed must be an unsigned integer, got `{v}`"))),
    }
}

fn jobs_of(cfg: &Config) -> Result<usize> {
    match cfg.integer("jobs")? {
        None => Ok(1),
        Some(j) if (1..=256).contains(&j) => Ok(j as usize),
        Some(j) => Err(Error::Config(format!("jobs must be in [1, 256], got {j}"))),
    }
}

/// Run every experiment in `cfg` and write its files to `opts.out_dir`.
/// Errors that prevent any experiment from running are returned directly.
pub fn run_config(cfg: Config, opts: &RunOptions) -> Result<RunOutcome> {
    let cfg = effective_config(cfg, opts)?;
    let seed = seed_of(&cfg)?;
    let jobs = jobs_of(&cfg)?;
    fs::create_dir_all(&opts.out_dir).map_err(|e| Error::Io(format!("{}: {e}", opts.out_dir.display())))?;
    fs::write(opts.out_dir.join("run.cfg"), cfg.serialize())?;
    let ids = cfg.experiment_ids();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<(String, Result<ExperimentReport>)> = pool.install(|| {
        ids.par_iter()
            .map(|id| {
                let r = verify::run_experiment(id, &cfg, seed, opts.dump_fields)
                    .and_then(|rep| write_report(&rep, &opts.out_dir).map(|_| rep));
                (id.clone(), r)
            })
            .collect()
    });
    let exit_code = results
        .iter()
        .map(|(_, r)| match r {
            Ok(rep) if rep.verdict == Verdict::Pass => EXIT_OK,
            Ok(_) => EXIT_FAIL,
            Err(e) => exit_code_for(e),
        })
        .max()
        .unwrap_or(EXIT_OK);
    Ok(RunOutcome { results, exit_code })
}

/// `{:.11e}`; `inf`/`nan` spelled out.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `<id>_report.csv`, `<id>_summary.csv`, `<id>_plot.csv`, and the field
/// dump when present.
pub fn write_report(rep: &ExperimentReport, out_dir: &Path) -> Result<()> {
    let id = &rep.id;
    let mut w = csv_writer(&out_dir.join(format!("{id}_report.csv")))?;
    w.write_record(["case_id", "group", "lhs", "rhs", "ratio"]).map_err(csv_err)?;
    for s in &rep.samples {
        w.write_record([
            s.case_id.as_str(),
            s.group.as_str(),
            &fmt_num(s.lhs),
            &fmt_num(s.rhs),
            &fmt_num(s.ratio),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = csv_writer(&out_dir.join(format!("{id}_summary.csv")))?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    w.write_record([
        id.as_str(),
        rep.verdict.as_str(),
        &fmt_num(rep.empirical_c),
        &fmt_opt(rep.empirical_c_refined),
        &fmt_opt(rep.refinement_drift),
        &rep.n_main().to_string(),
        &rep.criterion,
        &rep.params_text(),
        &rep.extras_text(),
    ])
    .map_err(csv_err)?;
    w.flush()?;

    let mut w = csv_writer(&out_dir.join(format!("{id}_plot.csv")))?;
    w.write_record(["lhs", "rhs"]).map_err(csv_err)?;
    for s in rep.samples.iter().filter(|s| s.group == Group::Main) {
        w.write_record([fmt_num(s.lhs), fmt_num(s.rhs)]).map_err(csv_err)?;
    }
    w.flush()?;

    if let Some(d) = &rep.dump {
        fs::write(out_dir.join(format!("{id}_field.atoms")), &d.atoms_text)?;
        fs::write(out_dir.join(format!("{id}_field_cubes.csv")), &d.cubes_csv)?;
    }
    Ok(())
}

/// One summary row found by [`consolidate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment_id: String,
    pub source: String,
    pub run: usize,
    pub verdict: String,
    pub empirical_c: f64,
    pub refinement_drift: Option<f64>,
    /// Relative change of `empirical_C` from the previous run of the same id.
    pub drift_vs_previous: Option<f64>,
}

fn collect_summaries(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.path());
    for e in entries {
        let path = e.path();
        if path.is_dir() {
            collect_summaries(&path, out)?;
        } else if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
            if name.ends_with("_summary.csv") && name != CONSOLIDATED_FILE {
                out.push(path);
            }
        }
    }
    Ok(())
}

fn parse_opt(s: &str, what: &str, path: &Path) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Schema(format!("{}: {what} `{s}` is not a number", path.display())))
}

/// Merge every `*_summary.csv` below `out_dir` (in path order), compute the
/// drift between consecutive runs of each experiment, and write
/// [`CONSOLIDATED_FILE`].
pub fn consolidate(out_dir: &Path) -> Result<Vec<SummaryRow>> {
    let mut paths = Vec::new();
    collect_summaries(out_dir, &mut paths)?;
    if paths.is_empty() {
        return Err(Error::Io(format!("no *_summary.csv files under {}", out_dir.display())));
    }
    let mut rows: Vec<SummaryRow> = Vec::new();
    for path in &paths {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let headers = rdr.headers().map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?.clone();
        let col = |name: &str| -> Result<usize> {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("{}: missing column `{name}`", path.display())))
        };
        let idx: Vec<usize> = REQUIRED_SUMMARY_COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;
        let source = path
            .strip_prefix(out_dir)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let c = parse_opt(field(idx[2]), "empirical_C", path)?
                .ok_or_else(|| Error::Schema(format!("{}: empty empirical_C", path.display())))?;
            let id = field(idx[0]).to_string();
            let previous = rows.iter().rev().find(|r| r.experiment_id == id);
            let run = previous.map_or(1, |r| r.run + 1);
            let drift_vs_previous = previous.map(|r| crate::verify::report::relative_drift(r.empirical_c, c));
            rows.push(SummaryRow {
                experiment_id: id,
                source: source.clone(),
                run,
                verdict: field(idx[1]).to_string(),
                empirical_c: c,
                refinement_drift: parse_opt(field(idx[3]), "refinement_drift", path)?,
                drift_vs_previous,
            });
        }
    }
    rows.sort_by(|a, b| a.experiment_id.cmp(&b.experiment_id).then(a.run.cmp(&b.run)));
    let mut w = csv_writer(&out_dir.join(CONSOLIDATED_FILE))?;
    w.write_record([
        "experiment_id",
        "run",
        "source",
        "verdict",
        "empirical_C",
        "refinement_drift",
        "drift_vs_previous",
    ])
    .map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.experiment_id.as_str(),
            &r.run.to_string(),
            &r.source,
            &r.verdict,
            &fmt_num(r.empirical_c),
            &fmt_opt(r.refinement_drift),
            &fmt_opt(r.drift_vs_previous),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Fixed-width text rendering of consolidated rows.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<20} {:>3} {:<7} {:>18} {:>18} {:>18}  {}\n",
        "experiment", "run", "verdict", "empirical_C", "refinement_drift", "drift_vs_prev", "source"
    );
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
    for r in rows {
        out.push_str(&format!(
            "{:<20} {:>3} {:<7} {:>18} {:>18} {:>18}  {}\n",
            r.experiment_id,
            r.run,
            r.verdict,
            format!("{:.6e}", r.empirical_c),
            opt(r.refinement_drift),
            opt(r.drift_vs_previous),
            r.source
        ));
    }
    out
}
