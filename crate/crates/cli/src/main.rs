//! `radfrac list | run | report`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use radfrac::runner::{self, RunOptions, EXIT_OK, EXIT_USAGE};
use radfrac::verify;

#[derive(Parser, Debug)]
#[command(name = "radfrac", version, about = "Numerical checks for radial fractional Orlicz maximal operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ListFormat {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the experiment registry.
    List {
        /// Also show the inequality each experiment tests.
        #[arg(long)]
        verbose: bool,
        #[arg(long, value_enum, default_value_t = ListFormat::Text)]
        format: ListFormat,
    },
    /// Run the experiments named in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "OML_OUT", default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        /// KEY=VAL, repeatable; `KEY=+N` adds N to a numeric value.
        #[arg(long = "override", value_name = "KEY=VAL")]
        overrides: Vec<String>,
        /// Write the first maximal field of each experiment and its maximizing cubes.
        #[arg(long)]
        dump_fields: bool,
    },
    /// Merge all summaries under a directory into one table.
    Report {
        #[arg(long, env = "OML_OUT", default_value = "out")]
        out: PathBuf,
    },
}

fn list(verbose: bool, format: ListFormat) {
    let reg = verify::registry();
    match format {
        ListFormat::Text => {
            for e in reg {
                println!("{:<18} {}", e.id, e.summary);
                if verbose {
                    println!("{:<18}   {}", "", e.statement);
                }
            }
        }
        ListFormat::Csv => {
            if verbose {
                println!("id,summary,statement");
            } else {
                println!("id,summary");
            }
            let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
            for e in reg {
                if verbose {
                    println!("{},{},{}", e.id, quote(e.summary), quote(e.statement));
                } else {
                    println!("{},{}", e.id, quote(e.summary));
                }
            }
        }
    }
}

fn run(opts: RunOptions, config: PathBuf) -> i32 {
    let cfg = match runner::load_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return runner::exit_code_for(&e);
        }
    };
    let outcome = match runner::run_config(cfg, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return runner::exit_code_for(&e);
        }
    };
    for (id, r) in &outcome.results {
        match r {
            Ok(rep) => {
                let refined = rep
                    .refinement_drift
                    .map(|d| format!(" drift={d:.4}"))
                    .unwrap_or_default();
                println!("{id}: {} empirical_C={:.6e}{refined}", rep.verdict, rep.empirical_c);
            }
            Err(e) => eprintln!("{id}: error: {e}"),
        }
    }
    outcome.exit_code
}

fn report(out: PathBuf) -> i32 {
    match runner::consolidate(&out) {
        Ok(rows) => {
            print!("{}", runner::render_table(&rows));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            runner::exit_code_for(&e)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.command {
        Command::List { verbose, format } => {
            list(verbose, format);
            EXIT_OK
        }
        Command::Run {
            config,
            out,
            seed,
            jobs,
            overrides,
            dump_fields,
        } => run(
            RunOptions {
                out_dir: out,
                seed,
                jobs,
                overrides,
                dump_fields,
            },
            config,
        ),
        Command::Report { out } => report(out),
    };
    ExitCode::from(code as u8)
}
