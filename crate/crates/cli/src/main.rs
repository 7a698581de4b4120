use clap::{Parser, Subcommand};
use nucont_cli::corpus::{self, BUILTIN};
use nucont_cli::nucont_core::nu::checks::CHECKER_NAMES;
use nucont_cli::{emit_report, parse_scenario, run_scenario, to_json, CliError, Format, Report, RunOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Spectral nu-continuity lab: run scenario files and write reports.
#[derive(Parser)]
#[command(name = "nucont", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Directory for reports; without it, `run` prints JSON to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comma-separated subset of json,csv.
    #[arg(long, value_delimiter = ',', default_value = "json")]
    format: Vec<Format>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies every checker tolerance.
    #[arg(long)]
    tol_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario: a file path or the name of a built-in scenario.
    Run {
        scenario: String,
        #[command(flatten)]
        out: Output,
    },
    /// List the registered checker names.
    ListCheckers,
    /// Run every built-in scenario.
    Corpus {
        #[command(flatten)]
        out: Output,
        /// Only list the built-in scenario names.
        #[arg(long)]
        list: bool,
    },
}

fn load(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(text) = corpus::builtin(arg) {
            return Ok(text.to_string());
        }
    }
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: arg.to_string(),
        source,
    })
}

fn opts(o: &Output) -> RunOptions {
    RunOptions {
        seed: o.seed,
        tol_scale: o.tol_scale,
    }
}

fn summary(r: &Report) -> String {
    let mut s = format!("{}: {}", r.scenario, r.verdict);
    for c in &r.checks {
        s.push_str(&format!("\n  {:<22} {:<16} {}", c.checker, c.verdict.to_string(), c.detail));
    }
    s
}

fn run_one(arg: &str, out: &Output) -> Result<i32, CliError> {
    let s = parse_scenario(&load(arg)?)?;
    let (report, timing) = run_scenario(&s, opts(out))?;
    match &out.out_dir {
        Some(dir) => {
            for p in emit_report(&report, &timing, &out.format, dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", to_json(&report)),
    }
    eprintln!("{}\n  ({:.2} s)", summary(&report), timing.total_seconds);
    Ok(report.exit_code())
}

fn run_corpus(out: &Output) -> Result<i32, CliError> {
    let dir = out.out_dir.clone().unwrap_or_else(|| PathBuf::from("nucont-reports"));
    let mut unexpected = 0;
    for s in corpus::all()? {
        let (report, timing) = run_scenario(&s, opts(out))?;
        emit_report(&report, &timing, &out.format, &dir)?;
        let code = report.exit_code();
        let expected = if s.negative_control { 1 } else { 0 };
        let mark = if code == expected { "ok" } else { "UNEXPECTED" };
        if code != expected {
            unexpected += 1;
        }
        println!("{mark:<10} exit {code} {:<30} {:>7.2} s", s.name, timing.total_seconds);
    }
    println!("reports in {}", dir.display());
    Ok(if unexpected == 0 { 0 } else { 1 })
}

/// Name listings go through here so that a closed pipe (`| head`) ends
/// the listing quietly.
fn print_lines<'a>(lines: impl Iterator<Item = &'a str>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    for l in lines {
        if writeln!(out, "{l}").is_err() {
            return;
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { scenario, out } => run_one(scenario, out),
        Command::ListCheckers => {
            print_lines(CHECKER_NAMES.iter().copied());
            Ok(0)
        }
        Command::Corpus { out, list } => {
            if *list {
                print_lines(BUILTIN.iter().map(|(n, _)| *n));
                Ok(0)
            } else {
                run_corpus(out)
            }
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
