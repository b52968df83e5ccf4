//! Batch front door: `minnaert <scenario> --config <path> [--out <dir>] [--jobs N]`.
//!
//! Exit status: 0 on success, 2 on configuration/usage failure, 3 on a
//! numerical failure at run time.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use minnaert::config::{RunConfig, Scenario};
use minnaert::error::Error;
use minnaert::scenario;

const USAGE: &str = "usage: minnaert <capacitance|resonance|simulate|oracle|sweep|features|invert> \
--config <path> [--out <dir>] [--jobs N]";

struct Args {
    scenario: Scenario,
    config: PathBuf,
    out: PathBuf,
    jobs: Option<usize>,
}

fn parse_args(mut argv: std::env::Args) -> Result<Args, String> {
    let _ = argv.next();
    let scenario = Scenario::parse(&argv.next().ok_or(USAGE.to_string())?)
        .map_err(|e| e.to_string())?;
    let mut config = None;
    let mut out = PathBuf::from("out");
    let mut jobs = None;
    while let Some(flag) = argv.next() {
        let mut value = || argv.next().ok_or(format!("{flag} needs a value"));
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value()?)),
            "--out" => out = PathBuf::from(value()?),
            "--jobs" => {
                jobs = Some(
                    value()?
                        .parse::<usize>()
                        .map_err(|e| format!("--jobs: {e}"))?,
                )
            }
            other => return Err(format!("unknown flag `{other}`\n{USAGE}")),
        }
    }
    let config = config.ok_or(format!("--config is required\n{USAGE}"))?;
    Ok(Args { scenario, config, out, jobs })
}

fn run(args: Args) -> Result<Vec<PathBuf>, Error> {
    let mut config = RunConfig::load(&args.config)?;
    if config.scenario != args.scenario {
        return Err(Error::Config(format!(
            "scenario mismatch: command line says `{}`, config says `{}`",
            args.scenario.name(),
            config.scenario.name()
        )));
    }
    if args.jobs.is_some() {
        config.jobs = args.jobs;
    }
    let config_dir = args
        .config
        .parent()
        .unwrap_or(Path::new("."))
        .to_path_buf();
    scenario::run(&config, &config_dir, &args.out)
}

fn main() -> ExitCode {
    let args = match parse_args(std::env::args()) {
        Ok(args) => args,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run(args) {
        Ok(artifacts) => {
            for p in artifacts {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
