use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use modtau_cli::{execute, CliError, RunConfig, COMMANDS, EXIT_NUMERIC, EXIT_USAGE};

/// Evaluate, verify and tabulate modular transformations of isomonodromic tau
/// functions on the once-punctured torus.
#[derive(Parser, Debug)]
#[command(name = "modtau", version)]
struct Cli {
    /// eval, map, upsilon, flow, kernel, verify or emit_table
    command: String,
    /// JSON run config; `-` reads it from stdin
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override a config key: `a=[0.23,0]`, `precision.tol=1e-13`, `flow.t_max=10`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Restrict `verify` to the named suites (comma-separated)
    #[arg(long, value_name = "SUITE")]
    only: Option<String>,
    /// Write the report (or the CSV table for emit_table) here
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn read_config(path: &Option<PathBuf>) -> Result<Option<String>, CliError> {
    match path {
        None => Ok(None),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
            Ok(Some(s))
        }
        Some(p) => std::fs::read_to_string(p).map(Some).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display()))),
    }
}

fn write(path: &PathBuf, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if !COMMANDS.contains(&cli.command.as_str()) {
        return Err(CliError::Usage(format!("unknown command {:?} (expected one of {})", cli.command, COMMANDS.join(", "))));
    }
    let doc = read_config(&cli.config)?;
    let mut sets = cli.set.clone();
    if let Some(only) = &cli.only {
        if cli.command != "verify" {
            return Err(CliError::Usage("--only applies to verify".into()));
        }
        sets.push(format!("only={only}"));
    }
    let cfg = RunConfig::build(doc.as_deref(), &sets)?;
    if let Some(c) = &cfg.command {
        if *c != cli.command {
            return Err(CliError::Usage(format!("config command {c:?} does not match {:?}", cli.command)));
        }
    }
    let env = std::env::var("MODTAU_PRECISION").ok();
    let ctx = cfg.precision(env.as_deref())?;
    let out = cli.out.clone().or_else(|| cfg.output_path.clone().map(PathBuf::from));
    if cli.command == "emit_table" && out.is_none() {
        return Err(CliError::Usage("emit_table needs --out PATH".into()));
    }

    let t = Instant::now();
    let mut outcome = execute(&cfg, &cli.command, &ctx)?;
    let report = &mut outcome.report;
    report.finalize(t.elapsed().as_millis() as u64);

    let json = report.to_json();
    match (&outcome.table, &out) {
        (Some(csv), Some(path)) => {
            write(path, csv)?;
            print_stdout(&json)?;
        }
        (None, Some(path)) => write(path, &json)?,
        _ => print_stdout(&json)?,
    }
    if report.pass {
        return Ok(0);
    }
    let mut failing = report.failing_residuals();
    failing.extend(report.failures.iter().cloned());
    eprintln!("numerical failure: {}", failing.join("; "));
    Ok(EXIT_NUMERIC)
}

fn print_stdout(s: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("modtau: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
