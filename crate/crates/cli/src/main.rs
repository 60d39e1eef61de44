use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use charlab_core::experiments::{execute, list_experiments, find_experiment, selftest, ExperimentConfig, OutputFormat};
use charlab_core::LabError;

/// Character-sum laboratory: reproducible numerical experiments.
#[derive(Parser)]
#[command(name = "charlab", version, about)]
#[command(override_usage = "charlab <EXPERIMENT> [--<param> <value>]... [--seed S] [--out DIR] [--format csv|json|both]\n       charlab list\n       charlab selftest")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available experiments and their required parameters.
    List,
    /// Run the built-in invariant suite.
    Selftest,
    #[command(external_subcommand)]
    Run(Vec<String>),
}

fn parse_run(args: &[String]) -> Result<ExperimentConfig, LabError> {
    let (name, rest) = args.split_first().expect("external subcommand has a name");
    find_experiment(name)?;
    let mut params = BTreeMap::new();
    let mut it = rest.iter();
    while let Some(tok) = it.next() {
        let Some(flag) = tok.strip_prefix("--") else {
            return Err(LabError::param(tok.clone(), "expected --<param> <value>"));
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_owned(), v.to_owned()),
            None => {
                let v = it.next().ok_or_else(|| LabError::param(flag, "missing value"))?;
                (flag.to_owned(), v.clone())
            }
        };
        if params.insert(key.clone(), value).is_some() {
            return Err(LabError::param(key, "given more than once"));
        }
    }
    let mut config = ExperimentConfig::new(name.clone());
    if let Some(s) = params.remove("seed") {
        config.seed = s
            .parse()
            .map_err(|_| LabError::param("seed", format!("expected an unsigned 64-bit integer, got {s:?}")))?;
    }
    if let Some(dir) = params.remove("out") {
        config.output_dir = PathBuf::from(dir);
    }
    if let Some(f) = params.remove("format") {
        config.format = f.parse::<OutputFormat>()?;
    }
    config.params = params;
    Ok(config)
}

fn run(args: &[String]) -> Result<(), LabError> {
    let config = parse_run(args)?;
    let (report, files) = execute(&config)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    for (k, v) in &report.output.summary {
        println!("{k} = {}", v.to_csv());
    }
    Ok(())
}

fn list() {
    let entries = list_experiments();
    let width = entries.iter().map(|e| e.0.len()).max().unwrap_or(0);
    for (name, description, required) in entries {
        let req = if required.is_empty() { "-".to_owned() } else { required.join(", ") };
        println!("{name:width$}  [{req}]  {description}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Selftest => {
            let checks = selftest::run_selftest();
            let mut failed = 0;
            for c in &checks {
                println!("{} {:<22} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            println!("{} checks, {failed} failed", checks.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
        Command::Run(args) => match run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("charlab: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
