use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tdab::config::{load_config, to_config_string};
use tdab::output::{emit_outputs, write_suite_summary, EmitFlags, RunManifest, ScenarioSource};
use tdab::scenario::{builtin, builtins, run_scenario, run_suite, Scenario, ScenarioResult, BUILTIN_NAMES};
use tdab::Error;

const EXIT_BOUND_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Time-dependent Aharonov–Bohm phase laboratory.
#[derive(Parser)]
#[command(name = "tdab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, given as a config file or a builtin name.
    Run {
        scenario: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every builtin scenario.
    Suite {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// List builtin scenarios.
    List,
    /// Check a config file and print its canonical form.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct RunOpts {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the integration step.
    #[arg(long)]
    dt: Option<f64>,
    /// Skip the time-series CSV.
    #[arg(long)]
    no_timeseries: bool,
}

impl RunOpts {
    fn manifest(&self, source: ScenarioSource) -> RunManifest {
        RunManifest {
            source,
            out_dir: self.out.clone(),
            emit: EmitFlags {
                timeseries: !self.no_timeseries,
                ..EmitFlags::default()
            },
        }
    }

    fn apply(&self, s: Scenario) -> Result<Scenario, Error> {
        match self.dt {
            None => Ok(s),
            Some(dt) if dt > 0.0 && dt.is_finite() => Ok(s.with_dt(dt)),
            Some(dt) => Err(Error::Config(vec![format!("--dt: must be finite and > 0, got {dt}")])),
        }
    }
}

fn exit_for(err: &Error) -> u8 {
    if err.is_config_error() || matches!(err, Error::Io { .. }) {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

fn report(result: &ScenarioResult) {
    let p = &result.phases;
    let status = if result.passed() { "pass" } else { "FAIL" };
    println!(
        "{status} {:<32} phi_ab = {:+.12e}  phi_kin = {:+.12e}  phi_total = {:+.12e}  T = {:.12}",
        result.name, p.phi_ab, p.phi_kin, p.phi_total, result.diagnostics.meeting_time
    );
    for f in &result.bound_failures {
        println!("     {f}");
    }
}

fn resolve(scenario: &str) -> Result<(Scenario, ScenarioSource), Error> {
    if let Some(s) = builtin(scenario) {
        return Ok((s, ScenarioSource::Builtin(scenario.to_string())));
    }
    let path = Path::new(scenario);
    if !path.exists() {
        return Err(Error::Config(vec![format!(
            "{scenario}: neither a builtin scenario nor an existing config file (see `tdab list`)"
        )]));
    }
    Ok((load_config(path)?, ScenarioSource::ConfigFile(path.to_path_buf())))
}

fn cmd_run(scenario: &str, opts: &RunOpts) -> Result<u8, Error> {
    let (s, source) = resolve(scenario)?;
    let s = opts.apply(s)?;
    let result = run_scenario(&s)?;
    emit_outputs(&result, &opts.manifest(source))?;
    report(&result);
    Ok(if result.passed() { 0 } else { EXIT_BOUND_FAILURE })
}

fn cmd_suite(opts: &RunOpts) -> Result<u8, Error> {
    let scenarios = builtins()
        .into_iter()
        .map(|s| opts.apply(s))
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = opts.manifest(ScenarioSource::Builtin("suite".into()));
    manifest.prepare()?;
    let results = run_suite(&scenarios);
    let mut code = 0;
    for (name, r) in &results {
        match r {
            Ok(r) => {
                emit_outputs(r, &manifest)?;
                report(r);
                if !r.passed() && code == 0 {
                    code = EXIT_BOUND_FAILURE;
                }
            }
            Err(e) => {
                println!("ERR  {name:<32} {e}");
                code = EXIT_RUNTIME;
            }
        }
    }
    write_suite_summary(&results, &manifest.out_dir)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { scenario, opts } => cmd_run(scenario, opts),
        Command::Suite { opts } => cmd_suite(opts),
        Command::List => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Validate { config } => load_config(config).map(|s| {
            print!("{}", to_config_string(&s));
            0
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
