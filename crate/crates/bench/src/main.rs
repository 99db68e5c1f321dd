use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gdsw_bench::run::split_values;
use gdsw_bench::{
    emit_report, run_single, run_sweep, write_csv, write_json, BenchError, ReportFormat, Result,
    RunConfig, RunRecord, SweepAxis,
};

#[derive(Parser)]
#[command(name = "gdsw-bench", version, about = "Run and sweep two-level Schwarz solves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Solve(Common),
    /// Run one configuration per value of a parameter.
    Sweep {
        /// subdomains, ilu_level, overlap, precision, local_solver or devices.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. `0,1,2,3` or `exact_lu,fast_ilu(0,3,5)`.
        #[arg(long)]
        values: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines); defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Configuration overrides as `--key value` pairs, e.g. `--krylov.restart 50`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

struct Resolved {
    config: RunConfig,
    output: Option<PathBuf>,
    format: ReportFormat,
}

fn resolve(c: Common) -> Result<Resolved> {
    let mut config = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut output = c.output;
    let mut format = c.format;
    let mut pairs = Vec::new();
    let mut tokens = c.overrides.into_iter();
    while let Some(tok) = tokens.next() {
        let key = tok
            .strip_prefix("--")
            .ok_or_else(|| BenchError::Config(format!("expected `--key value`, got `{tok}`")))?;
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = tokens
                    .next()
                    .ok_or_else(|| BenchError::Config(format!("missing value for `--{key}`")))?;
                (key.to_string(), v)
            }
        };
        match key.as_str() {
            "output" => output = Some(PathBuf::from(value)),
            "format" => format = value,
            _ => pairs.push((key, value)),
        }
    }
    if let Some(t) = c.threads {
        config.threads = t;
    }
    if let Some(s) = c.seed {
        config.seed = s;
    }
    for (k, v) in pairs {
        config.set(&k, &v)?;
    }
    Ok(Resolved {
        config,
        output,
        format: format.parse()?,
    })
}

fn report(records: &[RunRecord], r: &Resolved) -> Result<()> {
    match &r.output {
        Some(path) => emit_report(records, r.format, path),
        None => match r.format {
            ReportFormat::Csv => write_csv(io::stdout().lock(), records),
            ReportFormat::Json => write_json(io::stdout().lock(), records),
        },
    }
}

fn run(cli: Cli) -> Result<bool> {
    let records = match cli.command {
        Command::Solve(common) => {
            let r = resolve(common)?;
            r.config.validate()?;
            let records = vec![run_single(&r.config)];
            report(&records, &r)?;
            records
        }
        Command::Sweep {
            axis,
            values,
            common,
        } => {
            let r = resolve(common)?;
            let axis: SweepAxis = axis.parse()?;
            let records = run_sweep(&r.config, axis, &split_values(&values))?;
            report(&records, &r)?;
            records
        }
    };
    for rec in records.iter().filter(|r| r.error_msg.is_some()) {
        log::error!("{}", rec.error_msg.as_deref().unwrap_or_default());
    }
    Ok(gdsw_bench::run::all_converged(&records))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
