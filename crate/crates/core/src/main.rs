//! Command-line front end. Exit codes: 0 success, 1 configuration error,
//! 2 runtime failure, 3 a `--check` property failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hmlab::experiments::{mu_scaling_config, reflection_config, RunOptions, TableSpec};
use hmlab::io::{parse_config, ParsedConfig};
use hmlab::jobs::{execute, rerun, Job, JobOutcome, ModelSpec};
use hmlab::{Error, Exec, Method, ReferenceWalls, Result, SimConfig};

#[derive(Parser)]
#[command(name = "hmlab", version, about = "Absorbing-layer experiments for the 2-D TE Yee scheme")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output directory (default: out/<command>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run without worker threads
    #[arg(long, global = true)]
    sequential: bool,
    /// Write zero runtimes so every output is reproducible byte for byte
    #[arg(long, global = true)]
    no_timings: bool,
    /// Write PGM snapshots of the final error field
    #[arg(long, global = true)]
    snapshots: bool,
    /// Exit with status 3 when a property check fails
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fill one comparison table (1..=8)
    RunTable {
        id: u8,
        #[arg(long, value_delimiter = ',')]
        refinements: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        /// TOML table spec; the id argument must match its table_id
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run one simulation from a TOML config against its reference
    Run {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Walls::AllSides)]
        reference_walls: Walls,
    },
    /// Reflected amplitude against absorption strength
    MuScaling {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2")]
        mu: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "smart,hml_v1,hml_v2,hml_v3")]
        methods: Vec<Method>,
    },
    /// Measured smart-layer reflection against the closed-form coefficient
    ReflectionCheck {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Classify directions of a quadratic dispersion model
    AmplificationMap {
        #[arg(long, value_enum, default_value_t = Model::Rotated)]
        model: Model,
        /// Rotation of the principal axes in degrees
        #[arg(long, default_value_t = 30.0)]
        angle: f64,
        /// Eigenvalues of the form (entries for the diagonal model)
        #[arg(long, value_delimiter = ',', default_value = "1,4")]
        eigenvalues: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,0")]
        sigma: Vec<f64>,
        #[arg(long, default_value_t = 720)]
        directions: usize,
    },
    /// Evaluate the symbol identities at random points
    SymbolCheck {
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Re-execute the job recorded in a manifest
    Rerun { manifest: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Walls {
    AllSides,
    Shared,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Isotropic,
    Diagonal,
    Rotated,
}

fn sim_config(path: Option<&Path>, default: SimConfig) -> Result<SimConfig> {
    match path.map(parse_config).transpose()? {
        None => Ok(default),
        Some(ParsedConfig::Sim(c)) => Ok(*c),
        Some(ParsedConfig::Table(_)) => Err(Error::config("config", "expected a simulation config, found a table spec")),
    }
}

fn pair(key: &str, v: &[f64]) -> Result<[f64; 2]> {
    v.try_into()
        .map_err(|_| Error::config(key, format!("expected 2 values, got {}", v.len())))
}

fn build_job(cmd: &Command) -> Result<Job> {
    Ok(match cmd {
        Command::RunTable {
            id,
            refinements,
            methods,
            config,
        } => {
            let mut spec = match config.as_deref().map(parse_config).transpose()? {
                None => TableSpec::published(*id)?,
                Some(ParsedConfig::Table(s)) if s.table_id == *id => s,
                Some(ParsedConfig::Table(s)) => {
                    return Err(Error::config("table_id", format!("config has {}, argument is {id}", s.table_id)))
                }
                Some(ParsedConfig::Sim(_)) => return Err(Error::config("config", "expected a table spec")),
            };
            if let Some(r) = refinements {
                spec.refinements = r.clone();
            }
            if let Some(m) = methods {
                spec.methods = m.clone();
            }
            spec.validate()?;
            Job::RunTable { spec }
        }
        Command::Run {
            config,
            reference_walls,
        } => Job::Run {
            config: sim_config(Some(config), SimConfig::baseline(Method::Maxwell))?,
            reference_walls: match reference_walls {
                Walls::AllSides => ReferenceWalls::AllSides,
                Walls::Shared => ReferenceWalls::Shared,
            },
        },
        Command::MuScaling {
            config,
            mu,
            methods,
        } => Job::MuScaling {
            config: sim_config(config.as_deref(), mu_scaling_config())?,
            mu: mu.clone(),
            methods: methods.clone(),
        },
        Command::ReflectionCheck { config } => Job::ReflectionCheck {
            config: sim_config(config.as_deref(), reflection_config())?,
        },
        Command::AmplificationMap {
            model,
            angle,
            eigenvalues,
            sigma,
            directions,
        } => {
            let ev = pair("eigenvalues", eigenvalues)?;
            Job::AmplificationMap {
                model: match model {
                    Model::Isotropic => ModelSpec::Isotropic,
                    Model::Diagonal => ModelSpec::Diagonal { entries: ev },
                    Model::Rotated => ModelSpec::Rotated {
                        angle_deg: *angle,
                        eigenvalues: ev,
                    },
                },
                sigma: pair("sigma", sigma)?,
                directions: *directions,
            }
        }
        Command::SymbolCheck { points, seed } => Job::SymbolCheck {
            points: *points,
            seed: *seed,
        },
        Command::Rerun { .. } => unreachable!("rerun has no job of its own"),
    })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::RunTable { .. } => "run-table",
        Command::Run { .. } => "run",
        Command::MuScaling { .. } => "mu-scaling",
        Command::ReflectionCheck { .. } => "reflection-check",
        Command::AmplificationMap { .. } => "amplification-map",
        Command::SymbolCheck { .. } => "symbol-check",
        Command::Rerun { .. } => "rerun",
    }
}

fn run(cli: &Cli) -> Result<JobOutcome> {
    let c = &cli.common;
    let exec = if c.sequential { Exec::Sequential } else { Exec::Parallel };
    let out = c
        .out
        .clone()
        .unwrap_or_else(|| Path::new("out").join(command_name(&cli.command)));
    if let Command::Rerun { manifest } = &cli.command {
        return rerun(manifest, &out, exec);
    }
    let opts = RunOptions {
        exec,
        snapshots: c.snapshots,
        timings: !c.no_timings,
    };
    execute(&build_job(&cli.command)?, &opts, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for l in outcome.checks() {
                println!("{} {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
            }
            for f in &outcome.manifest.files {
                println!("wrote {}", f.path);
            }
            if cli.common.check && !outcome.all_pass() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
