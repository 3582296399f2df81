use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{BranchName, Format, ModelName, RunConfig, Suite};
use crate::error::CliError;
use crate::output::Sink;

#[derive(Debug, Parser)]
#[command(name = "qes", version, about = "Exceptional spectra of Rabi-type models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "K")]
    pub jobs: Option<usize>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelName>,
    #[arg(long, global = true)]
    pub omega: Option<String>,
    #[arg(long, global = true)]
    pub g: Option<String>,
    /// Level splitting Δ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Driving term δ (driven-rabi).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub drive: Option<String>,
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub kappa: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub branch: Option<BranchName>,
    /// Level `k` or inclusive range `a..b`.
    #[arg(long, global = true)]
    pub n: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run exact identity suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Exceptional energies and constraint roots per level.
    Exceptional,
    /// Coefficients of the constraint polynomials.
    Constraint,
    /// Oracle spectrum over a range of couplings with exceptional points.
    Sweep {
        #[arg(long, value_name = "LO..HI")]
        g_range: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Locate an energy in truncated Fock-space spectra.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
        #[arg(long, env = "QES_DEFAULT_TOL")]
        tol: Option<f64>,
        /// Write the matrix at truncation `--dump-n` in binary form.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        #[arg(long)]
        dump_n: Option<usize>,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Cli {
    /// File (if any), then flags, then validation.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.global.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let m = &self.model;
        set(&mut cfg.model.kind, m.model);
        set(&mut cfg.model.omega, m.omega.clone());
        set(&mut cfg.model.g, m.g.clone());
        set(&mut cfg.model.delta, m.delta.clone());
        set(&mut cfg.model.drive, m.drive.clone());
        set(&mut cfg.model.q, m.q.clone());
        set(&mut cfg.model.kappa, m.kappa.clone());
        set(&mut cfg.model.branch, m.branch);
        set(&mut cfg.run.n, m.n.clone());
        set(&mut cfg.output.format, self.global.format);
        if self.global.out.is_some() {
            cfg.output.out = self.global.out.clone();
        }
        if self.global.jobs.is_some() {
            cfg.output.jobs = self.global.jobs;
        }
        match &self.command {
            Command::Verify { suite, seed, samples } => {
                set(&mut cfg.verify.suite, *suite);
                set(&mut cfg.verify.seed, *seed);
                set(&mut cfg.verify.samples, *samples);
            }
            Command::Sweep {
                g_range,
                points,
                levels,
                truncation,
            } => {
                set(&mut cfg.sweep.g_range, g_range.clone());
                set(&mut cfg.sweep.points, *points);
                set(&mut cfg.sweep.levels, *levels);
                set(&mut cfg.sweep.truncation, *truncation);
            }
            Command::Oracle {
                target,
                schedule,
                tol,
                dump,
                dump_n,
            } => {
                if target.is_some() {
                    cfg.oracle.target = target.clone();
                }
                set(&mut cfg.oracle.schedule, schedule.clone());
                set(&mut cfg.oracle.tol, *tol);
                if dump.is_some() {
                    cfg.oracle.dump = dump.clone();
                }
                if dump_n.is_some() {
                    cfg.oracle.dump_n = *dump_n;
                }
            }
            Command::Exceptional | Command::Constraint => {}
        }
        cfg.canonicalize()
    }
}

/// Run a parsed command line; the returned code is the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.resolve()?;
    if cli.global.print_config {
        io::stdout().write_all(cfg.to_toml().as_bytes())?;
        return Ok(0);
    }
    let sink = Sink::new(cfg.output.out.as_deref());
    let format = cfg.output.format;
    match &cli.command {
        Command::Verify { .. } => {
            let (table, ok) = commands::verify(&cfg)?;
            sink.write_table(&table, format)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Exceptional => {
            sink.write_table(&commands::exceptional(&cfg)?, format)?;
            Ok(0)
        }
        Command::Constraint => {
            sink.write_table(&commands::constraint(&cfg)?, format)?;
            Ok(0)
        }
        Command::Sweep { .. } => {
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(k) = cfg.output.jobs {
                pool = pool.num_threads(k);
            }
            let pool = pool.build().map_err(CliError::runtime)?;
            let out = pool.install(|| commands::sweep(&cfg))?;
            sink.write_table(&out.spectrum, format)?;
            match sink.sibling("markers", format) {
                Some(path) => Sink::File(path).write_table(&out.markers, format)?,
                None => {
                    println!();
                    sink.write_table(&out.markers, format)?;
                }
            }
            Ok(0)
        }
        Command::Oracle { .. } => {
            sink.write_table(&commands::oracle(&cfg)?.table, format)?;
            Ok(0)
        }
    }
}
