//! Command-line front end. [`dispatch`] parses and runs one invocation and
//! returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use modde_core::adaptation::{DEFAULT_CR, DEFAULT_F, DEFAULT_MEMORY_SIZE};
use modde_core::runner::{DEFAULT_BUDGET_MULTIPLIER, DEFAULT_POPULATION};
use modde_core::{Adaptation, BchmKind, CrossoverKind, DeConfig, MutationStrategy, ProblemKind};
use serde::Deserialize;

use crate::analysis::{analyze, write_analysis, write_ecdfs, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::io::{read_sweep, write_sweep};
use crate::sweep::{run_sweep, Grid, SweepSpec};

pub const OUTDIR_ENV: &str = "MODDE_OUTDIR";
pub const DEFAULT_OUTDIR: &str = "modde-out";
pub const DEFAULT_INSTANCES: u64 = 5;
pub const DEFAULT_DIMENSION: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "modde", version, about = "Modular differential evolution with boundary constraint handling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one configuration on one or more functions.
    Run(RunArgs),
    /// Run the Cartesian product of operator lists.
    Sweep(RunArgs),
    /// Rank BCHMs per cell and write rank, PORS, mark and count tables.
    Analyze(AnalyzeArgs),
    /// Write ECDF curves for one function group.
    Ecdf(EcdfArgs),
    /// List every operator, BCHM and function tag.
    ListOps,
}

/// Settings shared by `run` and `sweep`. A `--config` JSON file may supply any
/// of them under the same names; command-line values take precedence.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunArgs {
    /// Mutation tag, comma-separated list or `all`.
    #[arg(long)]
    pub mutation: Option<String>,
    /// Crossover tag (`bin`, `exp`), list or `all`.
    #[arg(long)]
    pub crossover: Option<String>,
    /// BCHM tag, list or `all`.
    #[arg(long)]
    pub bchm: Option<String>,
    /// `full` selects every mutation, crossover and BCHM.
    #[arg(long)]
    pub grid: Option<String>,
    /// Function tag, list or `all` (the five benchmark groups).
    #[arg(long, visible_alias = "function")]
    #[serde(alias = "function")]
    pub functions: Option<String>,
    /// `shade` or `fixed`.
    #[arg(long)]
    pub adaptation: Option<String>,
    #[arg(long = "F")]
    #[serde(rename = "F")]
    pub f: Option<f64>,
    #[arg(long = "Cr")]
    #[serde(rename = "Cr")]
    pub cr: Option<f64>,
    /// SHADE memory size.
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub h: Option<usize>,
    /// Dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Population size.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// Budget is this multiple of the dimension.
    #[arg(long)]
    pub budget_mult: Option<u64>,
    /// Generation cap.
    #[arg(long)]
    pub generations: Option<u64>,
    #[arg(long)]
    pub runs: Option<u64>,
    /// Problem instances per function; run k uses instance k mod this.
    #[arg(long)]
    pub instances: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; falls back to $MODDE_OUTDIR.
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// JSON file with default values for these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    fn or(self, file: RunArgs) -> RunArgs {
        RunArgs {
            mutation: self.mutation.or(file.mutation),
            crossover: self.crossover.or(file.crossover),
            bchm: self.bchm.or(file.bchm),
            grid: self.grid.or(file.grid),
            functions: self.functions.or(file.functions),
            adaptation: self.adaptation.or(file.adaptation),
            f: self.f.or(file.f),
            cr: self.cr.or(file.cr),
            h: self.h.or(file.h),
            n: self.n.or(file.n),
            m: self.m.or(file.m),
            budget_mult: self.budget_mult.or(file.budget_mult),
            generations: self.generations.or(file.generations),
            runs: self.runs.or(file.runs),
            instances: self.instances.or(file.instances),
            seed: self.seed.or(file.seed),
            outdir: self.outdir.or(file.outdir),
            workers: self.workers.or(file.workers),
            config: self.config,
        }
    }

    /// Merges in the `--config` file, if any.
    pub fn resolve(self) -> Result<RunArgs> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let file: RunArgs =
            serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
        Ok(self.or(file))
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Sweep output directory holding `manifest.json`.
    #[arg(long)]
    pub indir: Option<PathBuf>,
    /// Where to write tables; defaults to `<indir>/analysis`.
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EcdfArgs {
    #[arg(long)]
    pub indir: Option<PathBuf>,
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    /// Function group 1 to 5.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub group: u8,
}

fn valid_tags<T: Copy>(all: &[T], tag: fn(T) -> &'static str) -> String {
    all.iter().map(|&x| tag(x)).collect::<Vec<_>>().join(", ")
}

fn parse_list<T>(raw: &str, all: &[T], tag: fn(T) -> &'static str, what: &str) -> Result<Vec<T>>
where
    T: Copy + FromStr,
{
    if raw.trim() == "all" {
        return Ok(all.to_vec());
    }
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>().map_err(|_| {
                Error::Usage(format!("unknown {what} `{s}`; valid: {}", valid_tags(all, tag)))
            })
        })
        .collect::<Result<Vec<T>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(Error::Usage(format!("empty {what} list")))
            } else {
                Ok(v)
            }
        })
}

fn default_outdir() -> PathBuf {
    std::env::var_os(OUTDIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTDIR))
}

fn adaptation(args: &RunArgs) -> Result<Adaptation> {
    match args.adaptation.as_deref().unwrap_or("shade") {
        "shade" => {
            if args.f.is_some() || args.cr.is_some() {
                return Err(Error::Usage("--F and --Cr need --adaptation fixed".into()));
            }
            Ok(Adaptation::Shade {
                memory_size: args.h.unwrap_or(DEFAULT_MEMORY_SIZE),
            })
        }
        "fixed" => {
            if args.h.is_some() {
                return Err(Error::Usage("--H needs --adaptation shade".into()));
            }
            Ok(Adaptation::Fixed {
                f: args.f.unwrap_or(DEFAULT_F),
                cr: args.cr.unwrap_or(DEFAULT_CR),
            })
        }
        other => Err(Error::Usage(format!("unknown adaptation `{other}`; valid: shade, fixed"))),
    }
}

/// Builds the sweep described by `args`; `single` requires one operator of each kind.
pub fn build_spec(args: &RunArgs, single: bool) -> Result<SweepSpec> {
    let grid = match args.grid.as_deref() {
        Some("full") => {
            if single {
                return Err(Error::Usage("--grid is only valid for sweep".into()));
            }
            Grid::full()
        }
        Some(other) => return Err(Error::Usage(format!("unknown grid `{other}`; valid: full"))),
        None => {
            let pick = |v: &Option<String>, name: &str| -> Result<String> {
                match v {
                    Some(s) => Ok(s.clone()),
                    None if single => Err(Error::Usage(format!("--{name} is required"))),
                    None => Ok("all".into()),
                }
            };
            Grid {
                mutations: parse_list(&pick(&args.mutation, "mutation")?, &MutationStrategy::ALL, MutationStrategy::tag, "mutation")?,
                crossovers: parse_list(&pick(&args.crossover, "crossover")?, &CrossoverKind::ALL, CrossoverKind::tag, "crossover")?,
                bchms: parse_list(&pick(&args.bchm, "bchm")?, &BchmKind::ALL, BchmKind::tag, "bchm")?,
            }
        }
    };
    if single && grid.len() != 1 {
        return Err(Error::Usage("run takes a single mutation, crossover and bchm; use sweep for lists".into()));
    }
    let functions = match args.functions.as_deref() {
        None | Some("all") => ProblemKind::BENCHMARK.to_vec(),
        Some(raw) => parse_list(raw, &ProblemKind::ALL, ProblemKind::tag, "function")?,
    };
    let mut common = DeConfig::new(grid.mutations[0], grid.crossovers[0], grid.bchms[0]);
    common.adaptation = adaptation(args)?;
    common.population_size = args.m.unwrap_or(DEFAULT_POPULATION);
    common.budget_multiplier = args.budget_mult.unwrap_or(DEFAULT_BUDGET_MULTIPLIER);
    common.max_generations = args.generations;
    common.runs = args.runs.unwrap_or(1);
    common.master_seed = args.seed.unwrap_or(0);
    let spec = SweepSpec {
        grid,
        functions,
        n: args.n.unwrap_or(DEFAULT_DIMENSION),
        instances: args.instances.unwrap_or(DEFAULT_INSTANCES),
        common,
    };
    spec.validate()?;
    Ok(spec)
}

fn run_or_sweep(args: RunArgs, single: bool) -> Result<()> {
    let args = args.resolve()?;
    let spec = build_spec(&args, single)?;
    let outdir = args.outdir.clone().unwrap_or_else(default_outdir);
    let workers = args.workers.unwrap_or_else(rayon::current_num_threads);
    let logs = run_sweep(&spec, workers)?;
    write_sweep(&outdir, &logs)?;
    if single {
        for log in &logs {
            println!(
                "{} {} run {}: best {:e} after {} evals, PORS {}",
                log.config_id,
                log.function,
                log.run_index,
                log.final_best,
                log.evals_used,
                log.pors().map_or("n/a".into(), |p| format!("{p:.4}"))
            );
        }
    }
    println!("wrote {} runs to {}", logs.len(), outdir.display());
    Ok(())
}

fn indir_or_default(indir: Option<PathBuf>) -> PathBuf {
    indir.unwrap_or_else(default_outdir)
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    if !(0.0..1.0).contains(&args.alpha) {
        return Err(Error::Usage(format!("alpha must lie in [0, 1), got {}", args.alpha)));
    }
    let indir = indir_or_default(args.indir);
    let outdir = args.outdir.unwrap_or_else(|| indir.join("analysis"));
    let logs = read_sweep(&indir)?;
    let cells = analyze(&logs, args.alpha)?;
    if cells.is_empty() {
        return Err(Error::Gap(format!("no benchmark runs in {}", indir.display())));
    }
    write_analysis(&outdir, &cells)?;
    println!("analyzed {} cells into {}", cells.len(), outdir.display());
    Ok(())
}

fn run_ecdf(args: EcdfArgs) -> Result<()> {
    let indir = indir_or_default(args.indir);
    let outdir = args.outdir.unwrap_or_else(|| indir.join("analysis"));
    let logs = read_sweep(&indir)?;
    let count = write_ecdfs(&outdir, &logs, args.group)?;
    println!("wrote {count} ECDF curves for group {} into {}", args.group, outdir.display());
    Ok(())
}

fn list_ops() {
    let section = |name: &str, tags: String| println!("{name}: {tags}");
    section("mutation", valid_tags(&MutationStrategy::ALL, MutationStrategy::tag));
    section("crossover", valid_tags(&CrossoverKind::ALL, CrossoverKind::tag));
    section("bchm", valid_tags(&BchmKind::ALL, BchmKind::tag));
    section("function", valid_tags(&ProblemKind::ALL, ProblemKind::tag));
    section("adaptation", "shade, fixed".into());
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run_or_sweep(args, true),
        Command::Sweep(args) => run_or_sweep(args, false),
        Command::Analyze(args) => run_analyze(args),
        Command::Ecdf(args) => run_ecdf(args),
        Command::ListOps => {
            list_ops();
            Ok(())
        }
    }
}

/// Parses `argv` (program name first), runs it and returns the exit code:
/// 0 on success, 2 on usage or configuration errors, 1 on runtime failures.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

