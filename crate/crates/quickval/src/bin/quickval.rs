//! Command-line surface over the library: exact tables, Monte Carlo
//! simulations, single algorithm runs, and tameness scans. All logic lives in
//! the library; this binary only resolves parameters (flags over config file
//! over defaults), dispatches, and writes output files.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical precondition failure,
//! 3 internal cap exceeded.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use quickval::config::{build_cost, FileConfig};
use quickval::cost::{estimate_tameness, CostModel};
use quickval::error::{Error, Result};
use quickval::exact::{a_n_sq_exact_from, a_n_sq_via_recurrence, HarmonicTable};
use quickval::experiments::{
    run_dickman, run_mean_cost_check, run_quickmin_l2, run_residual_clt, run_sigma_samples,
    ExperimentConfig,
};
use quickval::report::{write_json, write_samples_csv, RunManifest};
use quickval::select::{quickmin_cost, quickquant_cost, quickselect_cost, quickval_cost};
use quickval::stats::{mean_se, variance_and_se};
use quickval::stream::{SeedStream, SeedTape};

/// Environment variable naming the default root for run output directories.
const OUT_ROOT_ENV: &str = "QUICKVAL_OUT_ROOT";

#[derive(Parser)]
#[command(
    name = "quickval",
    version,
    about = "Selection-algorithm cost laboratory: exact residual tables, limit-law samplers, and reproducible Monte Carlo experiments"
)]
struct Cli {
    /// Flat key/value config file; command-line flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker thread count for simulations (no effect on results).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the exact vs recurrence table for the residual second moment;
    /// exits nonzero if the two routes disagree.
    ExactL2 {
        /// Largest n in the table.
        #[arg(long)]
        n_max: Option<usize>,
        /// CSV output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiments; write samples.csv, summary.json, and
    /// manifest.json to the output directory.
    Simulate {
        #[command(subcommand)]
        sim: SimCommand,
    },
    /// Run one algorithm on one stream and print its cost ledger as JSON.
    RunOnce {
        #[command(subcommand)]
        run: RunCommand,
    },
    /// Empirical tameness constant over a grid of seed pairs.
    Tameness(TamenessArgs),
}

#[derive(Args, Clone, Default)]
struct CostArgs {
    /// Cost kind: key | symbol.
    #[arg(long)]
    cost: Option<String>,
    /// Source: uniform-seed | memoryless:p1,p2,... | markov:init=..;rows=..|..
    #[arg(long)]
    source: Option<String>,
    /// Declared tameness constant c (with --tameness-epsilon).
    #[arg(long)]
    tameness_c: Option<f64>,
    /// Declared tameness exponent epsilon in [0, 1).
    #[arg(long)]
    tameness_epsilon: Option<f64>,
    /// Symbol expansion cap.
    #[arg(long)]
    max_depth: Option<usize>,
}

impl CostArgs {
    fn resolve(&self, cfg: &FileConfig, default_kind: &str) -> Result<CostModel> {
        let kind = self
            .cost
            .clone()
            .or_else(|| cfg.get("cost").map(str::to_string))
            .unwrap_or_else(|| default_kind.to_string());
        let source = self
            .source
            .clone()
            .or_else(|| cfg.get("source").map(str::to_string));
        let c = merged_opt(self.tameness_c, cfg, "tameness_c")?;
        let eps = merged_opt(self.tameness_epsilon, cfg, "tameness_epsilon")?;
        let depth = merged_opt(self.max_depth, cfg, "max_depth")?;
        build_cost(&kind, source.as_deref(), c, eps, depth)
    }

    fn echo(&self, cfg: &FileConfig, map: &mut BTreeMap<String, String>, default_kind: &str) {
        let kind = self
            .cost
            .clone()
            .or_else(|| cfg.get("cost").map(str::to_string))
            .unwrap_or_else(|| default_kind.to_string());
        map.insert("cost".into(), kind);
        if let Some(s) = self
            .source
            .clone()
            .or_else(|| cfg.get("source").map(str::to_string))
        {
            map.insert("source".into(), s);
        }
        for (key, v) in [
            ("tameness_c", self.tameness_c),
            ("tameness_epsilon", self.tameness_epsilon),
        ] {
            if let Some(v) = v {
                map.insert(key.into(), v.to_string());
            } else if let Some(s) = cfg.get(key) {
                map.insert(key.into(), s.to_string());
            }
        }
    }
}

#[derive(Subcommand)]
enum SimCommand {
    /// Coupled estimate of the QuickMin residual second moment at one n.
    QuickminL2 {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        /// Truncation tolerance for the coupled limit.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaled residual samples vs independent mixture samples.
    ResidualClt {
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        cost: CostArgs,
        /// Sample size; repeat for several n.
        #[arg(long = "n")]
        n: Vec<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dickman perpetuity draws.
    Dickman {
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draws of the squared mixing scale sigma_infinity^2.
    Sigma {
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        cost: CostArgs,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo mean of the QuickMin cost against its exact mean.
    MeanCost {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RunOnceArgs {
    /// Number of keys (inferred from --seeds when omitted there).
    #[arg(long)]
    n: Option<usize>,
    /// Master seed of the stream to draw keys from.
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Explicit comma-separated seed list instead of a stream.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<f64>>,
    #[command(flatten)]
    cost: CostArgs,
}

#[derive(Subcommand)]
enum RunCommand {
    Quickselect {
        /// Rank to select (1-based).
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: RunOnceArgs,
    },
    Quickquant {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: RunOnceArgs,
    },
    Quickmin {
        #[command(flatten)]
        common: RunOnceArgs,
    },
    Quickval {
        /// Population quantile in [0, 1].
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: RunOnceArgs,
    },
}

#[derive(Args)]
struct TamenessArgs {
    #[command(flatten)]
    cost: CostArgs,
    /// Tameness exponent epsilon >= 0.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Grid size (number of seed points).
    #[arg(long)]
    grid: Option<usize>,
}

fn merged_opt<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &FileConfig,
    key: &str,
) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Domain(format!("config key {key}: bad value {s:?}"))),
    }
}

fn merged<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &FileConfig,
    key: &str,
    default: T,
) -> Result<T> {
    Ok(merged_opt(flag, cfg, key)?.unwrap_or(default))
}

fn require<T: std::str::FromStr>(flag: Option<T>, cfg: &FileConfig, key: &str) -> Result<T> {
    merged_opt(flag, cfg, key)?.ok_or_else(|| {
        Error::Domain(format!(
            "missing required parameter --{}",
            key.replace('_', "-")
        ))
    })
}

fn resolve_out(
    flag: Option<PathBuf>,
    cfg: &FileConfig,
    command: &str,
    master_seed: u64,
) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Some(s) = cfg.get("out") {
        return Ok(PathBuf::from(s));
    }
    if let Ok(root) = std::env::var(OUT_ROOT_ENV) {
        return Ok(PathBuf::from(root).join(format!("{command}-seed{master_seed}")));
    }
    Err(Error::Domain(format!(
        "no output directory: pass --out, set `out` in the config, or set {OUT_ROOT_ENV}"
    )))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = merged_opt(cli.threads, &cfg, "threads")?;
    let body = || dispatch(&cli.command, &cfg, threads);
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

fn dispatch(command: &Command, cfg: &FileConfig, threads: Option<usize>) -> Result<()> {
    match command {
        Command::ExactL2 { n_max, out } => cmd_exact_l2(cfg, *n_max, out.clone()),
        Command::Simulate { sim } => cmd_simulate(sim, cfg, threads),
        Command::RunOnce { run } => cmd_run_once(run, cfg),
        Command::Tameness(args) => cmd_tameness(args, cfg),
    }
}

fn cmd_exact_l2(cfg: &FileConfig, n_max: Option<usize>, out: Option<PathBuf>) -> Result<()> {
    let n_max = require(n_max, cfg, "n_max")?;
    let table = HarmonicTable::new(n_max);
    let via = if n_max == 0 {
        vec![0.5]
    } else {
        a_n_sq_via_recurrence(n_max)?
    };
    let mut csv = String::from("n,a_n_sq_exact,a_n_sq_recurrence,n_a_n_sq,three_over_2n\n");
    let mut worst: Option<(usize, f64)> = None;
    for n in 0..=n_max {
        let exact = a_n_sq_exact_from(&table, n);
        let rec = via[n];
        let rel = (rec - exact).abs() / exact;
        if worst.is_none_or(|(_, w)| rel > w) {
            worst = Some((n, rel));
        }
        let nf = n as f64;
        csv.push_str(&format!("{n},{exact},{rec},{},{}\n", nf * exact, 1.5 / nf));
    }
    match &out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, &csv)?;
        }
        None => print!("{csv}"),
    }
    if let Some((n, rel)) = worst {
        if rel > 1e-10 {
            eprintln!(
                "disagreement at n = {n}: exact {}, recurrence {}, relative gap {rel:e}",
                a_n_sq_exact_from(&table, n),
                via[n]
            );
            return Err(Error::Verification(format!(
                "recurrence route disagrees with the closed form (worst relative gap {rel:e} at n = {n})"
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DickmanSummary {
    reps: usize,
    tol: f64,
    mean: f64,
    mean_se: f64,
    variance: f64,
    variance_se: f64,
    target_mean: f64,
    target_variance: f64,
}

#[derive(Serialize)]
struct SigmaSummary {
    alpha: f64,
    reps: usize,
    tol: f64,
    mean_sigma_sq: f64,
    mean_se: f64,
}

fn echo_common(
    map: &mut BTreeMap<String, String>,
    reps: usize,
    master_seed: u64,
    tol: Option<f64>,
    threads: Option<usize>,
    out: &Path,
) {
    map.insert("reps".into(), reps.to_string());
    map.insert("rng_master_seed".into(), master_seed.to_string());
    if let Some(t) = tol {
        map.insert("truncation_tol".into(), t.to_string());
    }
    if let Some(t) = threads {
        map.insert("threads".into(), t.to_string());
    }
    map.insert("out".into(), out.display().to_string());
}

fn finish_run<S: Serialize>(
    out_dir: &Path,
    mut manifest: RunManifest,
    columns: Vec<(String, Vec<f64>)>,
    summary: &S,
    redraws: usize,
    truncation_redraws: usize,
) -> Result<()> {
    manifest.redraws = redraws;
    manifest.truncation_redraws = truncation_redraws;
    manifest.finish();
    write_samples_csv(&out_dir.join("samples.csv"), &columns)?;
    write_json(&out_dir.join("summary.json"), summary)?;
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    println!("{}", serde_json::to_string_pretty(summary)?);
    Ok(())
}

fn cmd_simulate(sim: &SimCommand, cfg: &FileConfig, threads: Option<usize>) -> Result<()> {
    match sim {
        SimCommand::Dickman {
            reps,
            master_seed,
            tol,
            out,
        } => {
            let reps = merged(*reps, cfg, "reps", 1_000_000)?;
            let master_seed = merged(*master_seed, cfg, "rng_master_seed", 0)?;
            let tol = merged(*tol, cfg, "truncation_tol", 1e-12)?;
            let out_dir = resolve_out(out.clone(), cfg, "dickman", master_seed)?;
            let mut echo = BTreeMap::new();
            echo_common(&mut echo, reps, master_seed, Some(tol), threads, &out_dir);
            let manifest = RunManifest::start("simulate dickman", echo, master_seed);
            let samples = run_dickman(reps, tol, master_seed)?;
            let (mean, mean_se) = mean_se(&samples);
            let (variance, variance_se) = variance_and_se(&samples);
            let summary = DickmanSummary {
                reps,
                tol,
                mean,
                mean_se,
                variance,
                variance_se,
                target_mean: 2.0,
                target_variance: 0.5,
            };
            finish_run(
                &out_dir,
                manifest,
                vec![("dickman".into(), samples)],
                &summary,
                0,
                0,
            )
        }
        SimCommand::Sigma {
            alpha,
            cost,
            reps,
            master_seed,
            tol,
            out,
        } => {
            let alpha = merged(*alpha, cfg, "alpha", 0.0)?;
            let reps = merged(*reps, cfg, "reps", 100_000)?;
            let master_seed = merged(*master_seed, cfg, "rng_master_seed", 0)?;
            let tol = merged(*tol, cfg, "truncation_tol", 1e-9)?;
            let cost_model = cost.resolve(cfg, "key")?;
            let out_dir = resolve_out(out.clone(), cfg, "sigma", master_seed)?;
            let mut echo = BTreeMap::new();
            echo.insert("alpha".into(), alpha.to_string());
            cost.echo(cfg, &mut echo, "key");
            echo_common(&mut echo, reps, master_seed, Some(tol), threads, &out_dir);
            let manifest = RunManifest::start("simulate sigma", echo, master_seed);
            let samples = run_sigma_samples(alpha, &cost_model, reps, tol, master_seed)?;
            let (mean_sigma_sq, mean_se) = mean_se(&samples);
            let summary = SigmaSummary {
                alpha,
                reps,
                tol,
                mean_sigma_sq,
                mean_se,
            };
            finish_run(
                &out_dir,
                manifest,
                vec![("sigma_sq".into(), samples)],
                &summary,
                0,
                0,
            )
        }
        SimCommand::QuickminL2 {
            n,
            reps,
            master_seed,
            tol,
            out,
        } => {
            let n = merged(*n, cfg, "n", 64)?;
            let reps = merged(*reps, cfg, "reps", 100_000)?;
            let master_seed = merged(*master_seed, cfg, "rng_master_seed", 0)?;
            let tol = merged(*tol, cfg, "truncation_tol", 1e-9)?;
            let out_dir = resolve_out(out.clone(), cfg, "quickmin-l2", master_seed)?;
            let mut echo = BTreeMap::new();
            echo.insert("n".into(), n.to_string());
            echo_common(&mut echo, reps, master_seed, Some(tol), threads, &out_dir);
            let manifest = RunManifest::start("simulate quickmin-l2", echo, master_seed);
            let result = run_quickmin_l2(n, reps, master_seed, tol)?;
            let redraws = result.redraws;
            let trunc = result.truncation_redraws;
            let samples = result.samples.clone();
            finish_run(
                &out_dir,
                manifest,
                vec![("squared_residual".into(), samples)],
                &result,
                redraws,
                trunc,
            )
        }
        SimCommand::MeanCost {
            n,
            reps,
            master_seed,
            out,
        } => {
            let n = merged(*n, cfg, "n", 100)?;
            let reps = merged(*reps, cfg, "reps", 100_000)?;
            let master_seed = merged(*master_seed, cfg, "rng_master_seed", 0)?;
            let out_dir = resolve_out(out.clone(), cfg, "mean-cost", master_seed)?;
            let mut echo = BTreeMap::new();
            echo.insert("n".into(), n.to_string());
            echo_common(&mut echo, reps, master_seed, None, threads, &out_dir);
            let manifest = RunManifest::start("simulate mean-cost", echo, master_seed);
            let report = run_mean_cost_check(n, reps, master_seed)?;
            finish_run(&out_dir, manifest, vec![], &report, 0, 0)
        }
        SimCommand::ResidualClt {
            alpha,
            cost,
            n,
            reps,
            master_seed,
            tol,
            out,
        } => {
            let alpha = merged(*alpha, cfg, "alpha", 0.0)?;
            let reps = merged(*reps, cfg, "reps", 20_000)?;
            let master_seed = merged(*master_seed, cfg, "rng_master_seed", 0)?;
            let tol = merged(*tol, cfg, "truncation_tol", 1e-9)?;
            let mut n_list = if n.is_empty() {
                match cfg.get("n_list") {
                    Some(s) => s
                        .split(',')
                        .map(|x| {
                            x.trim().parse::<usize>().map_err(|_| {
                                Error::Domain(format!("config n_list: bad value {x:?}"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?,
                    None => vec![4096],
                }
            } else {
                n.clone()
            };
            n_list.sort_unstable();
            n_list.dedup();
            let cost_model = cost.resolve(cfg, "key")?;
            let out_dir = resolve_out(out.clone(), cfg, "residual-clt", master_seed)?;
            let mut echo = BTreeMap::new();
            echo.insert("alpha".into(), alpha.to_string());
            echo.insert(
                "n_list".into(),
                n_list
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            cost.echo(cfg, &mut echo, "key");
            echo_common(&mut echo, reps, master_seed, Some(tol), threads, &out_dir);
            let manifest = RunManifest::start("simulate residual-clt", echo, master_seed);
            let config = ExperimentConfig {
                alpha,
                cost: cost_model,
                n_list,
                reps,
                rng_master_seed: master_seed,
                truncation_tol: tol,
            };
            let result = run_residual_clt(&config)?;
            let mut columns: Vec<(String, Vec<f64>)> = result
                .n_list
                .iter()
                .zip(result.residual_samples.iter())
                .map(|(n, xs)| (format!("n={n}"), xs.clone()))
                .collect();
            columns.push(("mixture".into(), result.mixture_samples.clone()));
            let redraws = result.summary.redraws;
            let trunc = result.summary.truncation_redraws;
            finish_run(&out_dir, manifest, columns, &result.summary, redraws, trunc)
        }
    }
}

#[derive(Serialize)]
struct LedgerReport<'a> {
    algorithm: &'a str,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    cost: &'a CostModel,
    total_cost: f64,
    per_pivot: Vec<f64>,
    comparisons: u64,
}

fn cmd_run_once(run: &RunCommand, cfg: &FileConfig) -> Result<()> {
    let (name, common, m, alpha) = match run {
        RunCommand::Quickselect { m, common } => ("quickselect", common, Some(*m), None),
        RunCommand::Quickquant { m, common } => ("quickquant", common, Some(*m), None),
        RunCommand::Quickmin { common } => ("quickmin", common, None, None),
        RunCommand::Quickval { alpha, common } => ("quickval", common, None, Some(*alpha)),
    };
    let cost = common.cost.resolve(cfg, "key")?;
    let seeds: Vec<f64> = match &common.seeds {
        Some(list) => {
            let n = match merged_opt(common.n, cfg, "n")? {
                Some(n) if n > list.len() => {
                    return Err(Error::Domain(format!(
                        "--n {n} exceeds the {} explicit seeds",
                        list.len()
                    )))
                }
                Some(n) => n,
                None => list.len(),
            };
            let mut tape = SeedTape::from_seeds(list.clone())?;
            tape.prefix(n)?.to_vec()
        }
        None => {
            let n = require(common.n, cfg, "n")?;
            let rng_seed = merged(common.rng_seed, cfg, "rng_master_seed", 0)?;
            let mut tape = SeedTape::from_stream(SeedStream::new(rng_seed, 0));
            tape.prefix(n)?.to_vec()
        }
    };
    let ledger = match (name, m, alpha) {
        ("quickselect", Some(m), _) => quickselect_cost(&seeds, m, &cost)?,
        ("quickquant", Some(m), _) => quickquant_cost(&seeds, m, &cost)?,
        ("quickmin", _, _) => quickmin_cost(&seeds, &cost)?,
        ("quickval", _, Some(a)) => quickval_cost(&seeds, a, &cost)?,
        _ => unreachable!(),
    };
    let report = LedgerReport {
        algorithm: name,
        n: seeds.len(),
        m,
        alpha,
        cost: &cost,
        total_cost: ledger.total_cost,
        per_pivot: ledger.per_pivot,
        comparisons: ledger.comparisons,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_tameness(args: &TamenessArgs, cfg: &FileConfig) -> Result<()> {
    let epsilon = require(args.epsilon, cfg, "epsilon")?;
    let grid = merged(args.grid, cfg, "grid", 1024)?;
    // --source alone implies symbol comparisons
    let default_kind = if args.cost.source.is_some() || cfg.get("source").is_some() {
        "symbol"
    } else {
        "key"
    };
    let cost = args.cost.resolve(cfg, default_kind)?;
    let estimate = estimate_tameness(&cost, epsilon, grid)?;
    println!("{}", serde_json::to_string_pretty(&estimate)?);
    Ok(())
}
