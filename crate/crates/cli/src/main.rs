//! `dcnflow`: build, route, and evaluate server-centric datacenter networks.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand};

use dcn_core::faults::{resolve_fault_arg, FaultSet, DEFAULT_MAX_FRACTION};
use dcn_core::graph::{all_pairs_stats, PairOracle};
use dcn_core::harness::{
    self, cost_table, make_router, parse_config, parse_grid, parse_seeds, ExperimentSpec, FaultSource, Network,
    RouterKind, TopologySpec,
};
use dcn_core::metrics::DEFAULT_BIN_WIDTH;
use dcn_core::routing::{RetryPolicy, RoutingOutcome};
use dcn_core::topology::{write_links_csv, write_nodes_csv};
use dcn_core::traffic::PatternSpec;

#[derive(Parser)]
#[command(name = "dcnflow", version, about)]
struct Cli {
    /// Flat `key = value` file of defaults for the subcommand's flags; flags
    /// given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a network and print its size; optionally export CSV.
    Build(BuildArgs),
    /// Route a single server pair.
    Route(RouteArgs),
    /// Run one experiment and write summary CSV.
    Run(RunArgs),
    /// Print the normalized cost table.
    Cost(CostArgs),
    /// Run every cell of a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// gqstar:K:N, ficonn:K:N, dpillar:K:N, or stellar:EDGE_LIST
    #[arg(long)]
    topology: TopologySpec,
    /// Write PREFIX.nodes.csv and PREFIX.links.csv.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// Also compute the BFS hop-diameter and mean hop over all pairs.
    #[arg(long)]
    diameter: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long)]
    topology: TopologySpec,
    #[arg(long)]
    router: RouterKind,
    #[arg(long)]
    src: u32,
    #[arg(long)]
    dst: u32,
    /// Fault file of `u v` lines, or FRACTION:SEED.
    #[arg(long)]
    faults: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_FRACTION)]
    max_fault_fraction: f64,
    /// Seed for retry randomness; defaults to the fault set's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Flow index mixed into the retry seed.
    #[arg(long, default_value_t = 0)]
    flow_index: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    topology: TopologySpec,
    #[arg(long)]
    router: RouterKind,
    /// all2all, many:SIZE:SEED, butterfly, or random:COUNT:SEED
    #[arg(long, default_value = "all2all")]
    pattern: PatternSpec,
    #[arg(long, default_value_t = 0.0)]
    fault_fraction: f64,
    /// Fault seeds, e.g. `1..5` or `1,4,9`; one summary row each.
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Fault file or FRACTION:SEED; replaces --fault-fraction and --seeds.
    #[arg(long)]
    faults: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_FRACTION)]
    max_fault_fraction: f64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write PREFIX.summary.csv instead of printing to stdout.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// With --out, also write per-channel loads and load histograms.
    #[arg(long)]
    loads: bool,
    /// Validate every routed path; a violation fails the run.
    #[arg(long = "assert")]
    check_paths: bool,
    /// Random intermediates tried after a failed direct route.
    #[arg(long, default_value_t = RetryPolicy::default().max_random_intermediates)]
    retries: u32,
    /// Search-step cap per direct attempt [default: 8kn]
    #[arg(long)]
    crossing_budget: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
    bin_width: u64,
}

#[derive(Args)]
struct CostArgs {
    /// Comma-separated topologies whose families are costed.
    #[arg(long, value_delimiter = ',', default_value = "gqstar:3:10,ficonn:2:24,dpillar:4:18")]
    topology: Vec<TopologySpec>,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.04,0.08,0.16")]
    rho: Vec<f64>,
    /// [default: 0.1, 0.15, ..., 0.6]
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid file of `key = value` lists.
    #[arg(long)]
    grid: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let cli = Cli::parse_from(argv);
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Splices `--config` entries in as flags after the subcommand name, except
/// for flags the command line already sets.
fn expand_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            let Some(path) = argv.get(i + 1).cloned() else {
                bail!("--config needs a file");
            };
            config = Some(PathBuf::from(path));
            argv.drain(i..i + 2);
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = config else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let entries = parse_config(&text).with_context(|| format!("in {}", path.display()))?;

    let cmd = Cli::command();
    let Some(pos) = argv.iter().position(|a| cmd.find_subcommand(a.to_string_lossy().as_ref()).is_some()) else {
        return Ok(argv);
    };
    let sub = cmd.find_subcommand(argv[pos].to_string_lossy().as_ref()).expect("found above");
    let given = |key: &str| {
        argv[pos + 1..].iter().any(|a| {
            let a = a.to_string_lossy();
            a.strip_prefix("--").is_some_and(|f| f == key || f.starts_with(&format!("{key}=")))
        })
    };
    let mut flags = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .with_context(|| format!("{}: {key} is not a flag of `{}`", path.display(), sub.get_name()))?;
        if given(&key) {
            continue;
        }
        if arg.get_action().takes_values() {
            let value = match arg.get_value_delimiter() {
                Some(d) => value.split(d).map(str::trim).collect::<Vec<_>>().join(&d.to_string()),
                None => value,
            };
            flags.push(OsString::from(format!("--{key}")));
            flags.push(OsString::from(value));
        } else if value.parse::<bool>().with_context(|| format!("{key} expects true or false"))? {
            flags.push(OsString::from(format!("--{key}")));
        }
    }
    argv.splice(pos + 1..pos + 1, flags);
    Ok(argv)
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Build(a) => build(a),
        Command::Route(a) => route(a),
        Command::Run(a) => run(a),
        Command::Cost(a) => cost(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn build(a: BuildArgs) -> Result<ExitCode> {
    let net = Network::build(&a.topology)?;
    let t = net.topology();
    let mut out = io::stdout().lock();
    writeln!(out, "topology: {}", a.topology)?;
    writeln!(out, "servers: {}", t.server_count())?;
    writeln!(out, "switches: {}", t.switch_count())?;
    writeln!(out, "switch_ports: {}", t.max_switch_degree())?;
    writeln!(out, "links: {}", t.link_count())?;
    writeln!(out, "directional_links: {}", t.channel_count())?;
    writeln!(out, "dangling_server_ports: {}", t.dangling_server_ports())?;
    if a.diameter {
        let none = FaultSet::none(t.link_count());
        let stats = harness::with_workers(a.workers, || all_pairs_stats(t, &none, PairOracle::Bfs))??;
        writeln!(out, "hop_diameter: {}", stats.max_hop)?;
        writeln!(out, "mean_hop: {:.6}", stats.mean_hop)?;
        writeln!(out, "connectivity_pct: {}", stats.connectivity_pct())?;
    }
    if let Some(prefix) = &a.out {
        write_nodes_csv(t, create(&with_suffix(prefix, ".nodes.csv"))?)?;
        write_links_csv(t, create(&with_suffix(prefix, ".links.csv"))?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn route(a: RouteArgs) -> Result<ExitCode> {
    let net = Network::build(&a.topology)?;
    let t = net.topology();
    let faults = match &a.faults {
        Some(arg) => resolve_fault_arg(t, arg, a.max_fault_fraction)?,
        None => FaultSet::none(t.link_count()),
    };
    let policy = RetryPolicy::with_seed(a.seed.unwrap_or(faults.seed()));
    let router = make_router(&net, a.router, policy)?;
    match router.route(&faults, a.src, a.dst, a.flow_index)? {
        RoutingOutcome::Routed(p) => {
            let nodes: Vec<String> = p.nodes().iter().map(u32::to_string).collect();
            println!("path: {}", nodes.join(" "));
            println!("hops: {}", p.hop_length());
            Ok(ExitCode::SUCCESS)
        }
        RoutingOutcome::Failed(f) => {
            println!("failed: {f}");
            Ok(ExitCode::from(2))
        }
    }
}

fn run(a: RunArgs) -> Result<ExitCode> {
    if a.loads && a.out.is_none() {
        bail!("--loads needs --out");
    }
    let mut spec = ExperimentSpec::new(a.topology, a.router, a.pattern);
    spec.faults = match a.faults {
        Some(arg) => FaultSource::Arg(arg),
        None => FaultSource::Uniform {
            fraction: a.fault_fraction,
            seeds: parse_seeds(&a.seeds)?,
        },
    };
    spec.max_fault_fraction = a.max_fault_fraction;
    spec.workers = a.workers;
    spec.check_paths = a.check_paths;
    spec.max_random_intermediates = a.retries;
    spec.crossing_budget = a.crossing_budget;
    spec.bin_width = a.bin_width;
    let report = harness::run(&spec)?;
    match &a.out {
        None => harness::write_summary_csv(&report.rows, io::stdout().lock())?,
        Some(prefix) => {
            harness::write_summary_csv(&report.rows, create(&with_suffix(prefix, ".summary.csv"))?)?;
            if a.loads {
                let t = report.network.topology();
                for ((row, run), h) in report.rows.iter().zip(&report.runs).zip(&report.histograms) {
                    let tag = format!(".seed{}", row.seed);
                    harness::write_loads_csv(t, &run.table, create(&with_suffix(prefix, &format!("{tag}.loads.csv")))?)?;
                    harness::write_histogram_csv(h, create(&with_suffix(prefix, &format!("{tag}.hist.csv")))?)?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cost(a: CostArgs) -> Result<ExitCode> {
    let families: Vec<_> = a.topology.iter().map(TopologySpec::family).collect();
    let gammas = if a.gamma.is_empty() { harness::gamma_ladder() } else { a.gamma };
    let rows = cost_table(&families, &a.rho, &gammas);
    match &a.out {
        Some(path) => harness::write_cost_csv(&rows, create(path)?)?,
        None => harness::write_cost_csv(&rows, io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&a.grid).with_context(|| format!("reading {}", a.grid.display()))?;
    let grid = parse_grid(&text).with_context(|| format!("in {}", a.grid.display()))?;
    let report = harness::sweep(&grid, &a.out)?;
    eprintln!(
        "{} cells: {} ran, {} resumed, {} failed; wrote {}",
        report.cells,
        report.ran,
        report.resumed,
        report.failed.len(),
        report.output.display()
    );
    for (cell, err) in &report.failed {
        eprintln!("failed {cell}: {err}");
    }
    Ok(if report.failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
