//! Experiment orchestration: network and router selection, parallel flow
//! runs, parameter sweeps, and CSV output.
//!
//! A run builds its network once, then for every fault seed injects a fault
//! set, streams the workload through the router in fixed-size index chunks on
//! a rayon pool, and merges the per-worker load tables. All accumulators are
//! integer sums, so output is identical for any worker count.

mod config;
mod sweep;

pub use config::{parse_config, parse_seeds};
pub use sweep::{parse_grid, sweep, Grid, SweepMode, SweepReport};

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::faults::{inject_uniform, resolve_fault_arg, FaultSet, DEFAULT_MAX_FRACTION};
use crate::graph::{hop_length, validate_path, Family, Topology};
use crate::metrics::{
    abt, cost_normalized, histogram, Histogram, LinkLoadTable, DEFAULT_BIN_WIDTH,
};
use crate::routing::{
    BfsRouter, DPillarMp, DPillarSp, DimensionOrder, GqStarRouting, RetryPolicy, Router, Tor,
    Workspace,
};
use crate::topology::{
    build_dpillar, build_ficonn, build_gq_star, load_base_graph, stellar_transform, DPillar,
    DPillarParams, FiConn, FiConnParams, GqParams, GqStar, StellarMap,
};
use crate::traffic::{generate, FlowStream, PatternSpec};

/// Flows per work unit handed to a worker.
const CHUNK: u64 = 4096;

/// Which network to build: `gqstar:K:N`, `ficonn:K:N`, `dpillar:K:N`, or
/// `stellar:PATH` for the stellar transform of an edge-list file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologySpec {
    GqStar { k: u32, n: u32 },
    FiConn { k: u32, n: u32 },
    DPillar { k: u32, n: u32 },
    Stellar(PathBuf),
}

impl TopologySpec {
    /// The family, known without building; edge-list imports are generic.
    pub fn family(&self) -> Family {
        match *self {
            TopologySpec::GqStar { k, n } => Family::GqStar { k, n },
            TopologySpec::FiConn { k, n } => Family::FiConn { k, n },
            TopologySpec::DPillar { k, n } => Family::DPillar { k, n },
            TopologySpec::Stellar(_) => Family::GenericStellar,
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Stellar(p) => write!(f, "stellar:{}", p.display()),
            other => write!(f, "{}", other.family()),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::argument(format!(
                "unrecognised topology {s:?}; expected FAMILY:K:N or stellar:PATH"
            ))
        };
        if let Some(path) = s.strip_prefix("stellar:") {
            if path.is_empty() {
                return Err(bad());
            }
            return Ok(TopologySpec::Stellar(PathBuf::from(path)));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let [family, k, n] = parts[..] else {
            return Err(bad());
        };
        let (k, n) = (k.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?);
        match family {
            "gqstar" => Ok(TopologySpec::GqStar { k, n }),
            "ficonn" => Ok(TopologySpec::FiConn { k, n }),
            "dpillar" => Ok(TopologySpec::DPillar { k, n }),
            _ => Err(bad()),
        }
    }
}

/// A built network with the family metadata its routers need.
pub enum Network {
    GqStar(GqStar),
    FiConn(FiConn),
    DPillar(DPillar),
    Stellar { topology: Topology, map: StellarMap },
}

impl Network {
    pub fn build(spec: &TopologySpec) -> Result<Self> {
        Ok(match spec {
            TopologySpec::GqStar { k, n } => {
                Network::GqStar(build_gq_star(GqParams::new(*k, *n)?)?)
            }
            TopologySpec::FiConn { k, n } => {
                Network::FiConn(build_ficonn(FiConnParams::new(*k, *n)?)?)
            }
            TopologySpec::DPillar { k, n } => {
                Network::DPillar(build_dpillar(DPillarParams::new(*k, *n)?)?)
            }
            TopologySpec::Stellar(path) => {
                let text = std::fs::read_to_string(path)?;
                let (topology, map) = stellar_transform(&load_base_graph(&text)?)?;
                Network::Stellar { topology, map }
            }
        })
    }

    pub fn topology(&self) -> &Topology {
        match self {
            Network::GqStar(g) => g.topology(),
            Network::FiConn(f) => f.topology(),
            Network::DPillar(d) => d.topology(),
            Network::Stellar { topology, .. } => topology,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RouterKind {
    DimensionOrder,
    GqStar,
    Tor,
    DPillarSp,
    DPillarMp,
    Bfs,
}

impl RouterKind {
    pub const ALL: [RouterKind; 6] = [
        RouterKind::DimensionOrder,
        RouterKind::GqStar,
        RouterKind::Tor,
        RouterKind::DPillarSp,
        RouterKind::DPillarMp,
        RouterKind::Bfs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RouterKind::DimensionOrder => "dimension-order",
            RouterKind::GqStar => "gq-star",
            RouterKind::Tor => "tor",
            RouterKind::DPillarSp => "dpillar-sp",
            RouterKind::DPillarMp => "dpillar-mp",
            RouterKind::Bfs => "bfs",
        }
    }
}

impl fmt::Display for RouterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RouterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = match s {
            "gq-star-routing" => "gq-star",
            other => other,
        };
        RouterKind::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = RouterKind::ALL.iter().map(|r| r.name()).collect();
                Error::argument(format!(
                    "unknown router {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Binds `kind` to `net`, rejecting combinations the router cannot serve.
pub fn make_router<'a>(
    net: &'a Network,
    kind: RouterKind,
    policy: RetryPolicy,
) -> Result<Box<dyn Router + 'a>> {
    Ok(match (kind, net) {
        (RouterKind::Bfs, _) => Box::new(BfsRouter::new(net.topology())),
        (RouterKind::DimensionOrder, Network::GqStar(g)) => Box::new(DimensionOrder::new(g)),
        (RouterKind::GqStar, Network::GqStar(g)) => Box::new(GqStarRouting::new(g, policy)),
        (RouterKind::Tor, Network::FiConn(f)) => Box::new(Tor::new(f)),
        (RouterKind::DPillarSp, Network::DPillar(d)) => Box::new(DPillarSp::new(d)),
        (RouterKind::DPillarMp, Network::DPillar(d)) => Box::new(DPillarMp::new(d, policy)),
        _ => {
            return Err(Error::argument(format!(
                "router {kind} does not apply to {} networks",
                net.topology().family()
            )))
        }
    })
}

/// Where a run's fault sets come from.
#[derive(Clone, Debug, PartialEq)]
pub enum FaultSource {
    /// One uniformly drawn fault set per seed; the seed also seeds routing.
    Uniform { fraction: f64, seeds: Vec<u64> },
    /// A fault file, or a single `fraction:seed`.
    Arg(String),
}

impl Default for FaultSource {
    fn default() -> Self {
        FaultSource::Uniform {
            fraction: 0.0,
            seeds: vec![0],
        }
    }
}

/// One experiment: a network, a router, a workload, and its fault sets.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub topology: TopologySpec,
    pub router: RouterKind,
    pub pattern: PatternSpec,
    pub faults: FaultSource,
    pub max_fault_fraction: f64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// Validate every routed path against the topology and fault set.
    pub check_paths: bool,
    pub max_random_intermediates: u32,
    pub crossing_budget: Option<u32>,
    pub bin_width: u64,
}

impl ExperimentSpec {
    pub fn new(topology: TopologySpec, router: RouterKind, pattern: PatternSpec) -> Self {
        let policy = RetryPolicy::default();
        ExperimentSpec {
            topology,
            router,
            pattern,
            faults: FaultSource::default(),
            max_fault_fraction: DEFAULT_MAX_FRACTION,
            workers: 0,
            check_paths: false,
            max_random_intermediates: policy.max_random_intermediates,
            crossing_budget: policy.crossing_budget,
            bin_width: DEFAULT_BIN_WIDTH,
        }
    }

    fn policy(&self, seed: u64) -> RetryPolicy {
        RetryPolicy {
            max_random_intermediates: self.max_random_intermediates,
            crossing_budget: self.crossing_budget,
            seed,
        }
    }
}

/// Totals from streaming one workload through one router.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowRun {
    pub table: LinkLoadTable,
    /// Sum of hop lengths over routed flows.
    pub hop_sum: u64,
    pub max_hop: u32,
    /// Channels crossed by routed flows, counted per flow.
    pub channel_sum: u64,
}

impl FlowRun {
    fn empty(channels: usize) -> Self {
        FlowRun {
            table: LinkLoadTable::with_channels(channels),
            hop_sum: 0,
            max_hop: 0,
            channel_sum: 0,
        }
    }

    fn merge(mut self, other: FlowRun) -> Self {
        self.table.merge(&other.table);
        self.hop_sum += other.hop_sum;
        self.max_hop = self.max_hop.max(other.max_hop);
        self.channel_sum += other.channel_sum;
        self
    }

    /// Mean hop length over routed flows; 0 when none were routed.
    pub fn mean_hop(&self) -> f64 {
        match self.table.routed() {
            0 => 0.0,
            r => self.hop_sum as f64 / r as f64,
        }
    }
}

/// Routes every flow of `stream` on the current rayon pool.
///
/// Fails with [`Error::Invariant`] if `check_paths` is set and a path is
/// invalid, or if the flow or channel totals do not reconcile.
pub fn run_flows(
    router: &dyn Router,
    faults: &FaultSet,
    stream: &FlowStream,
    check_paths: bool,
) -> Result<FlowRun> {
    router.check_faults(faults)?;
    let topo = router.topology();
    let channels = topo.channel_count() as usize;
    let chunks = stream.len().div_ceil(CHUNK);
    let run = (0..chunks)
        .into_par_iter()
        .try_fold(
            || (FlowRun::empty(channels), Workspace::new(), Vec::new()),
            |(mut acc, mut ws, mut path), c| {
                for i in c * CHUNK..((c + 1) * CHUNK).min(stream.len()) {
                    let f = stream.get(i);
                    if router
                        .route_into(faults, &mut ws, f.src, f.dst, f.index, &mut path)
                        .is_err()
                    {
                        acc.table.record_failure();
                        continue;
                    }
                    if check_paths {
                        validate_path(topo, faults, f.src, f.dst, &path).map_err(|e| {
                            Error::Invariant(format!(
                                "{} flow {i} ({} -> {}): {e}",
                                router.name(),
                                f.src,
                                f.dst
                            ))
                        })?;
                    }
                    let h = hop_length(topo, &path);
                    acc.hop_sum += h as u64;
                    acc.max_hop = acc.max_hop.max(h);
                    acc.channel_sum += path.len() as u64 - 1;
                    acc.table.record_flow(topo, &path);
                }
                Ok::<_, Error>((acc, ws, path))
            },
        )
        .map(|r| r.map(|(acc, _, _)| acc))
        .try_reduce(|| FlowRun::empty(channels), |a, b| Ok(a.merge(b)))?;
    let t = &run.table;
    if t.routed() + t.failed() != stream.len() {
        return Err(Error::Invariant(format!(
            "{} routed + {} failed != {} flows",
            t.routed(),
            t.failed(),
            stream.len()
        )));
    }
    if t.total() != run.channel_sum {
        return Err(Error::Invariant(format!(
            "channel counters sum to {} but flows crossed {} channels",
            t.total(),
            run.channel_sum
        )));
    }
    Ok(run)
}

/// Runs `f` on a pool of `workers` threads, or the global pool for 0.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::argument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// One summary CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub topology: String,
    pub router: String,
    pub pattern: String,
    pub fault_fraction: f64,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "F")]
    pub f: u64,
    /// Absent when no channel carried a flow.
    #[serde(rename = "ABT")]
    pub abt: Option<f64>,
    pub mean_hop: f64,
    pub max_hop: u32,
    pub connectivity_pct: f64,
    pub mean_load_all: f64,
    pub mean_load_used: f64,
    pub unused_channels: u64,
}

/// Results of one experiment, one entry per fault set.
pub struct RunReport {
    pub network: Network,
    pub rows: Vec<SummaryRow>,
    pub runs: Vec<FlowRun>,
    pub histograms: Vec<Histogram>,
}

/// Executes `spec`.
///
/// Connectivity for all-to-all workloads is over all `N²` ordered pairs,
/// self pairs counted as connected; for other workloads it is the routed
/// share of the flows.
pub fn run(spec: &ExperimentSpec) -> Result<RunReport> {
    let network = Network::build(&spec.topology)?;
    let (rows, runs, histograms) = {
        let topo = network.topology();
        // Reject incompatible pairs before any fault set is drawn.
        make_router(&network, spec.router, spec.policy(0))?;
        let stream = generate(spec.pattern, topo)?;
        let fault_sets: Vec<FaultSet> = match &spec.faults {
            FaultSource::Uniform { fraction, seeds } => seeds
                .iter()
                .map(|&s| inject_uniform(topo, *fraction, s, spec.max_fault_fraction))
                .collect::<Result<_>>()?,
            FaultSource::Arg(arg) => vec![resolve_fault_arg(topo, arg, spec.max_fault_fraction)?],
        };
        let mut rows = Vec::with_capacity(fault_sets.len());
        let mut runs = Vec::with_capacity(fault_sets.len());
        let mut histograms = Vec::with_capacity(fault_sets.len());
        for faults in &fault_sets {
            let router = make_router(&network, spec.router, spec.policy(faults.seed()))?;
            let flow_run = with_workers(spec.workers, || {
                run_flows(router.as_ref(), faults, &stream, spec.check_paths)
            })??;
            let h = histogram(&flow_run.table, topo, spec.bin_width)?;
            rows.push(summarize(spec, topo, faults, &stream, &flow_run, &h));
            runs.push(flow_run);
            histograms.push(h);
        }
        (rows, runs, histograms)
    };
    Ok(RunReport {
        network,
        rows,
        runs,
        histograms,
    })
}

fn summarize(
    spec: &ExperimentSpec,
    topo: &Topology,
    faults: &FaultSet,
    stream: &FlowStream,
    run: &FlowRun,
    h: &Histogram,
) -> SummaryRow {
    let n = topo.server_count() as u64;
    let f = run.table.bottleneck();
    let routed = run.table.routed();
    let connectivity_pct = match spec.pattern {
        PatternSpec::AllToAll if n > 0 => 100.0 * (routed + n) as f64 / (n * n) as f64,
        _ if stream.is_empty() => 100.0,
        _ => 100.0 * routed as f64 / stream.len() as f64,
    };
    SummaryRow {
        topology: spec.topology.to_string(),
        router: spec.router.to_string(),
        pattern: spec.pattern.to_string(),
        fault_fraction: faults.fraction(),
        seed: faults.seed(),
        n,
        f,
        abt: abt(n, f, 1.0).ok(),
        mean_hop: run.mean_hop(),
        max_hop: run.max_hop,
        connectivity_pct,
        mean_load_all: h.mean_load_all,
        mean_load_used: h.mean_load_used,
        unused_channels: h.unused_channels(),
    }
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 14] = [
    "topology",
    "router",
    "pattern",
    "fault_fraction",
    "seed",
    "N",
    "F",
    "ABT",
    "mean_hop",
    "max_hop",
    "connectivity_pct",
    "mean_load_all",
    "mean_load_used",
    "unused_channels",
];

/// Per-channel loads as `channel_src, channel_dst, flows`.
pub fn write_loads_csv<W: Write>(topology: &Topology, table: &LinkLoadTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["channel_src", "channel_dst", "flows"])?;
    for (c, &flows) in table.loads().iter().enumerate() {
        let (u, v) = topology.channel_endpoints(c as u32);
        w.serialize((u, v, flows))?;
    }
    w.flush()?;
    Ok(())
}

/// Load histogram as `bin_lo, bin_hi, channels`.
pub fn write_histogram_csv<W: Write>(h: &Histogram, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_lo", "bin_hi", "channels"])?;
    for (i, &count) in h.bins.iter().enumerate() {
        let lo = i as u64 * h.bin_width;
        w.serialize((lo, lo + h.bin_width, count))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostRow {
    pub family: String,
    pub k: Option<u32>,
    pub n: Option<u32>,
    pub rho: f64,
    pub gamma: f64,
    pub cost_norm: f64,
}

/// Switch-port cost ratios of the default cost sweep.
pub const RHO_LADDER: [f64; 5] = [0.01, 0.02, 0.04, 0.08, 0.16];

/// Cable cost ratios 0.1, 0.15, ..., 0.6.
pub fn gamma_ladder() -> Vec<f64> {
    (0..=10).map(|i| 0.1 + 0.05 * i as f64).collect()
}

/// Normalized cost for every family, `rho`, and `gamma`, in that nesting.
pub fn cost_table(families: &[Family], rhos: &[f64], gammas: &[f64]) -> Vec<CostRow> {
    let mut rows = Vec::with_capacity(families.len() * rhos.len() * gammas.len());
    for &family in families {
        let (name, k, n) = match family {
            Family::GqStar { k, n } => ("gqstar", Some(k), Some(n)),
            Family::FiConn { k, n } => ("ficonn", Some(k), Some(n)),
            Family::DPillar { k, n } => ("dpillar", Some(k), Some(n)),
            Family::GenericStellar => ("stellar", None, None),
        };
        for &rho in rhos {
            for &gamma in gammas {
                rows.push(CostRow {
                    family: name.to_string(),
                    k,
                    n,
                    rho,
                    gamma,
                    cost_norm: cost_normalized(family, rho, gamma),
                });
            }
        }
    }
    rows
}

pub fn write_cost_csv<W: Write>(rows: &[CostRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["family", "k", "n", "rho", "gamma", "cost_norm"])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
