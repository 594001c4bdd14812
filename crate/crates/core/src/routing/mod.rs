//! Routing strategies.
//!
//! Every strategy implements [`Router`]. The hot entry point is
//! [`Router::route_into`], which writes the path (switches included) into a
//! caller-owned buffer and borrows scratch space from a [`Workspace`].

mod bfs;
mod dpillar;
mod gqstar;
mod tor;

pub use bfs::BfsRouter;
pub use dpillar::{DPillarMp, DPillarSp};
pub use gqstar::{DimensionOrder, GqStarRouting};
pub use tor::Tor;

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::faults::FaultSet;
use crate::graph::{BfsScratch, NodeId, Path, Topology};

/// Why a route could not be produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Failure {
    NoRouteFound,
    /// Neither attachment option of an endpoint is usable.
    AttachmentFault,
    GaveUpAfterRetries,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::NoRouteFound => "no route found",
            Failure::AttachmentFault => "attachment fault",
            Failure::GaveUpAfterRetries => "gave up after retries",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoutingOutcome {
    Routed(Path),
    Failed(Failure),
}

impl RoutingOutcome {
    pub fn path(&self) -> Option<&Path> {
        match self {
            RoutingOutcome::Routed(p) => Some(p),
            RoutingOutcome::Failed(_) => None,
        }
    }
}

/// Retry and search limits for the fault-tolerant strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_random_intermediates: u32,
    /// Cap on search steps per direct attempt; `None` means `8·k·n`.
    pub crossing_budget: Option<u32>,
    pub seed: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_random_intermediates: 4,
            crossing_budget: None,
            seed: 0,
        }
    }
}

impl RetryPolicy {
    pub fn with_seed(seed: u64) -> Self {
        RetryPolicy {
            seed,
            ..Self::default()
        }
    }

    pub(crate) fn budget(&self, k: u32, n: u32) -> u32 {
        self.crossing_budget.unwrap_or(8 * k * n)
    }
}

/// Per-worker scratch space, reused across flows.
#[derive(Debug, Default)]
pub struct Workspace {
    pub(crate) bfs: BfsScratch,
    bfs_faults: Option<u64>,
    pub(crate) buf: Vec<NodeId>,
    pub(crate) stack: Vec<NodeId>,
    stamps: Vec<u32>,
    epoch: u32,
    spill: HashSet<u64>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a fresh marking round over `size` slots.
    pub(crate) fn begin_marks(&mut self, size: usize) {
        if size > 1 << 22 {
            self.spill.clear();
            self.stamps.clear();
            return;
        }
        if self.stamps.len() < size {
            self.stamps.resize(size, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.fill(0);
            self.epoch = 1;
        }
    }

    #[inline]
    pub(crate) fn mark(&mut self, slot: u64) {
        if self.stamps.is_empty() {
            self.spill.insert(slot);
        } else {
            self.stamps[slot as usize] = self.epoch;
        }
    }

    #[inline]
    pub(crate) fn is_marked(&self, slot: u64) -> bool {
        if self.stamps.is_empty() {
            self.spill.contains(&slot)
        } else {
            self.stamps[slot as usize] == self.epoch
        }
    }

    /// BFS tree from `src` under `faults`, reusing the cached one when possible.
    pub(crate) fn bfs_from(
        &mut self,
        topology: &Topology,
        faults: &FaultSet,
        src: NodeId,
    ) -> &BfsScratch {
        let key = faults.id();
        if self.bfs.source() != Some(src) || self.bfs_faults != Some(key) {
            self.bfs.run(topology, faults, src);
            self.bfs_faults = Some(key);
        }
        &self.bfs
    }

    /// Drops cached state tied to a particular fault set.
    pub fn reset(&mut self) {
        self.bfs.invalidate();
        self.bfs_faults = None;
    }
}

/// A routing strategy bound to one topology.
pub trait Router: Sync {
    /// Registry name, as accepted on the command line.
    fn name(&self) -> &'static str;

    fn topology(&self) -> &Topology;

    fn fault_tolerant(&self) -> bool;

    /// Rejects fault sets this strategy cannot handle.
    fn check_faults(&self, faults: &FaultSet) -> Result<()> {
        if !self.fault_tolerant() && !faults.is_empty() {
            return Err(Error::domain(format!(
                "{} is not fault-tolerant; {} links are failed",
                self.name(),
                faults.len()
            )));
        }
        Ok(())
    }

    /// Routes server `s` to server `t`, writing nodes into `out`.
    ///
    /// Callers must have passed `faults` through [`check_faults`](Self::check_faults)
    /// and supply valid server ids. `flow_index` seeds any randomness.
    fn route_into(
        &self,
        faults: &FaultSet,
        ws: &mut Workspace,
        s: NodeId,
        t: NodeId,
        flow_index: u64,
        out: &mut Vec<NodeId>,
    ) -> std::result::Result<(), Failure>;

    /// Checked single-pair entry point.
    fn route(
        &self,
        faults: &FaultSet,
        s: NodeId,
        t: NodeId,
        flow_index: u64,
    ) -> Result<RoutingOutcome> {
        self.check_faults(faults)?;
        let topology = self.topology();
        topology.check_server(s)?;
        topology.check_server(t)?;
        let mut ws = Workspace::new();
        let mut out = Vec::new();
        Ok(
            match self.route_into(faults, &mut ws, s, t, flow_index, &mut out) {
                Ok(()) => RoutingOutcome::Routed(Path::new(topology, out)),
                Err(f) => RoutingOutcome::Failed(f),
            },
        )
    }
}

/// Registered router names.
pub const ROUTER_NAMES: [&str; 6] = [
    "dimension-order",
    "gq-star",
    "tor",
    "dpillar-sp",
    "dpillar-mp",
    "bfs",
];
