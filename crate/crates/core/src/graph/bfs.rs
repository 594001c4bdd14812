use rayon::prelude::*;

use super::{hop_length, NodeId, Topology};
use crate::error::Result;
use crate::faults::FaultSet;
use crate::routing::{Router, Workspace};

const UNREACHED: u32 = u32::MAX;

/// Reusable buffers for server-hop BFS.
///
/// Distances are kept in half-steps: a server at hop `d` stores `2d`, a switch
/// first reached from a server at hop `d` stores `2d + 1`.
#[derive(Clone, Debug, Default)]
pub struct BfsScratch {
    half: Vec<u32>,
    parent: Vec<NodeId>,
    queue: Vec<NodeId>,
    source: Option<NodeId>,
}

impl BfsScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Source of the tree currently held, if any.
    pub fn source(&self) -> Option<NodeId> {
        self.source
    }

    pub(crate) fn invalidate(&mut self) {
        self.source = None;
    }

    /// Runs BFS from `src`, replacing the held tree.
    pub fn run(&mut self, topology: &Topology, faults: &FaultSet, src: NodeId) {
        let n = topology.node_count() as usize;
        self.half.clear();
        self.half.resize(n, UNREACHED);
        self.parent.clear();
        self.parent.resize(n, NodeId::MAX);
        self.queue.clear();
        self.half[src as usize] = 0;
        self.queue.push(src);
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            let d = self.half[x as usize];
            for a in topology.neighbors(x) {
                if faults.is_failed(a.link) || self.half[a.node as usize] != UNREACHED {
                    continue;
                }
                if topology.is_server(a.node) {
                    self.half[a.node as usize] = d + 2;
                    self.parent[a.node as usize] = x;
                    self.queue.push(a.node);
                    continue;
                }
                let w = a.node;
                self.half[w as usize] = d + 1;
                self.parent[w as usize] = x;
                for b in topology.neighbors(w) {
                    if faults.is_failed(b.link) || self.half[b.node as usize] != UNREACHED {
                        continue;
                    }
                    self.half[b.node as usize] = d + 2;
                    self.parent[b.node as usize] = w;
                    self.queue.push(b.node);
                }
            }
        }
        self.source = Some(src);
    }

    /// Hop distance to server `v` from the held source.
    #[inline]
    pub fn distance(&self, v: NodeId) -> Option<u32> {
        match self.half[v as usize] {
            UNREACHED => None,
            h => Some(h / 2),
        }
    }

    /// Writes the tree path from the held source to `t` into `out`.
    pub fn path_into(&self, t: NodeId, out: &mut Vec<NodeId>) -> bool {
        out.clear();
        if self.half.get(t as usize).copied().unwrap_or(UNREACHED) == UNREACHED {
            return false;
        }
        let mut v = t;
        out.push(v);
        while self.half[v as usize] != 0 {
            v = self.parent[v as usize];
            out.push(v);
        }
        out.reverse();
        true
    }

    /// Servers reached, including the source, and the sum of their distances.
    fn census(&self, topology: &Topology) -> (u64, u64, u32) {
        let mut count = 0u64;
        let mut sum = 0u64;
        let mut max = 0u32;
        for &v in &self.queue {
            if topology.is_server(v) {
                let d = self.half[v as usize] / 2;
                count += 1;
                sum += d as u64;
                max = max.max(d);
            }
        }
        (count, sum, max)
    }
}

/// Owned result of a single-source BFS.
#[derive(Clone, Debug)]
pub struct BfsTree {
    topology_servers: u32,
    scratch: BfsScratch,
}

impl BfsTree {
    pub fn source(&self) -> NodeId {
        self.scratch.source.unwrap_or(0)
    }

    /// Hop distance to `v`; `None` for switches and unreachable servers.
    pub fn distance(&self, v: NodeId) -> Option<u32> {
        if v >= self.topology_servers || v as usize >= self.scratch.half.len() {
            return None;
        }
        self.scratch.distance(v)
    }

    /// Distances of all servers, indexed by server id.
    pub fn server_distances(&self) -> Vec<Option<u32>> {
        (0..self.topology_servers)
            .map(|v| self.scratch.distance(v))
            .collect()
    }

    /// A shortest path from the source to `t`, switches included.
    pub fn path_to(&self, t: NodeId) -> Option<Vec<NodeId>> {
        let mut out = Vec::new();
        self.scratch.path_into(t, &mut out).then_some(out)
    }
}

/// Single-source shortest hop distances from server `src`.
pub fn bfs_tree(topology: &Topology, src: NodeId, faults: &FaultSet) -> Result<BfsTree> {
    topology.check_server(src)?;
    let mut scratch = BfsScratch::new();
    scratch.run(topology, faults, src);
    Ok(BfsTree {
        topology_servers: topology.server_count(),
        scratch,
    })
}

/// Aggregate distance and connectivity figures over all ordered server pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DistanceStats {
    /// Mean hop over connected pairs with `s != t`; 0 when there are none.
    pub mean_hop: f64,
    pub max_hop: u32,
    /// Connected ordered pairs, self pairs included.
    pub connected_ordered_pairs: u64,
    /// `N²`.
    pub denominator: u64,
    /// Sum of hop lengths over connected pairs with `s != t`.
    pub hop_sum: u64,
    /// Number of connected pairs with `s != t`.
    pub hop_pairs: u64,
}

impl DistanceStats {
    pub fn connectivity_pct(&self) -> f64 {
        if self.denominator == 0 {
            100.0
        } else {
            100.0 * self.connected_ordered_pairs as f64 / self.denominator as f64
        }
    }

    fn finish(mut self) -> Self {
        self.mean_hop = if self.hop_pairs == 0 {
            0.0
        } else {
            self.hop_sum as f64 / self.hop_pairs as f64
        };
        self
    }

    fn merge(a: Self, b: Self) -> Self {
        DistanceStats {
            mean_hop: 0.0,
            max_hop: a.max_hop.max(b.max_hop),
            connected_ordered_pairs: a.connected_ordered_pairs + b.connected_ordered_pairs,
            denominator: a.denominator + b.denominator,
            hop_sum: a.hop_sum + b.hop_sum,
            hop_pairs: a.hop_pairs + b.hop_pairs,
        }
    }
}

/// How pairs are connected in [`all_pairs_stats`].
#[derive(Clone, Copy)]
pub enum PairOracle<'a> {
    Bfs,
    Routed(&'a dyn Router),
}

/// Exhaustive all-pairs statistics, parallel over sources.
///
/// A routed pair uses its index in the all-to-all flow stream,
/// `s · (N − 1) + t − [t > s]`, so results match an all-to-all run. Router
/// failures count as unconnected pairs.
pub fn all_pairs_stats(
    topology: &Topology,
    faults: &FaultSet,
    oracle: PairOracle<'_>,
) -> Result<DistanceStats> {
    let n = topology.server_count();
    if let PairOracle::Routed(r) = oracle {
        r.check_faults(faults)?;
    }
    let stats = (0..n)
        .into_par_iter()
        .map_init(
            || (Workspace::new(), Vec::new()),
            |(ws, path), s| {
                let mut acc = DistanceStats {
                    denominator: n as u64,
                    ..Default::default()
                };
                match oracle {
                    PairOracle::Bfs => {
                        ws.bfs.run(topology, faults, s);
                        let (count, sum, max) = ws.bfs.census(topology);
                        acc.connected_ordered_pairs = count;
                        acc.hop_sum = sum;
                        acc.hop_pairs = count - 1;
                        acc.max_hop = max;
                    }
                    PairOracle::Routed(r) => {
                        acc.connected_ordered_pairs = 1;
                        for t in 0..n {
                            if t == s {
                                continue;
                            }
                            let index = s as u64 * (n as u64 - 1) + t as u64 - u64::from(t > s);
                            if r.route_into(faults, ws, s, t, index, path).is_ok() {
                                let h = hop_length(topology, path);
                                acc.connected_ordered_pairs += 1;
                                acc.hop_pairs += 1;
                                acc.hop_sum += h as u64;
                                acc.max_hop = acc.max_hop.max(h);
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(DistanceStats::default, DistanceStats::merge);
    Ok(stats.finish())
}
