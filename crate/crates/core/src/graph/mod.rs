//! Role-typed topology representation shared by every other module.
//!
//! Node identifiers are dense: servers occupy `0..server_count()` and switches
//! follow. Links are stored once, unordered; the two directional channels of
//! link `l` are `2l` (from `link(l)[0]`) and `2l + 1` (from `link(l)[1]`).

mod bfs;
mod disjoint;

pub use bfs::{all_pairs_stats, bfs_tree, BfsScratch, BfsTree, DistanceStats, PairOracle};
pub use disjoint::{parallel_paths, server_parallel_paths};

use std::fmt;

use crate::error::{Error, Result};
use crate::faults::FaultSet;

pub type NodeId = u32;
pub type LinkId = u32;
pub type ChannelId = u32;

/// Upper bound on the node count of any constructed topology.
pub const DEFAULT_MAX_NODES: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Server,
    Switch,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Server => f.write_str("server"),
            NodeKind::Switch => f.write_str("switch"),
        }
    }
}

/// Which construction produced a topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    GqStar { k: u32, n: u32 },
    FiConn { k: u32, n: u32 },
    DPillar { k: u32, n: u32 },
    GenericStellar,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::GqStar { k, n } => write!(f, "gqstar:{k}:{n}"),
            Family::FiConn { k, n } => write!(f, "ficonn:{k}:{n}"),
            Family::DPillar { k, n } => write!(f, "dpillar:{k}:{n}"),
            Family::GenericStellar => f.write_str("stellar"),
        }
    }
}

/// One adjacency entry: the neighbour and the link reaching it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adjacent {
    pub node: NodeId,
    pub link: LinkId,
}

/// Immutable server-centric, dual-port network.
#[derive(Clone, Debug)]
pub struct Topology {
    servers: u32,
    switches: u32,
    offsets: Vec<u32>,
    adjacency: Vec<Adjacent>,
    links: Vec<[NodeId; 2]>,
    link_tags: Vec<u32>,
    labels: Option<Vec<Vec<u32>>>,
    family: Family,
}

impl Topology {
    pub fn server_count(&self) -> u32 {
        self.servers
    }

    pub fn switch_count(&self) -> u32 {
        self.switches
    }

    pub fn node_count(&self) -> u32 {
        self.servers + self.switches
    }

    pub fn link_count(&self) -> u32 {
        self.links.len() as u32
    }

    /// Number of directional channels (two per link).
    pub fn channel_count(&self) -> u32 {
        2 * self.links.len() as u32
    }

    pub fn family(&self) -> Family {
        self.family
    }

    #[inline]
    pub fn is_server(&self, v: NodeId) -> bool {
        v < self.servers
    }

    #[inline]
    pub fn kind(&self, v: NodeId) -> NodeKind {
        if v < self.servers {
            NodeKind::Server
        } else {
            NodeKind::Switch
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v < self.node_count()
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[Adjacent] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.adjacency[lo..hi]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    pub fn links(&self) -> &[[NodeId; 2]] {
        &self.links
    }

    #[inline]
    pub fn link(&self, l: LinkId) -> [NodeId; 2] {
        self.links[l as usize]
    }

    /// Level (FiConn), dimension (GQ*), or switch column (DPillar) of a link.
    pub fn link_tag(&self, l: LinkId) -> u32 {
        self.link_tags[l as usize]
    }

    pub fn label(&self, v: NodeId) -> Option<&[u32]> {
        self.labels.as_ref().map(|ls| ls[v as usize].as_slice())
    }

    /// The link joining `u` and `v`, if any.
    ///
    /// Every link has a server endpoint and servers have at most two ports, so
    /// this is a constant-time scan.
    #[inline]
    pub fn link_between(&self, u: NodeId, v: NodeId) -> Option<LinkId> {
        let (probe, other) = if self.is_server(u) { (u, v) } else { (v, u) };
        self.neighbors(probe)
            .iter()
            .find(|a| a.node == other)
            .map(|a| a.link)
    }

    /// Directional channel used when traversing from `u` to `v`.
    #[inline]
    pub fn channel(&self, u: NodeId, v: NodeId) -> Option<ChannelId> {
        let l = self.link_between(u, v)?;
        Some(2 * l + u32::from(self.links[l as usize][0] != u))
    }

    /// `(from, to)` of a directional channel.
    pub fn channel_endpoints(&self, c: ChannelId) -> (NodeId, NodeId) {
        let [a, b] = self.links[(c / 2) as usize];
        if c % 2 == 0 {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Largest switch degree ("switch-ports").
    pub fn max_switch_degree(&self) -> usize {
        (self.servers..self.node_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Server NIC ports left uncabled under the dual-port model.
    pub fn dangling_server_ports(&self) -> u64 {
        (0..self.servers).map(|s| 2 - self.degree(s) as u64).sum()
    }

    /// Server ids, in ascending order.
    pub fn servers(&self) -> std::ops::Range<NodeId> {
        0..self.servers
    }

    pub(crate) fn check_node(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::argument(format!(
                "node {v} is not in a topology of {} nodes",
                self.node_count()
            )))
        }
    }

    pub(crate) fn check_server(&self, v: NodeId) -> Result<()> {
        self.check_node(v)?;
        if self.is_server(v) {
            Ok(())
        } else {
            Err(Error::argument(format!(
                "node {v} is a switch, not a server"
            )))
        }
    }
}

/// Incremental constructor; all invariants are checked in [`build`](Self::build).
#[derive(Debug)]
pub struct TopologyBuilder {
    servers: u32,
    switches: u32,
    links: Vec<[NodeId; 2]>,
    link_tags: Vec<u32>,
    labels: Option<Vec<Vec<u32>>>,
    family: Family,
}

impl TopologyBuilder {
    pub fn new(servers: u32, switches: u32, family: Family) -> Self {
        TopologyBuilder {
            servers,
            switches,
            links: Vec::new(),
            link_tags: Vec::new(),
            labels: None,
            family,
        }
    }

    pub fn with_link_capacity(mut self, links: usize) -> Self {
        self.links.reserve_exact(links);
        self.link_tags.reserve_exact(links);
        self
    }

    pub fn labels(mut self, labels: Vec<Vec<u32>>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn add_link(&mut self, u: NodeId, v: NodeId, tag: u32) -> LinkId {
        let id = self.links.len() as LinkId;
        self.links.push([u, v]);
        self.link_tags.push(tag);
        id
    }

    pub fn build(self) -> Result<Topology> {
        let n = self.servers as u64 + self.switches as u64;
        if n > u32::MAX as u64 {
            return Err(Error::Capacity {
                what: "topology".into(),
                requested: n,
                limit: u32::MAX as u64,
            });
        }
        let n = n as usize;
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::argument(format!(
                    "{} labels for {n} nodes",
                    labels.len()
                )));
            }
        }
        let mut degree = vec![0u32; n];
        for (l, &[u, v]) in self.links.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(Error::argument(format!(
                    "link {l} references a missing node"
                )));
            }
            if u == v {
                return Err(Error::domain(format!("link {l} is a self-loop at {u}")));
            }
            if u >= self.servers && v >= self.servers {
                return Err(Error::domain(format!(
                    "link {l} joins two switches ({u}, {v})"
                )));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        for s in 0..self.servers as usize {
            if !(1..=2).contains(&degree[s]) {
                return Err(Error::domain(format!(
                    "server {s} has degree {}, expected 1 or 2",
                    degree[s]
                )));
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![Adjacent { node: 0, link: 0 }; acc as usize];
        for (l, &[u, v]) in self.links.iter().enumerate() {
            let l = l as LinkId;
            adjacency[fill[u as usize] as usize] = Adjacent { node: v, link: l };
            fill[u as usize] += 1;
            adjacency[fill[v as usize] as usize] = Adjacent { node: u, link: l };
            fill[v as usize] += 1;
        }
        // Any duplicate link has a server endpoint, whose two ports would then
        // lead to the same neighbour.
        for s in 0..self.servers as usize {
            let adj = &adjacency[offsets[s] as usize..offsets[s + 1] as usize];
            if adj.len() == 2 && adj[0].node == adj[1].node {
                return Err(Error::domain(format!(
                    "duplicate link between {s} and {}",
                    adj[0].node
                )));
            }
        }
        Ok(Topology {
            servers: self.servers,
            switches: self.switches,
            offsets,
            adjacency,
            links: self.links,
            link_tags: self.link_tags,
            labels: self.labels,
            family: self.family,
        })
    }
}

/// A routed server-to-server path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    nodes: Vec<NodeId>,
    hop_length: u32,
}

impl Path {
    pub fn new(topology: &Topology, nodes: Vec<NodeId>) -> Self {
        let hop_length = hop_length(topology, &nodes);
        Path { nodes, hop_length }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Server-nodes on the path, minus one.
    pub fn hop_length(&self) -> u32 {
        self.hop_length
    }

    pub fn into_nodes(self) -> Vec<NodeId> {
        self.nodes
    }
}

/// Server-nodes in `nodes`, minus one (zero for an empty sequence).
#[inline]
pub fn hop_length(topology: &Topology, nodes: &[NodeId]) -> u32 {
    let servers = nodes.iter().filter(|&&v| topology.is_server(v)).count() as u32;
    servers.saturating_sub(1)
}

/// Checks that `nodes` is a simple `src`→`dst` path over live links.
pub fn validate_path(
    topology: &Topology,
    faults: &FaultSet,
    src: NodeId,
    dst: NodeId,
    nodes: &[NodeId],
) -> std::result::Result<(), String> {
    match (nodes.first(), nodes.last()) {
        (Some(&a), Some(&b)) if a == src && b == dst => {}
        _ => return Err(format!("path does not run from {src} to {dst}: {nodes:?}")),
    }
    for w in nodes.windows(2) {
        match topology.link_between(w[0], w[1]) {
            None => return Err(format!("{} and {} are not adjacent", w[0], w[1])),
            Some(l) if faults.is_failed(l) => {
                return Err(format!("path crosses failed link {} -- {}", w[0], w[1]))
            }
            Some(_) => {}
        }
    }
    for (i, v) in nodes.iter().enumerate() {
        if nodes[i + 1..].contains(v) {
            return Err(format!("node {v} repeats in {nodes:?}"));
        }
    }
    Ok(())
}

/// Removes cycles from a walk, keeping the first occurrence of each node.
pub fn strip_loops(walk: &mut Vec<NodeId>) {
    let mut out = 0usize;
    for i in 0..walk.len() {
        let v = walk[i];
        match walk[..out].iter().position(|&u| u == v) {
            Some(j) => out = j + 1,
            None => {
                walk[out] = v;
                out += 1;
            }
        }
    }
    walk.truncate(out);
}
