use super::base::{BaseGraph, GqParams};
use crate::error::{Error, Result};
use crate::graph::{Family, NodeId, Topology, TopologyBuilder, DEFAULT_MAX_NODES};

/// Correspondence between a base graph and its stellar transform.
///
/// Base edge `e = (u, v)` with `u < v` carries servers `2e` (attached to
/// switch `u`) and `2e + 1` (attached to switch `v`). Base node `u` becomes
/// switch `S + u`, where `S = 2|E|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StellarMap {
    servers: u32,
    edges: Vec<[u32; 2]>,
}

impl StellarMap {
    pub fn server_count(&self) -> u32 {
        self.servers
    }

    pub fn edge_servers(&self, e: u32) -> (NodeId, NodeId) {
        (2 * e, 2 * e + 1)
    }

    #[inline]
    pub fn edge_of(&self, server: NodeId) -> u32 {
        server / 2
    }

    #[inline]
    pub fn switch_of(&self, base_node: u32) -> NodeId {
        self.servers + base_node
    }

    pub fn base_node_of(&self, switch: NodeId) -> Option<u32> {
        switch.checked_sub(self.servers)
    }

    /// Base node whose switch the server is attached to.
    #[inline]
    pub fn base_attachment(&self, server: NodeId) -> u32 {
        self.edges[(server / 2) as usize][(server & 1) as usize]
    }

    #[inline]
    pub fn partner(&self, server: NodeId) -> NodeId {
        server ^ 1
    }

    /// `(attachment switch, partner server)`.
    #[inline]
    pub fn attachment(&self, server: NodeId) -> (NodeId, NodeId) {
        (self.switch_of(self.base_attachment(server)), server ^ 1)
    }
}

/// Places two servers on every base edge; base nodes become switches.
pub fn stellar_transform(base: &BaseGraph) -> Result<(Topology, StellarMap)> {
    if base.edge_count() == 0 {
        return Err(Error::domain("stellar transform needs at least one edge"));
    }
    if !base.is_connected() {
        return Err(Error::domain(
            "stellar transform needs a connected base graph",
        ));
    }
    let servers = 2 * base.edge_count() as u64;
    let total = servers + base.node_count() as u64;
    if total > DEFAULT_MAX_NODES {
        return Err(Error::Capacity {
            what: "stellar transform".into(),
            requested: total,
            limit: DEFAULT_MAX_NODES,
        });
    }
    let servers = servers as u32;
    let labels = base.labels();
    let gq = base.gq_params();
    let family = match gq {
        Some(GqParams { k, n }) => Family::GqStar { k, n },
        None => Family::GenericStellar,
    };
    let mut b = TopologyBuilder::new(servers, base.node_count(), family)
        .with_link_capacity(3 * base.edge_count() as usize);
    for (e, &[u, v]) in base.edges().iter().enumerate() {
        let tag = match labels {
            Some(ls) if gq.is_some() => differing_coordinate(&ls[u as usize], &ls[v as usize]),
            _ => 0,
        };
        let (a, c) = (2 * e as u32, 2 * e as u32 + 1);
        b.add_link(a, servers + u, tag);
        b.add_link(a, c, tag);
        b.add_link(c, servers + v, tag);
    }
    if let Some(ls) = labels {
        let mut out = Vec::with_capacity((servers + base.node_count()) as usize);
        for &[u, v] in base.edges() {
            let dim = differing_coordinate(&ls[u as usize], &ls[v as usize]) as usize;
            for (x, y) in [(u, v), (v, u)] {
                let mut l = ls[x as usize].clone();
                l.push(ls[y as usize].get(dim).copied().unwrap_or(y));
                out.push(l);
            }
        }
        out.extend(ls.iter().cloned());
        b = b.labels(out);
    }
    let topology = b.build()?;
    let map = StellarMap {
        servers,
        edges: base.edges().to_vec(),
    };
    Ok((topology, map))
}

fn differing_coordinate(a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).position(|(x, y)| x != y).unwrap_or(0) as u32
}

/// Recovers the base graph of a topology in which every server has exactly
/// one server neighbour and one switch neighbour.
pub fn inverse_stellar(topology: &Topology) -> Result<BaseGraph> {
    let s = topology.server_count();
    let mut edges = Vec::with_capacity(s as usize / 2);
    for x in 0..s {
        let mut switch = None;
        let mut partner = None;
        for a in topology.neighbors(x) {
            if topology.is_server(a.node) {
                partner = Some(a.node);
            } else {
                switch = Some(a.node);
            }
        }
        let (Some(w), Some(p)) = (switch, partner) else {
            return Err(Error::domain(format!(
                "server {x} does not have one switch and one server neighbour"
            )));
        };
        if x < p {
            let q = topology
                .neighbors(p)
                .iter()
                .find(|a| !topology.is_server(a.node))
                .map(|a| a.node)
                .ok_or_else(|| Error::domain(format!("server {p} has no switch")))?;
            edges.push((w - s, q - s));
        }
    }
    BaseGraph::from_edges(topology.switch_count(), edges)
}
