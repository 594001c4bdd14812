use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::DEFAULT_MAX_NODES;

/// A simple undirected graph used as input to the stellar transform.
///
/// Edges are stored with `u < v`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    nodes: u32,
    edges: Vec<[u32; 2]>,
    offsets: Vec<u32>,
    adjacency: Vec<u32>,
    labels: Option<Vec<Vec<u32>>>,
    gq: Option<GqParams>,
}

impl BaseGraph {
    /// Builds a graph on nodes `0..nodes`; self-loops and duplicates are errors.
    pub fn from_edges(nodes: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut list = Vec::new();
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u >= nodes || v >= nodes {
                return Err(Error::argument(format!(
                    "edge ({u}, {v}) references a node outside 0..{nodes}"
                )));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at {u}")));
            }
            let e = [u.min(v), u.max(v)];
            if !seen.insert(e) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
            list.push(e);
        }
        Ok(Self::from_sorted_unique(nodes, list))
    }

    fn from_sorted_unique(nodes: u32, mut edges: Vec<[u32; 2]>) -> Self {
        edges.sort_unstable();
        let mut degree = vec![0u32; nodes as usize];
        for &[u, v] in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0u32; nodes as usize + 1];
        for i in 0..nodes as usize {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets[..nodes as usize].to_vec();
        let mut adjacency = vec![0u32; offsets[nodes as usize] as usize];
        for &[u, v] in &edges {
            adjacency[fill[u as usize] as usize] = v;
            fill[u as usize] += 1;
            adjacency[fill[v as usize] as usize] = u;
            fill[v as usize] += 1;
        }
        BaseGraph {
            nodes,
            edges,
            offsets,
            adjacency,
            labels: None,
            gq: None,
        }
    }

    pub fn node_count(&self) -> u32 {
        self.nodes
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn labels(&self) -> Option<&[Vec<u32>]> {
        self.labels.as_deref()
    }

    /// Parameters when this graph came from [`build_gq`].
    pub fn gq_params(&self) -> Option<GqParams> {
        self.gq
    }

    /// BFS distances from `src`; `None` marks unreachable nodes.
    pub fn distances(&self, src: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.nodes as usize];
        dist[src as usize] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap();
            for &v in self.neighbors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.nodes > 0 && self.distances(0).iter().all(Option::is_some)
    }

    /// Largest BFS distance; `None` if disconnected or empty.
    pub fn diameter(&self) -> Option<u32> {
        if !self.is_connected() {
            return None;
        }
        (0..self.nodes)
            .map(|s| {
                self.distances(s)
                    .into_iter()
                    .map(|d| d.unwrap())
                    .max()
                    .unwrap_or(0)
            })
            .max()
    }
}

/// Parameters of the generalized hypercube `GQ_{k,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GqParams {
    pub k: u32,
    pub n: u32,
}

impl GqParams {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::argument("GQ needs k >= 1"));
        }
        if n < 2 {
            return Err(Error::argument("GQ needs n >= 2"));
        }
        Ok(GqParams { k, n })
    }

    /// `n^k`, or `None` on overflow.
    pub fn node_count(&self) -> Option<u64> {
        (self.n as u64).checked_pow(self.k)
    }

    pub fn degree(&self) -> u64 {
        self.k as u64 * (self.n as u64 - 1)
    }

    pub fn edge_count(&self) -> Option<u64> {
        self.node_count()?.checked_mul(self.degree()).map(|x| x / 2)
    }
}

/// Builds `GQ_{k,n}` within the default node limit.
pub fn build_gq(params: GqParams) -> Result<BaseGraph> {
    build_gq_within(params, DEFAULT_MAX_NODES)
}

/// Builds `GQ_{k,n}`: nodes are `k`-tuples over `0..n`, adjacent when they
/// differ in one coordinate. Node id is `Σ x_i · n^i`.
pub fn build_gq_within(params: GqParams, max_nodes: u64) -> Result<BaseGraph> {
    let GqParams { k, n } = GqParams::new(params.k, params.n)?;
    let nodes = params.node_count().unwrap_or(u64::MAX);
    if nodes > max_nodes {
        return Err(Error::Capacity {
            what: format!("GQ_{{{k},{n}}}"),
            requested: nodes,
            limit: max_nodes,
        });
    }
    let nodes = nodes as u32;
    let mut labels = Vec::with_capacity(nodes as usize);
    let mut edges = Vec::with_capacity(params.edge_count().unwrap_or(0) as usize);
    for u in 0..nodes {
        let mut label = Vec::with_capacity(k as usize);
        let mut rest = u;
        let mut place = 1u32;
        for _ in 0..k {
            let x = rest % n;
            rest /= n;
            label.push(x);
            for w in x + 1..n {
                edges.push([u, u + (w - x) * place]);
            }
            place = place.wrapping_mul(n);
        }
        labels.push(label);
    }
    let mut g = BaseGraph::from_sorted_unique(nodes, edges);
    g.labels = Some(labels);
    g.gq = Some(params);
    Ok(g)
}

/// Parses `u v` lines into a base graph; node count is the largest id plus one.
pub fn load_base_graph(text: &str) -> Result<BaseGraph> {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id = 0u32;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Input {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!("expected \"u v\", got {line:?}")));
        }
        let parse = |f: &str| {
            f.parse::<u32>()
                .map_err(|_| err(format!("{f:?} is not a nonnegative integer")))
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u == v {
            return Err(err(format!("self-loop at {u}")));
        }
        if !seen.insert([u.min(v), u.max(v)]) {
            return Err(err(format!("duplicate edge ({u}, {v})")));
        }
        max_id = max_id.max(u).max(v);
        edges.push([u.min(v), u.max(v)]);
    }
    if edges.is_empty() {
        return Err(Error::domain("edge list is empty"));
    }
    if max_id as u64 + 1 > DEFAULT_MAX_NODES {
        return Err(Error::Capacity {
            what: "edge list".into(),
            requested: max_id as u64 + 1,
            limit: DEFAULT_MAX_NODES,
        });
    }
    Ok(BaseGraph::from_sorted_unique(max_id + 1, edges))
}
