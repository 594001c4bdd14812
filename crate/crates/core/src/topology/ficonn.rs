use crate::error::{Error, Result};
use crate::graph::{Family, NodeId, Topology, TopologyBuilder, DEFAULT_MAX_NODES};

/// Parameters of `FiConn_{k,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiConnParams {
    pub k: u32,
    pub n: u32,
}

impl FiConnParams {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::argument(format!(
                "FiConn needs an even n >= 2, got {n}"
            )));
        }
        Ok(FiConnParams { k, n })
    }

    /// `(N_l, b_l)` for `l = 0..=k`, or `None` on overflow.
    pub fn census(&self) -> Option<Vec<(u64, u64)>> {
        let mut out = vec![(self.n as u64, self.n as u64)];
        for _ in 0..self.k {
            let (size, avail) = *out.last().unwrap();
            let copies = avail / 2 + 1;
            out.push((size.checked_mul(copies)?, copies.checked_mul(avail / 2)?));
        }
        Some(out)
    }

    pub fn server_count(&self) -> Option<u64> {
        self.census().map(|c| c.last().unwrap().0)
    }

    /// Degree-1 servers left after the top level, `N_k / 2^k`.
    pub fn available(&self) -> Option<u64> {
        self.census().map(|c| c.last().unwrap().1)
    }
}

/// A built FiConn together with the tables TOR needs.
#[derive(Clone, Debug)]
pub struct FiConn {
    topology: Topology,
    params: FiConnParams,
    sizes: Vec<u32>,
    available: Vec<Vec<u32>>,
}

impl FiConn {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn params(&self) -> FiConnParams {
        self.params
    }

    /// `N_l`, servers in one `FiConn_l`.
    pub fn size(&self, level: u32) -> u32 {
        self.sizes[level as usize]
    }

    /// Local ids, within one `FiConn_l`, of its degree-1 servers.
    pub fn available(&self, level: u32) -> &[u32] {
        &self.available[level as usize]
    }

    /// Copies of `FiConn_{l-1}` inside a `FiConn_l`.
    pub fn copies(&self, level: u32) -> u32 {
        self.sizes[level as usize] / self.sizes[level as usize - 1]
    }

    /// The level-`l` link joining copies `i` and `j` of `FiConn_{l-1}` inside
    /// the `FiConn_l` starting at `base`, as `(server in i, server in j)`.
    #[inline]
    pub fn bridge(&self, level: u32, base: u32, i: u32, j: u32) -> (NodeId, NodeId) {
        bridge(&self.sizes, &self.available, level, base, i, j)
    }

    pub fn switch_of(&self, server: NodeId) -> NodeId {
        self.topology.server_count() + server / self.params.n
    }
}

#[inline]
fn bridge(
    sizes: &[u32],
    available: &[Vec<u32>],
    level: u32,
    base: u32,
    i: u32,
    j: u32,
) -> (NodeId, NodeId) {
    let below = sizes[level as usize - 1];
    let avail = &available[level as usize - 1];
    let ordinal = |from: u32, to: u32| 2 * (if to < from { to } else { to - 1 }) as usize;
    (
        base + i * below + avail[ordinal(i, j)],
        base + j * below + avail[ordinal(j, i)],
    )
}

/// Builds `FiConn_{k,n}`.
///
/// Inside each `FiConn_l`, copy `i` reaches copy `j` through its available
/// server of ordinal `2j'` where `j' = j` if `j < i`, else `j - 1`. Even
/// ordinals are consumed; odd ordinals stay available for the next level.
pub fn build_ficonn(params: FiConnParams) -> Result<FiConn> {
    let FiConnParams { k, n } = FiConnParams::new(params.k, params.n)?;
    let census = params.census();
    let servers = census
        .as_ref()
        .map(|c| c.last().unwrap().0)
        .unwrap_or(u64::MAX);
    let total = servers.saturating_add(servers / n as u64);
    if total > DEFAULT_MAX_NODES {
        return Err(Error::Capacity {
            what: format!("FiConn_{{{k},{n}}}"),
            requested: total,
            limit: DEFAULT_MAX_NODES,
        });
    }
    let census = census.unwrap();
    let servers = servers as u32;
    let switches = servers / n;
    let sizes: Vec<u32> = census.iter().map(|&(s, _)| s as u32).collect();

    let mut available = vec![(0..n).collect::<Vec<u32>>()];
    for l in 1..=k as usize {
        let below = sizes[l - 1];
        let prev = &available[l - 1];
        let copies = sizes[l] / below;
        let mut next = Vec::with_capacity(census[l].1 as usize);
        for c in 0..copies {
            next.extend(prev.iter().skip(1).step_by(2).map(|&x| c * below + x));
        }
        available.push(next);
    }

    let level_links: u64 = (1..=k as usize)
        .map(|l| {
            (servers / sizes[l]) as u64 * (census[l - 1].1 / 2) * (sizes[l] / sizes[l - 1]) as u64
                / 2
        })
        .sum();
    let mut b = TopologyBuilder::new(servers, switches, Family::FiConn { k, n })
        .with_link_capacity(servers as usize + level_links as usize);
    for s in 0..servers {
        b.add_link(s, servers + s / n, 0);
    }
    for l in 1..=k {
        let size = sizes[l as usize];
        let copies = size / sizes[l as usize - 1];
        for block in 0..servers / size {
            for i in 0..copies {
                for j in i + 1..copies {
                    let (a, c) = bridge(&sizes, &available, l, block * size, i, j);
                    b.add_link(a, c, l);
                }
            }
        }
    }
    let mut labels = Vec::with_capacity((servers + switches) as usize);
    for s in 0..servers {
        labels.push(ficonn_label(&sizes, n, s));
    }
    for w in 0..switches {
        let mut l = ficonn_label(&sizes, n, w * n);
        l.pop();
        labels.push(l);
    }
    Ok(FiConn {
        topology: b.labels(labels).build()?,
        params,
        sizes,
        available,
    })
}

/// `(a_k, …, a_1, a_0)`: copy index per level, then position in `FiConn_0`.
fn ficonn_label(sizes: &[u32], n: u32, s: u32) -> Vec<u32> {
    let mut out: Vec<u32> = (1..sizes.len())
        .rev()
        .map(|l| (s % sizes[l]) / sizes[l - 1])
        .collect();
    out.push(s % n);
    out
}
