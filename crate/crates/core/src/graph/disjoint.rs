//! Exact disjoint-path counts by unit-capacity max-flow with node splitting.
//!
//! Meant for test-scale instances; runtime is O(paths · (V + E)).

use std::collections::VecDeque;

use super::{NodeId, Topology};
use crate::error::{Error, Result};

const INF: u32 = u32::MAX / 2;

struct FlowNet {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u32>,
    next: Vec<usize>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet {
            head: vec![usize::MAX; nodes],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
        }
    }

    fn arc(&mut self, u: usize, v: usize, c: u32) {
        for (a, b, c) in [(u, v, c), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    /// Edmonds–Karp; stops early once `limit` units are found.
    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let mut flow = 0;
        let mut via = vec![usize::MAX; self.head.len()];
        while flow < limit {
            via.fill(usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                let mut e = self.head[u];
                while e != usize::MAX {
                    let v = self.to[e];
                    if self.cap[e] > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = e;
                        queue.push_back(v);
                    }
                    e = self.next[e];
                }
            }
            if !seen[t] {
                break;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

fn switches_of(topology: &Topology, s: NodeId) -> impl Iterator<Item = NodeId> + '_ {
    topology
        .neighbors(s)
        .iter()
        .map(|a| a.node)
        .filter(move |&v| !topology.is_server(v))
}

fn check_pair(topology: &Topology, s: NodeId, t: NodeId) -> Result<()> {
    topology.check_server(s)?;
    topology.check_server(t)?;
    if s == t {
        return Err(Error::domain("disjoint paths need two distinct servers"));
    }
    if switches_of(topology, s).any(|w| switches_of(topology, t).any(|x| x == w)) {
        return Err(Error::domain(format!(
            "servers {s} and {t} share an attachment switch"
        )));
    }
    Ok(())
}

/// Builds the split network: `in(v) = 2v`, `out(v) = 2v + 1`.
fn count(
    topology: &Topology,
    s: NodeId,
    t: NodeId,
    uncapacitated: impl Fn(NodeId) -> bool,
    skip_link: Option<u32>,
) -> u32 {
    let n = topology.node_count() as usize;
    let mut net = FlowNet::new(2 * n);
    for v in 0..topology.node_count() {
        let c = if v == s || v == t || uncapacitated(v) {
            INF
        } else {
            1
        };
        net.arc(2 * v as usize, 2 * v as usize + 1, c);
    }
    for (l, &[u, v]) in topology.links().iter().enumerate() {
        if Some(l as u32) == skip_link {
            continue;
        }
        net.arc(2 * u as usize + 1, 2 * v as usize, INF);
        net.arc(2 * v as usize + 1, 2 * u as usize, INF);
    }
    let limit = topology.degree(s).max(topology.degree(t)) as u32
        * topology.max_switch_degree().max(1) as u32;
    net.max_flow(2 * s as usize + 1, 2 * t as usize, limit)
}

/// Maximum number of `s`–`t` paths that are internally disjoint apart from
/// the two endpoints' attachment switches.
pub fn parallel_paths(topology: &Topology, s: NodeId, t: NodeId) -> Result<u32> {
    check_pair(topology, s, t)?;
    if topology.link_between(s, t).is_some() {
        return Err(Error::domain(format!(
            "servers {s} and {t} are partners; parallel paths are undefined"
        )));
    }
    let attach: Vec<NodeId> = switches_of(topology, s)
        .chain(switches_of(topology, t))
        .collect();
    Ok(count(topology, s, t, |v| attach.contains(&v), None))
}

/// Maximum number of `s`–`t` paths with pairwise disjoint internal servers.
///
/// Switches may be shared. A direct partner link counts as one path.
pub fn server_parallel_paths(topology: &Topology, s: NodeId, t: NodeId) -> Result<u32> {
    check_pair(topology, s, t)?;
    let direct = topology.link_between(s, t);
    let rest = count(topology, s, t, |v| !topology.is_server(v), direct);
    Ok(rest + u32::from(direct.is_some()))
}
