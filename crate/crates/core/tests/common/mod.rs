//! Brute-force graph oracles for small base graphs, independent of the
//! library's own algorithms.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;

/// Random connected simple graph on `n` nodes: a random tree plus each other
/// pair with probability `p`. Edges are `(u, v)` with `u < v`.
pub fn random_connected(rng: &mut impl Rng, n: u32, p: f64) -> Vec<(u32, u32)> {
    let mut adj = vec![vec![false; n as usize]; n as usize];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        adj[u as usize][v as usize] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                adj[u as usize][v as usize] = true;
            }
        }
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if adj[u as usize][v as usize] {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Adjacency lists.
fn adjacency(n: u32, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n as usize];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    adj
}

/// Whether the nodes outside `removed` (a bitmask) induce a connected graph.
fn connected_without(adj: &[Vec<u32>], removed: u32) -> bool {
    let n = adj.len() as u32;
    let Some(start) = (0..n).find(|&v| removed >> v & 1 == 0) else {
        return true;
    };
    let mut seen = removed | 1 << start;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u as usize] {
            if seen >> v & 1 == 0 {
                seen |= 1 << v;
                queue.push_back(v);
            }
        }
    }
    seen == (1u32 << n) - 1
}

/// Vertex connectivity: the fewest nodes whose removal disconnects the
/// graph, or `n − 1` for a complete graph.
pub fn kappa(n: u32, edges: &[(u32, u32)]) -> u32 {
    if edges.len() as u32 == n * (n - 1) / 2 {
        return n - 1;
    }
    let adj = adjacency(n, edges);
    (0..n)
        .find(|&size| {
            (0u32..1 << n)
                .filter(|m| m.count_ones() == size)
                .any(|m| !connected_without(&adj, m))
        })
        .expect("a non-complete graph has a separating set")
}

/// Edge connectivity: the smallest cut `δ(S)` over proper non-empty `S`.
pub fn lambda(n: u32, edges: &[(u32, u32)]) -> u32 {
    // Fixing node 0 inside S covers every cut once.
    (0u32..1 << (n - 1))
        .map(|m| (m << 1) | 1)
        .filter(|&s| s != (1u32 << n) - 1)
        .map(|s| cut(edges, s))
        .min()
        .unwrap_or(0)
}

/// Smallest cut separating `u` from `v`.
pub fn lambda_between(n: u32, edges: &[(u32, u32)], u: u32, v: u32) -> u32 {
    (0u32..1 << n)
        .filter(|&s| s >> u & 1 == 1 && s >> v & 1 == 0)
        .map(|s| cut(edges, s))
        .min()
        .expect("u != v")
}

fn cut(edges: &[(u32, u32)], s: u32) -> u32 {
    edges
        .iter()
        .filter(|&&(a, b)| (s >> a & 1) != (s >> b & 1))
        .count() as u32
}

/// All-pairs shortest path lengths by BFS from every node.
pub fn distances(n: u32, edges: &[(u32, u32)]) -> Vec<Vec<Option<u32>>> {
    let adj = adjacency(n, edges);
    (0..n)
        .map(|s| {
            let mut d = vec![None; n as usize];
            d[s as usize] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let du = d[u as usize].unwrap();
                for &v in &adj[u as usize] {
                    if d[v as usize].is_none() {
                        d[v as usize] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

pub fn diameter(n: u32, edges: &[(u32, u32)]) -> u32 {
    distances(n, edges)
        .iter()
        .flatten()
        .map(|d| d.expect("connected"))
        .max()
        .unwrap_or(0)
}

/// Edge-list text as accepted by the base-graph loader.
pub fn edge_text(edges: &[(u32, u32)]) -> String {
    edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
}
