use crate::error::{Error, Result};
use crate::graph::{Family, NodeId, Topology, TopologyBuilder, DEFAULT_MAX_NODES};

/// Parameters of `DPillar_{k,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DPillarParams {
    pub k: u32,
    pub n: u32,
}

impl DPillarParams {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::argument(format!("DPillar needs k >= 2, got {k}")));
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::argument(format!(
                "DPillar needs an even n >= 2, got {n}"
            )));
        }
        Ok(DPillarParams { k, n })
    }

    /// `k (n/2)^k`, or `None` on overflow.
    pub fn server_count(&self) -> Option<u64> {
        (self.n as u64 / 2)
            .checked_pow(self.k)?
            .checked_mul(self.k as u64)
    }

    pub fn switch_count(&self) -> Option<u64> {
        (self.n as u64 / 2)
            .checked_pow(self.k - 1)?
            .checked_mul(self.k as u64)
    }
}

/// Naming arithmetic of a DPillar.
///
/// Server `(c, u)` has id `c·h^k + u` where `h = n/2` and the name `u` packs
/// its digits as `Σ u_i h^i`. Switch `(c, v)` has id `S + c·h^{k-1} + v`.
/// Switch column `c` sits between server columns `c` and `c + 1`.
#[derive(Clone, Debug)]
pub struct DPillarLayout {
    k: u32,
    h: u32,
    pow: Vec<u32>,
    servers: u32,
}

impl DPillarLayout {
    fn new(k: u32, n: u32) -> Self {
        let h = n / 2;
        let pow: Vec<u32> = (0..=k).map(|i| h.pow(i)).collect();
        DPillarLayout {
            k,
            h,
            servers: k * pow[k as usize],
            pow,
        }
    }

    pub fn columns(&self) -> u32 {
        self.k
    }

    /// Servers per column, `h^k`.
    #[inline]
    pub fn column_size(&self) -> u32 {
        self.pow[self.k as usize]
    }

    #[inline]
    pub fn half(&self) -> u32 {
        self.h
    }

    #[inline]
    pub fn server(&self, column: u32, name: u32) -> NodeId {
        column * self.column_size() + name
    }

    /// `(column, name)` of a server.
    #[inline]
    pub fn coords(&self, server: NodeId) -> (u32, u32) {
        (server / self.column_size(), server % self.column_size())
    }

    #[inline]
    pub fn digit(&self, name: u32, i: u32) -> u32 {
        (name / self.pow[i as usize]) % self.h
    }

    #[inline]
    pub fn with_digit(&self, name: u32, i: u32, value: u32) -> u32 {
        let p = self.pow[i as usize];
        name - self.digit(name, i) * p + value * p
    }

    /// Name with digit `i` removed.
    #[inline]
    pub fn drop_digit(&self, name: u32, i: u32) -> u32 {
        let p = self.pow[i as usize];
        name % p + (name / (p * self.h)) * p
    }

    /// Switch in column `c` serving server name `name`.
    #[inline]
    pub fn switch(&self, c: u32, name: u32) -> NodeId {
        self.servers + c * self.pow[self.k as usize - 1] + self.drop_digit(name, c)
    }

    #[inline]
    pub fn next_column(&self, c: u32) -> u32 {
        if c + 1 == self.k {
            0
        } else {
            c + 1
        }
    }

    #[inline]
    pub fn prev_column(&self, c: u32) -> u32 {
        if c == 0 {
            self.k - 1
        } else {
            c - 1
        }
    }
}

/// A built DPillar.
#[derive(Clone, Debug)]
pub struct DPillar {
    topology: Topology,
    params: DPillarParams,
    layout: DPillarLayout,
}

impl DPillar {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn params(&self) -> DPillarParams {
        self.params
    }

    pub fn layout(&self) -> &DPillarLayout {
        &self.layout
    }
}

/// Builds `DPillar_{k,n}`.
pub fn build_dpillar(params: DPillarParams) -> Result<DPillar> {
    let DPillarParams { k, n } = DPillarParams::new(params.k, params.n)?;
    let total = params
        .server_count()
        .zip(params.switch_count())
        .and_then(|(a, b)| a.checked_add(b))
        .unwrap_or(u64::MAX);
    if total > DEFAULT_MAX_NODES {
        return Err(Error::Capacity {
            what: format!("DPillar_{{{k},{n}}}"),
            requested: total,
            limit: DEFAULT_MAX_NODES,
        });
    }
    let net = DPillarLayout::new(k, n);
    let h = net.h;
    let servers = net.servers;
    let switches = params.switch_count().unwrap() as u32;
    let mut b = TopologyBuilder::new(servers, switches, Family::DPillar { k, n })
        .with_link_capacity(2 * servers as usize);
    let mut labels = Vec::with_capacity((servers + switches) as usize);
    let per_switch_column = net.pow[k as usize - 1];
    for s in 0..servers {
        let (c, u) = net.coords(s);
        let p = net.prev_column(c);
        b.add_link(s, servers + c * per_switch_column + net.drop_digit(u, c), c);
        b.add_link(s, servers + p * per_switch_column + net.drop_digit(u, p), p);
        let mut label = vec![c];
        label.extend((0..k).map(|i| net.digit(u, i)));
        labels.push(label);
    }
    for w in 0..switches {
        let (c, v) = (w / per_switch_column, w % per_switch_column);
        let mut label = vec![c];
        label.extend((0..k - 1).map(|i| (v / net.pow[i as usize]) % h));
        labels.push(label);
    }
    Ok(DPillar {
        topology: b.labels(labels).build()?,
        params,
        layout: net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance() {
        // h = 1: one server per column.
        let d = build_dpillar(DPillarParams::new(2, 2).unwrap()).unwrap();
        let t = d.topology();
        assert_eq!(t.server_count(), 2);
        assert_eq!(t.switch_count(), 2);
        assert!(t.servers().all(|s| t.degree(s) == 2));
    }

    #[test]
    fn table_sizes() {
        let d = build_dpillar(DPillarParams::new(4, 18).unwrap()).unwrap();
        let t = d.topology();
        assert_eq!(t.server_count(), 26_244);
        assert_eq!(t.switch_count(), 2_916);
        assert_eq!(t.channel_count(), 104_976);
        assert_eq!(t.max_switch_degree(), 18);
        assert!((t.server_count()..t.node_count()).all(|w| t.degree(w) == 18));
    }

    #[test]
    fn groups_have_n_members() {
        let net = build_dpillar(DPillarParams::new(3, 6).unwrap()).unwrap();
        let (t, d) = (net.topology(), net.layout());
        assert_eq!(t.server_count(), 81);
        assert_eq!(t.switch_count(), 27);
        for s in t.servers() {
            let (c, _) = d.coords(s);
            let mut sides = [0, 0];
            for a in t.neighbors(s) {
                for b in t.neighbors(a.node) {
                    if b.node != s {
                        let col = d.coords(b.node).0;
                        sides[usize::from(col != c)] += 1;
                    }
                }
            }
            // Each switch adds h - 1 = 2 same-column peers and h = 3 across.
            assert_eq!(sides, [4, 6]);
        }
    }

    #[test]
    fn digit_arithmetic() {
        let net = build_dpillar(DPillarParams::new(3, 6).unwrap()).unwrap();
        let d = net.layout();
        let u = 2 + 3 + 9 * 2; // digits (2, 1, 2)
        assert_eq!(d.digit(u, 0), 2);
        assert_eq!(d.digit(u, 1), 1);
        assert_eq!(d.digit(u, 2), 2);
        assert_eq!(d.with_digit(u, 1, 0), 2 + 18);
        assert_eq!(d.drop_digit(u, 0), 1 + 2 * 3);
        assert_eq!(d.drop_digit(u, 1), 2 + 2 * 3);
        assert_eq!(d.drop_digit(u, 2), 2 + 3);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DPillarParams::new(1, 4).is_err());
        assert!(DPillarParams::new(3, 5).is_err());
        assert!(matches!(
            build_dpillar(DPillarParams { k: 12, n: 48 }),
            Err(Error::Capacity { .. })
        ));
    }
}
