//! Per-channel load accounting, throughput, load histograms, and cost.

use crate::error::{Error, Result};
use crate::graph::{Family, NodeId, Topology};

pub const DEFAULT_BIN_WIDTH: u64 = 20_000;

/// Flow counters, one per directional channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkLoadTable {
    loads: Vec<u64>,
    routed: u64,
    failed: u64,
}

impl LinkLoadTable {
    pub fn new(topology: &Topology) -> Self {
        Self::with_channels(topology.channel_count() as usize)
    }

    pub fn with_channels(channels: usize) -> Self {
        LinkLoadTable {
            loads: vec![0; channels],
            routed: 0,
            failed: 0,
        }
    }

    /// Counts one routed flow along `nodes`.
    ///
    /// Panics if two consecutive nodes are not adjacent.
    #[inline]
    pub fn record_flow(&mut self, topology: &Topology, nodes: &[NodeId]) {
        for w in nodes.windows(2) {
            let c = topology
                .channel(w[0], w[1])
                .expect("path nodes must be adjacent");
            self.loads[c as usize] += 1;
        }
        self.routed += 1;
    }

    pub fn record_failure(&mut self) {
        self.failed += 1;
    }

    /// Element-wise sum.
    pub fn merge(&mut self, other: &LinkLoadTable) {
        assert_eq!(
            self.loads.len(),
            other.loads.len(),
            "tables cover different topologies"
        );
        for (a, b) in self.loads.iter_mut().zip(&other.loads) {
            *a += b;
        }
        self.routed += other.routed;
        self.failed += other.failed;
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn routed(&self) -> u64 {
        self.routed
    }

    pub fn failed(&self) -> u64 {
        self.failed
    }

    /// Sum of all channel counters.
    pub fn total(&self) -> u64 {
        self.loads.iter().sum()
    }

    /// Flows on the busiest channel, `F`.
    pub fn bottleneck(&self) -> u64 {
        self.loads.iter().copied().max().unwrap_or(0)
    }
}

/// Aggregate bottleneck throughput `N(N−1)·b / F`.
pub fn abt(n: u64, f: u64, b: f64) -> Result<f64> {
    if f == 0 {
        return Err(Error::domain(
            "ABT is undefined when no channel carries a flow",
        ));
    }
    Ok(n as f64 * n.saturating_sub(1) as f64 * b / f as f64)
}

/// Channel-load distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_width: u64,
    /// `bins[i]` counts channels with load in `[i·w, (i+1)·w)`.
    pub bins: Vec<u64>,
    /// Cabled channels that carried no flow.
    pub idle_channels: u64,
    /// Uncabled server NIC ports, counted as unused channels.
    pub dangling_ports: u64,
    /// Mean load over every channel, dangling ports included.
    pub mean_load_all: f64,
    /// Mean load over channels that carried at least one flow.
    pub mean_load_used: f64,
}

impl Histogram {
    /// Idle channels plus dangling ports.
    pub fn unused_channels(&self) -> u64 {
        self.idle_channels + self.dangling_ports
    }
}

pub fn histogram(table: &LinkLoadTable, topology: &Topology, bin_width: u64) -> Result<Histogram> {
    if bin_width == 0 {
        return Err(Error::argument("histogram bin width must be at least 1"));
    }
    let mut bins = vec![0u64; 1];
    let mut idle = 0;
    for &l in table.loads() {
        let b = (l / bin_width) as usize;
        if b >= bins.len() {
            bins.resize(b + 1, 0);
        }
        bins[b] += 1;
        idle += u64::from(l == 0);
    }
    let total = table.total() as f64;
    let dangling = topology.dangling_server_ports();
    let channels = table.loads().len() as u64;
    let used = channels - idle;
    Ok(Histogram {
        bin_width,
        bins,
        idle_channels: idle,
        dangling_ports: dangling,
        mean_load_all: if channels + dangling == 0 {
            0.0
        } else {
            total / (channels + dangling) as f64
        },
        mean_load_used: if used == 0 { 0.0 } else { total / used as f64 },
    })
}

/// Network cost per server, with server cost 1, switch-port cost `rho`, and
/// cable cost `gamma`.
pub fn cost_per_server(family: Family, rho: f64, gamma: f64) -> f64 {
    match family {
        Family::GqStar { .. } | Family::GenericStellar => rho + gamma + 1.0 + gamma / 2.0,
        Family::FiConn { k, .. } => {
            rho + gamma + 1.0 + gamma / 2.0 - gamma / 2f64.powi(k as i32 + 1)
        }
        Family::DPillar { .. } => 2.0 * (rho + gamma) + 1.0,
    }
}

/// [`cost_per_server`] relative to a stellar network's.
pub fn cost_normalized(family: Family, rho: f64, gamma: f64) -> f64 {
    cost_per_server(family, rho, gamma) / cost_per_server(Family::GenericStellar, rho, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TopologyBuilder;

    fn pair() -> Topology {
        // Two partners, each with its own switch.
        let mut b = TopologyBuilder::new(2, 2, Family::GenericStellar);
        b.add_link(0, 2, 0);
        b.add_link(0, 1, 0);
        b.add_link(1, 3, 0);
        b.build().unwrap()
    }

    #[test]
    fn channel_counts_per_hop_kind() {
        let t = pair();
        let mut table = LinkLoadTable::new(&t);
        table.record_flow(&t, &[0, 1]);
        assert_eq!(table.total(), 1);
        let mut star = TopologyBuilder::new(2, 1, Family::GenericStellar);
        star.add_link(0, 2, 0);
        star.add_link(1, 2, 0);
        let star = star.build().unwrap();
        let mut table = LinkLoadTable::new(&star);
        table.record_flow(&star, &[0, 2, 1]);
        assert_eq!(table.total(), 2);
    }

    #[test]
    fn bottleneck_and_abt() {
        let t = pair();
        let mut table = LinkLoadTable::new(&t);
        assert_eq!(table.bottleneck(), 0);
        for _ in 0..5 {
            table.record_flow(&t, &[0, 1]);
        }
        assert_eq!(table.bottleneck(), 5);
        assert_eq!(abt(2, 1, 1.0).unwrap(), 2.0);
        assert!(matches!(abt(2, 0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn merge_adds() {
        let t = pair();
        let mut a = LinkLoadTable::new(&t);
        let mut b = LinkLoadTable::new(&t);
        a.record_flow(&t, &[0, 1]);
        b.record_flow(&t, &[1, 0]);
        b.record_failure();
        a.merge(&b);
        assert_eq!(a.loads(), &[0, 0, 1, 1, 0, 0]);
        assert_eq!((a.routed(), a.failed()), (2, 1));
    }

    #[test]
    fn zero_table_histogram() {
        let t = pair();
        let h = histogram(&LinkLoadTable::new(&t), &t, DEFAULT_BIN_WIDTH).unwrap();
        assert_eq!(h.bins, vec![6]);
        assert_eq!(h.idle_channels, 6);
        assert_eq!(h.dangling_ports, 0);
        assert_eq!(h.mean_load_used, 0.0);
        assert!(histogram(&LinkLoadTable::new(&t), &t, 0).is_err());
    }

    #[test]
    fn histogram_bins_and_means() {
        let t = pair();
        let mut table = LinkLoadTable::new(&t);
        for _ in 0..3 {
            table.record_flow(&t, &[2, 0, 1, 3]);
        }
        let h = histogram(&table, &t, 2).unwrap();
        assert_eq!(h.bins, vec![3, 3]);
        assert_eq!(h.mean_load_all, 9.0 / 6.0);
        assert_eq!(h.mean_load_used, 3.0);

        // Two degree-one servers leave two dangling ports.
        let mut star = TopologyBuilder::new(2, 1, Family::GenericStellar);
        star.add_link(0, 2, 0);
        star.add_link(1, 2, 0);
        let star = star.build().unwrap();
        let mut table = LinkLoadTable::new(&star);
        table.record_flow(&star, &[0, 2, 1]);
        let h = histogram(&table, &star, 2).unwrap();
        assert_eq!(h.unused_channels(), 4);
        assert_eq!(h.mean_load_all, 2.0 / 6.0);
        assert_eq!(h.mean_load_used, 1.0);
    }

    #[test]
    fn cost_formulas() {
        let gq = Family::GqStar { k: 3, n: 10 };
        let dp = Family::DPillar { k: 4, n: 18 };
        let fi2 = Family::FiConn { k: 2, n: 24 };
        for rho in [0.01, 0.1, 0.16] {
            let r = cost_normalized(dp, rho, 0.0);
            assert!((r - (2.0 * rho + 1.0) / (rho + 1.0)).abs() < 1e-12);
        }
        assert!((cost_per_server(gq, 0.05, 0.2) - 1.35).abs() < 1e-12);
        assert!((cost_per_server(fi2, 0.05, 0.2) - 1.325).abs() < 1e-12);
        assert!((cost_per_server(dp, 0.05, 0.2) - 1.5).abs() < 1e-12);
    }
}
