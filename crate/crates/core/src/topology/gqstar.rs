use super::base::{build_gq, GqParams};
use super::stellar::{stellar_transform, StellarMap};
use crate::error::Result;
use crate::graph::{LinkId, NodeId, Topology};

/// `GQ*_{k,n}`: the stellar transform of `GQ_{k,n}` plus routing tables.
#[derive(Clone, Debug)]
pub struct GqStar {
    topology: Topology,
    map: StellarMap,
    params: GqParams,
    pow: Vec<u32>,
    /// `port[x·k(n−1) + i(n−1) + w']`: the server at switch `x` whose partner
    /// sits at `x` with coordinate `i` set to `w`; `w' = w` if `w < x_i`, else `w − 1`.
    port: Vec<NodeId>,
}

impl GqStar {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn map(&self) -> &StellarMap {
        &self.map
    }

    pub fn params(&self) -> GqParams {
        self.params
    }

    /// Coordinate `i` of base node `x`.
    #[inline]
    pub fn digit(&self, x: u32, i: u32) -> u32 {
        (x / self.pow[i as usize]) % self.params.n
    }

    /// `x` with coordinate `i` replaced by `w`.
    #[inline]
    pub fn with_digit(&self, x: u32, i: u32, w: u32) -> u32 {
        let p = self.pow[i as usize];
        x - self.digit(x, i) * p + w * p
    }

    /// Base node of the switch a server hangs off.
    #[inline]
    pub fn base_of(&self, server: NodeId) -> u32 {
        self.map.base_attachment(server)
    }

    #[inline]
    pub fn switch(&self, base: u32) -> NodeId {
        self.map.switch_of(base)
    }

    /// Server at base node `x` leading along dimension `i` to value `w != x_i`.
    #[inline]
    pub fn port(&self, x: u32, i: u32, w: u32) -> NodeId {
        let n = self.params.n;
        let xi = self.digit(x, i);
        let w = if w < xi { w } else { w - 1 };
        self.port[((x * self.params.k + i) * (n - 1) + w) as usize]
    }

    /// Link from a server to its switch.
    #[inline]
    pub fn switch_link(&self, server: NodeId) -> LinkId {
        3 * (server / 2) + 2 * (server & 1)
    }

    /// Link from a server to its partner.
    #[inline]
    pub fn partner_link(&self, server: NodeId) -> LinkId {
        3 * (server / 2) + 1
    }
}

/// Builds `GQ*_{k,n}` within the default node limit.
pub fn build_gq_star(params: GqParams) -> Result<GqStar> {
    let base = build_gq(params)?;
    let (topology, map) = stellar_transform(&base)?;
    let GqParams { k, n } = params;
    let pow: Vec<u32> = (0..=k).map(|i| n.pow(i)).collect();
    let mut port = vec![0; topology.server_count() as usize];
    for (e, &[u, v]) in base.edges().iter().enumerate() {
        let i = (0..k)
            .find(|&i| (u / pow[i as usize]) % n != (v / pow[i as usize]) % n)
            .unwrap();
        for (x, y, s) in [(u, v, 2 * e as u32), (v, u, 2 * e as u32 + 1)] {
            let xi = (x / pow[i as usize]) % n;
            let yi = (y / pow[i as usize]) % n;
            let w = if yi < xi { yi } else { yi - 1 };
            port[((x * k + i) * (n - 1) + w) as usize] = s;
        }
    }
    Ok(GqStar {
        topology,
        map,
        params,
        pow,
        port,
    })
}
