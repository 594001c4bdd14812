use super::{Failure, Router, Workspace};
use crate::faults::FaultSet;
use crate::graph::{NodeId, Topology};
use crate::topology::FiConn;

/// FiConn's traffic-oblivious routing.
///
/// At the lowest level `l` whose `FiConn_l` holds both endpoints, the route
/// crosses the unique level-`l` link between their two `FiConn_{l-1}` copies
/// and recurses on either side.
pub struct Tor<'a> {
    net: &'a FiConn,
}

impl<'a> Tor<'a> {
    pub fn new(net: &'a FiConn) -> Self {
        Tor { net }
    }

    fn walk(&self, s: NodeId, t: NodeId, out: &mut Vec<NodeId>) {
        if s == t {
            out.push(s);
            return;
        }
        let f = self.net;
        let n = f.params().n;
        if s / n == t / n {
            out.extend([s, f.switch_of(s), t]);
            return;
        }
        let mut l = 1;
        while s / f.size(l) != t / f.size(l) {
            l += 1;
        }
        let size = f.size(l);
        let below = f.size(l - 1);
        let base = s / size * size;
        let (i, j) = ((s - base) / below, (t - base) / below);
        let (a, b) = f.bridge(l, base, i, j);
        self.walk(s, a, out);
        self.walk(b, t, out);
    }
}

impl Router for Tor<'_> {
    fn name(&self) -> &'static str {
        "tor"
    }

    fn topology(&self) -> &Topology {
        self.net.topology()
    }

    fn fault_tolerant(&self) -> bool {
        false
    }

    fn route_into(
        &self,
        _: &FaultSet,
        _: &mut Workspace,
        s: NodeId,
        t: NodeId,
        _: u64,
        out: &mut Vec<NodeId>,
    ) -> Result<(), Failure> {
        out.clear();
        self.walk(s, t, out);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_tree, hop_length, validate_path};
    use crate::topology::{build_ficonn, FiConnParams};

    #[test]
    fn exhaustive_small_instances() {
        for (k, n) in [(1, 4), (2, 4), (2, 2), (3, 2)] {
            let f = build_ficonn(FiConnParams::new(k, n).unwrap()).unwrap();
            let t = f.topology();
            let none = FaultSet::none(t.link_count());
            let r = Tor::new(&f);
            let mut ws = Workspace::new();
            let mut out = Vec::new();
            let bound = (1u32 << (k + 1)) - 1;
            for s in t.servers() {
                let tree = bfs_tree(t, s, &none).unwrap();
                for d in t.servers() {
                    r.route_into(&none, &mut ws, s, d, 0, &mut out).unwrap();
                    validate_path(t, &none, s, d, &out).unwrap();
                    let h = hop_length(t, &out);
                    assert!(h <= bound);
                    assert!(h >= tree.distance(d).unwrap());
                    if s / n == d / n && s != d {
                        assert_eq!(h, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn same_copy_pairs_match_bfs() {
        let f = build_ficonn(FiConnParams::new(1, 4).unwrap()).unwrap();
        let t = f.topology();
        let none = FaultSet::none(t.link_count());
        let r = Tor::new(&f);
        for s in t.servers() {
            let tree = bfs_tree(t, s, &none).unwrap();
            for d in t.servers().filter(|d| d / 4 == s / 4) {
                let p = r.route(&none, s, d, 0).unwrap();
                assert_eq!(p.path().unwrap().hop_length(), tree.distance(d).unwrap());
            }
        }
    }

    #[test]
    fn rejects_faults() {
        let f = build_ficonn(FiConnParams::new(1, 4).unwrap()).unwrap();
        let faults = FaultSet::from_links(f.topology(), [0]).unwrap();
        assert!(Tor::new(&f).route(&faults, 0, 5, 0).is_err());
    }
}
