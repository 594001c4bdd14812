use super::{Failure, Router, Workspace};
use crate::faults::FaultSet;
use crate::graph::{NodeId, Topology};

/// Shortest-path routing by server-hop BFS; the optimality oracle.
///
/// The tree for the most recent source is cached in the workspace, so
/// source-major flow orders cost one BFS per source.
pub struct BfsRouter<'a> {
    topology: &'a Topology,
}

impl<'a> BfsRouter<'a> {
    pub fn new(topology: &'a Topology) -> Self {
        BfsRouter { topology }
    }
}

impl Router for BfsRouter<'_> {
    fn name(&self) -> &'static str {
        "bfs"
    }

    fn topology(&self) -> &Topology {
        self.topology
    }

    fn fault_tolerant(&self) -> bool {
        true
    }

    fn route_into(
        &self,
        faults: &FaultSet,
        ws: &mut Workspace,
        s: NodeId,
        t: NodeId,
        _: u64,
        out: &mut Vec<NodeId>,
    ) -> Result<(), Failure> {
        if ws.bfs_from(self.topology, faults, s).path_into(t, out) {
            Ok(())
        } else {
            Err(Failure::NoRouteFound)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::RoutingOutcome;
    use crate::topology::{build_gq_star, GqParams};

    #[test]
    fn self_and_isolated() {
        let g = build_gq_star(GqParams::new(2, 3).unwrap()).unwrap();
        let t = g.topology();
        let r = BfsRouter::new(t);
        let none = FaultSet::none(t.link_count());
        assert_eq!(
            r.route(&none, 4, 4, 0).unwrap().path().unwrap().nodes(),
            &[4]
        );
        let cut = FaultSet::from_links(t, [g.switch_link(7), g.partner_link(7)]).unwrap();
        assert_eq!(
            r.route(&cut, 0, 7, 0).unwrap(),
            RoutingOutcome::Failed(Failure::NoRouteFound)
        );
    }

    #[test]
    fn cache_follows_fault_set() {
        let g = build_gq_star(GqParams::new(2, 3).unwrap()).unwrap();
        let t = g.topology();
        let r = BfsRouter::new(t);
        let none = FaultSet::none(t.link_count());
        let cut = FaultSet::from_links(t, [g.switch_link(7), g.partner_link(7)]).unwrap();
        let mut ws = Workspace::new();
        let mut out = Vec::new();
        assert!(r.route_into(&none, &mut ws, 0, 7, 0, &mut out).is_ok());
        assert!(r.route_into(&cut, &mut ws, 0, 7, 0, &mut out).is_err());
    }
}
