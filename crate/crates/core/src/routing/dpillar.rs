use super::{Failure, RetryPolicy, Router, Workspace};
use crate::faults::FaultSet;
use crate::graph::{NodeId, Topology};
use crate::topology::{DPillar, DPillarLayout};

/// Clockwise single-path DPillar routing.
///
/// Each step crosses switch column `c` into server column `c + 1`, setting
/// name digit `c` to the destination's. Once the name matches, steps keep
/// the name until the destination column is reached.
pub struct DPillarSp<'a> {
    net: &'a DPillar,
}

impl<'a> DPillarSp<'a> {
    pub fn new(net: &'a DPillar) -> Self {
        DPillarSp { net }
    }
}

#[inline]
fn sp_step(d: &DPillarLayout, c: u32, u: u32, v: u32) -> (NodeId, u32, u32) {
    let next = d.with_digit(u, c, d.digit(v, c));
    (d.switch(c, u), d.next_column(c), next)
}

impl Router for DPillarSp<'_> {
    fn name(&self) -> &'static str {
        "dpillar-sp"
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
        let d = self.net.layout();
        out.clear();
        out.push(s);
        let (mut c, mut u) = d.coords(s);
        let (ct, v) = d.coords(t);
        while (c, u) != (ct, v) {
            let (w, c2, u2) = sp_step(d, c, u, v);
            out.extend([w, d.server(c2, u2)]);
            c = c2;
            u = u2;
        }
        Ok(())
    }
}

/// Fault-avoiding DPillar routing: greedy depth-first search with backtracking.
///
/// From each server the candidates are every member of its two switch
/// groups, tried in this order: the clockwise single-path step, other moves
/// that set a mismatched digit to the destination's, name-preserving column
/// moves (clockwise first), then the remaining members. Only the two links of
/// a move are checked before taking it. A server is entered at most once per
/// route; paths are capped at `4k` hops and the search at the policy's
/// budget. Without faults the result equals [`DPillarSp`]'s path.
pub struct DPillarMp<'a> {
    net: &'a DPillar,
    policy: RetryPolicy,
}

impl<'a> DPillarMp<'a> {
    pub fn new(net: &'a DPillar, policy: RetryPolicy) -> Self {
        DPillarMp { net, policy }
    }

    /// Candidate `(switch, server)` moves from `x` in priority order.
    fn candidates(&self, x: NodeId, t: NodeId, into: &mut Vec<(NodeId, NodeId)>) {
        let d = self.net.layout();
        let h = d.half();
        let (c, u) = d.coords(x);
        let (_, v) = d.coords(t);
        let p = d.prev_column(c);
        let n1 = d.next_column(c);
        let (right, left) = (d.switch(c, u), d.switch(p, u));
        let push = |into: &mut Vec<(NodeId, NodeId)>, w: NodeId, y: NodeId| {
            if y != x && !into.iter().any(|&(_, z)| z == y) {
                into.push((w, y));
            }
        };
        into.clear();
        let (vc, vp) = (d.digit(v, c), d.digit(v, p));
        push(into, right, d.server(n1, d.with_digit(u, c, vc)));
        if d.digit(u, c) != vc {
            push(into, right, d.server(c, d.with_digit(u, c, vc)));
        }
        if d.digit(u, p) != vp {
            push(into, left, d.server(p, d.with_digit(u, p, vp)));
            push(into, left, d.server(c, d.with_digit(u, p, vp)));
        }
        push(into, right, d.server(n1, u));
        push(into, left, d.server(p, u));
        for a in 0..h {
            push(into, right, d.server(c, d.with_digit(u, c, a)));
            push(into, right, d.server(n1, d.with_digit(u, c, a)));
            push(into, left, d.server(p, d.with_digit(u, p, a)));
            push(into, left, d.server(c, d.with_digit(u, p, a)));
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        faults: &FaultSet,
        ws: &mut Workspace,
        x: NodeId,
        t: NodeId,
        hops: u32,
        budget: &mut u32,
        out: &mut Vec<NodeId>,
    ) -> bool {
        if x == t {
            return true;
        }
        if hops == 4 * self.net.params().k || *budget == 0 {
            return false;
        }
        *budget -= 1;
        let topo = self.net.topology();
        let live = |a: NodeId, b: NodeId| {
            topo.link_between(a, b)
                .is_some_and(|l| !faults.is_failed(l))
        };
        let mut moves = Vec::with_capacity(2 * self.net.params().n as usize);
        self.candidates(x, t, &mut moves);
        for (w, y) in moves {
            if ws.is_marked(y as u64) || out.contains(&w) || !live(x, w) || !live(w, y) {
                continue;
            }
            ws.mark(y as u64);
            out.extend([w, y]);
            if self.search(faults, ws, y, t, hops + 1, budget, out) {
                return true;
            }
            out.truncate(out.len() - 2);
        }
        false
    }
}

impl Router for DPillarMp<'_> {
    fn name(&self) -> &'static str {
        "dpillar-mp"
    }

    fn topology(&self) -> &Topology {
        self.net.topology()
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
        out.clear();
        out.push(s);
        ws.begin_marks(self.net.topology().server_count() as usize);
        ws.mark(s as u64);
        let p = self.net.params();
        let mut budget = self.policy.budget(p.k, p.n);
        if self.search(faults, ws, s, t, 0, &mut budget, out) {
            Ok(())
        } else {
            out.clear();
            Err(Failure::NoRouteFound)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_tree, hop_length, validate_path};
    use crate::topology::{build_dpillar, DPillarParams};

    fn net(k: u32, n: u32) -> DPillar {
        build_dpillar(DPillarParams::new(k, n).unwrap()).unwrap()
    }

    #[test]
    fn sp_is_valid_and_bounded() {
        for (k, n) in [(2, 4), (3, 4), (3, 6), (4, 4)] {
            let d = net(k, n);
            let t = d.topology();
            let none = FaultSet::none(t.link_count());
            let r = DPillarSp::new(&d);
            let mut ws = Workspace::new();
            let mut out = Vec::new();
            let mut worst = 0;
            for s in t.servers() {
                for x in t.servers() {
                    r.route_into(&none, &mut ws, s, x, 0, &mut out).unwrap();
                    validate_path(t, &none, s, x, &out).unwrap();
                    worst = worst.max(hop_length(t, &out));
                }
            }
            assert_eq!(worst, 2 * k - 1, "DPillar_{{{k},{n}}}");
        }
    }

    #[test]
    fn adjacent_columns_same_group() {
        let d = net(3, 6);
        let l = d.layout();
        let r = DPillarSp::new(&d);
        let none = FaultSet::none(d.topology().link_count());
        let u = 5;
        let s = l.server(1, u);
        let x = l.server(2, l.with_digit(u, 1, 2));
        assert_eq!(
            r.route(&none, s, x, 0)
                .unwrap()
                .path()
                .unwrap()
                .hop_length(),
            1
        );
    }

    #[test]
    fn mp_matches_sp_without_faults() {
        let d = net(2, 4);
        let t = d.topology();
        let none = FaultSet::none(t.link_count());
        let (sp, mp) = (
            DPillarSp::new(&d),
            DPillarMp::new(&d, RetryPolicy::default()),
        );
        for s in t.servers() {
            for x in t.servers() {
                assert_eq!(
                    sp.route(&none, s, x, 0).unwrap(),
                    mp.route(&none, s, x, 0).unwrap()
                );
            }
        }
    }

    #[test]
    fn mp_survives_every_single_fault() {
        let d = net(3, 6);
        let t = d.topology();
        let none = FaultSet::none(t.link_count());
        let (sp, mp) = (
            DPillarSp::new(&d),
            DPillarMp::new(&d, RetryPolicy::default()),
        );
        for s in (0..t.server_count()).step_by(5) {
            for x in (0..t.server_count()).step_by(3) {
                let base = sp.route(&none, s, x, 0).unwrap();
                let nodes = base.path().unwrap().nodes();
                for j in 0..nodes.len() - 1 {
                    let link = t.link_between(nodes[j], nodes[j + 1]).unwrap();
                    let faults = FaultSet::from_links(t, [link]).unwrap();
                    let out = mp.route(&faults, s, x, 0).unwrap();
                    let p = out.path().expect("single fault leaves a route");
                    validate_path(t, &faults, s, x, p.nodes()).unwrap();
                    let bfs = bfs_tree(t, s, &faults).unwrap().distance(x).unwrap();
                    assert!(p.hop_length() >= bfs && p.hop_length() <= 4 * 3);
                }
            }
        }
    }

    #[test]
    fn mp_detours_through_another_group_member() {
        // Two clockwise hops from column 0; the source's clockwise switch link fails.
        let d = net(3, 6);
        let (l, t) = (d.layout(), d.topology());
        let s = l.server(0, 0);
        let x = l.server(2, l.with_digit(l.with_digit(0, 0, 1), 1, 2));
        let none = FaultSet::none(t.link_count());
        let base = DPillarSp::new(&d).route(&none, s, x, 0).unwrap();
        let nodes = base.path().unwrap().nodes().to_vec();
        assert_eq!(nodes.len(), 5);
        let faults =
            FaultSet::from_links(t, [t.link_between(nodes[0], nodes[1]).unwrap()]).unwrap();
        let out = DPillarMp::new(&d, RetryPolicy::default())
            .route(&faults, s, x, 0)
            .unwrap();
        let p = out.path().unwrap();
        validate_path(t, &faults, s, x, p.nodes()).unwrap();
        assert!(
            p.hop_length() <= base.path().unwrap().hop_length() + 2,
            "{:?}",
            p.nodes()
        );
        assert!(p.hop_length() > 2);
    }
}
