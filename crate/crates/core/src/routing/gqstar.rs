use rand::Rng;

use super::{Failure, RetryPolicy, Router, Workspace};
use crate::faults::FaultSet;
use crate::graph::{strip_loops, NodeId, Topology};
use crate::seed::rng_for;
use crate::topology::GqStar;

type Outcome = Result<(), Failure>;

/// Writes the trivial routes (self, partner, shared switch) if they apply.
#[inline]
fn trivial(g: &GqStar, faults: &FaultSet, s: NodeId, t: NodeId, out: &mut Vec<NodeId>) -> bool {
    out.clear();
    if s == t {
        out.push(s);
        return true;
    }
    if t == s ^ 1 && !faults.is_failed(g.partner_link(s)) {
        out.extend([s, t]);
        return true;
    }
    let (a, c) = (g.base_of(s), g.base_of(t));
    if a == c && !faults.is_failed(g.switch_link(s)) && !faults.is_failed(g.switch_link(t)) {
        out.extend([s, g.switch(a), t]);
        return true;
    }
    false
}

/// Fault-free GQ* routing that fixes coordinates in ascending dimension order.
pub struct DimensionOrder<'a> {
    net: &'a GqStar,
}

impl<'a> DimensionOrder<'a> {
    pub fn new(net: &'a GqStar) -> Self {
        DimensionOrder { net }
    }
}

impl Router for DimensionOrder<'_> {
    fn name(&self) -> &'static str {
        "dimension-order"
    }

    fn topology(&self) -> &Topology {
        self.net.topology()
    }

    fn fault_tolerant(&self) -> bool {
        false
    }

    fn route_into(
        &self,
        faults: &FaultSet,
        _: &mut Workspace,
        s: NodeId,
        t: NodeId,
        _: u64,
        out: &mut Vec<NodeId>,
    ) -> Outcome {
        let g = self.net;
        if trivial(g, faults, s, t, out) {
            return Ok(());
        }
        let (mut x, c) = (g.base_of(s), g.base_of(t));
        out.extend([s, g.switch(x)]);
        for i in 0..g.params().k {
            let ci = g.digit(c, i);
            if g.digit(x, i) != ci {
                let p = g.port(x, i, ci);
                x = g.with_digit(x, i, ci);
                out.extend([p, p ^ 1, g.switch(x)]);
            }
        }
        out.push(t);
        strip_loops(out);
        Ok(())
    }
}

/// Fault-tolerant GQ* routing: depth-first search over dimension orderings,
/// local proxies around blocked crossings, then random intermediate servers.
///
/// At each switch the direct crossings of all remaining dimensions are tried
/// (ascending) before any proxy, so a proxy's two extra hops are spent only
/// when no dimension can be crossed directly from there.
pub struct GqStarRouting<'a> {
    net: &'a GqStar,
    policy: RetryPolicy,
}

impl<'a> GqStarRouting<'a> {
    pub fn new(net: &'a GqStar, policy: RetryPolicy) -> Self {
        GqStarRouting { net, policy }
    }

    /// Whether the switch → server → server → switch crossing is intact.
    #[inline]
    fn crossing_ok(&self, faults: &FaultSet, p: NodeId) -> bool {
        let g = self.net;
        !faults.is_failed(g.switch_link(p))
            && !faults.is_failed(g.partner_link(p))
            && !faults.is_failed(g.switch_link(p ^ 1))
    }

    /// Direct attempt from `s` to `t`, appending to `out` (which is cleared).
    fn direct(
        &self,
        faults: &FaultSet,
        ws: &mut Workspace,
        s: NodeId,
        t: NodeId,
        out: &mut Vec<NodeId>,
    ) -> Outcome {
        let g = self.net;
        if trivial(g, faults, s, t, out) {
            return Ok(());
        }
        let a = self.enter(faults, s, out)?;
        let c = match self.exit(faults, t, &mut ws.stack) {
            Some(c) => c,
            None => {
                out.clear();
                return Err(Failure::AttachmentFault);
            }
        };
        let k = g.params().k;
        let mut mask = 0u32;
        for i in 0..k {
            if g.digit(a, i) != g.digit(c, i) {
                mask |= 1 << i;
            }
        }
        ws.begin_marks(1usize << k);
        let mut budget = self.policy.budget(k, g.params().n);
        if !self.search(faults, ws, a, c, mask, &mut budget, out) {
            out.clear();
            return Err(Failure::NoRouteFound);
        }
        out.extend(ws.stack.iter().rev());
        strip_loops(out);
        Ok(())
    }

    /// Pushes the walk from `s` to its entry switch; returns that switch's base node.
    fn enter(&self, faults: &FaultSet, s: NodeId, out: &mut Vec<NodeId>) -> Result<u32, Failure> {
        let g = self.net;
        out.clear();
        if !faults.is_failed(g.switch_link(s)) {
            let a = g.base_of(s);
            out.extend([s, g.switch(a)]);
            return Ok(a);
        }
        let p = s ^ 1;
        if !faults.is_failed(g.partner_link(s)) && !faults.is_failed(g.switch_link(p)) {
            let a = g.base_of(p);
            out.extend([s, p, g.switch(a)]);
            return Ok(a);
        }
        Err(Failure::AttachmentFault)
    }

    /// Writes the exit walk from `t`'s entry switch to `t`, reversed, into `rev`.
    fn exit(&self, faults: &FaultSet, t: NodeId, rev: &mut Vec<NodeId>) -> Option<u32> {
        let g = self.net;
        rev.clear();
        if !faults.is_failed(g.switch_link(t)) {
            rev.push(t);
            return Some(g.base_of(t));
        }
        let p = t ^ 1;
        if !faults.is_failed(g.partner_link(t)) && !faults.is_failed(g.switch_link(p)) {
            rev.extend([t, p]);
            return Some(g.base_of(p));
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        faults: &FaultSet,
        ws: &mut Workspace,
        x: u32,
        c: u32,
        mask: u32,
        budget: &mut u32,
        out: &mut Vec<NodeId>,
    ) -> bool {
        if mask == 0 {
            return true;
        }
        if ws.is_marked(mask as u64) {
            return false;
        }
        let g = self.net;
        let n = g.params().n;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let p = g.port(x, i, g.digit(c, i));
            if self.crossing_ok(faults, p) {
                let len = out.len();
                let y = g.with_digit(x, i, g.digit(c, i));
                out.extend([p, p ^ 1, g.switch(y)]);
                if self.search(faults, ws, y, c, mask & !(1 << i), budget, out) {
                    return true;
                }
                out.truncate(len);
            }
        }
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            let (xi, ci) = (g.digit(x, i), g.digit(c, i));
            if self.crossing_ok(faults, g.port(x, i, ci)) {
                continue;
            }
            let len = out.len();
            for w in 0..n {
                if w == xi || w == ci {
                    continue;
                }
                if *budget == 0 {
                    return false;
                }
                *budget -= 1;
                let p = g.port(x, i, w);
                if !self.crossing_ok(faults, p) {
                    continue;
                }
                let z = g.with_digit(x, i, w);
                let q = g.port(z, i, ci);
                if !self.crossing_ok(faults, q) {
                    continue;
                }
                let y = g.with_digit(x, i, ci);
                out.extend([p, p ^ 1, g.switch(z), q, q ^ 1, g.switch(y)]);
                if self.search(faults, ws, y, c, mask & !(1 << i), budget, out) {
                    return true;
                }
                out.truncate(len);
            }
        }
        ws.mark(mask as u64);
        false
    }
}

impl Router for GqStarRouting<'_> {
    fn name(&self) -> &'static str {
        "gq-star"
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
        flow_index: u64,
        out: &mut Vec<NodeId>,
    ) -> Outcome {
        match self.direct(faults, ws, s, t, out) {
            Ok(()) => return Ok(()),
            Err(Failure::AttachmentFault) => return Err(Failure::AttachmentFault),
            Err(_) => {}
        }
        let tries = self.policy.max_random_intermediates;
        if tries == 0 {
            return Err(Failure::NoRouteFound);
        }
        let servers = self.net.topology().server_count();
        if servers <= 2 {
            return Err(Failure::GaveUpAfterRetries);
        }
        let mut rng = rng_for(self.policy.seed, flow_index);
        let mut second = std::mem::take(&mut ws.buf);
        let mut result = Err(Failure::GaveUpAfterRetries);
        for _ in 0..tries {
            // Uniform over servers other than s and t.
            let mut r = rng.gen_range(0..servers - 2);
            let (lo, hi) = (s.min(t), s.max(t));
            if r >= lo {
                r += 1;
            }
            if r >= hi {
                r += 1;
            }
            if self.direct(faults, ws, s, r, out).is_err() {
                continue;
            }
            if self.direct(faults, ws, r, t, &mut second).is_err() {
                continue;
            }
            out.extend_from_slice(&second[1..]);
            strip_loops(out);
            result = Ok(());
            break;
        }
        ws.buf = second;
        if result.is_err() {
            out.clear();
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{hop_length, validate_path};
    use crate::topology::{build_gq_star, GqParams};

    fn net(k: u32, n: u32) -> GqStar {
        build_gq_star(GqParams::new(k, n).unwrap()).unwrap()
    }

    #[test]
    fn special_cases() {
        let g = net(1, 3);
        let t = g.topology();
        let none = FaultSet::none(t.link_count());
        let r = DimensionOrder::new(&g);
        let mut ws = Workspace::new();
        let mut out = Vec::new();
        r.route_into(&none, &mut ws, 0, 0, 0, &mut out).unwrap();
        assert_eq!(out, vec![0]);
        r.route_into(&none, &mut ws, 0, 1, 0, &mut out).unwrap();
        assert_eq!(hop_length(t, &out), 1);
        // Servers 0 and 2 both hang off base node 0.
        r.route_into(&none, &mut ws, 0, 2, 0, &mut out).unwrap();
        assert_eq!(out, vec![0, g.switch(0), 2]);
    }

    #[test]
    fn dimension_order_is_valid_and_bounded() {
        let g = net(2, 3);
        let t = g.topology();
        let none = FaultSet::none(t.link_count());
        let r = DimensionOrder::new(&g);
        let mut ws = Workspace::new();
        let mut out = Vec::new();
        for s in t.servers() {
            for d in t.servers() {
                r.route_into(&none, &mut ws, s, d, 0, &mut out).unwrap();
                validate_path(t, &none, s, d, &out).unwrap();
                assert!(hop_length(t, &out) <= 5);
            }
        }
    }

    #[test]
    fn non_tolerant_router_rejects_faults() {
        let g = net(2, 3);
        let faults = FaultSet::from_links(g.topology(), [0]).unwrap();
        assert!(DimensionOrder::new(&g).route(&faults, 0, 5, 0).is_err());
    }

    #[test]
    fn proxy_only_when_no_direct_crossing() {
        let g = net(2, 3);
        let t = g.topology();
        // s at base 0 = (0,0); t at base 8 = (2,2). First crossing: dim 0, 0 -> 2.
        let s = g.port(0, 1, 1);
        let d = g.port(8, 1, 1);
        let plain = GqStarRouting::new(&g, RetryPolicy::default());
        let none = FaultSet::none(t.link_count());
        let base = plain
            .route(&none, s, d, 0)
            .unwrap()
            .path()
            .unwrap()
            .hop_length();
        let dim0 = g.partner_link(g.port(0, 0, 2));
        let dim1 = g.partner_link(g.port(0, 1, 2));

        // Crossing dimension 1 first costs nothing extra.
        let faults = FaultSet::from_links(t, [dim0]).unwrap();
        let out = plain.route(&faults, s, d, 0).unwrap();
        let path = out.path().unwrap();
        validate_path(t, &faults, s, d, path.nodes()).unwrap();
        assert_eq!(path.hop_length(), base);

        // With both blocked, proxy value 1 in dimension 0 adds two hops.
        let faults = FaultSet::from_links(t, [dim0, dim1]).unwrap();
        let out = plain.route(&faults, s, d, 0).unwrap();
        let path = out.path().unwrap();
        validate_path(t, &faults, s, d, path.nodes()).unwrap();
        assert_eq!(path.hop_length(), base + 2);
        assert!(path.nodes().contains(&g.switch(1)));
    }

    #[test]
    fn attachment_fault() {
        let g = net(2, 3);
        let t = g.topology();
        let s = 0;
        let faults = FaultSet::from_links(t, [g.switch_link(s), g.partner_link(s)]).unwrap();
        let r = GqStarRouting::new(&g, RetryPolicy::default());
        assert_eq!(
            r.route(&faults, s, 20, 0).unwrap(),
            super::super::RoutingOutcome::Failed(Failure::AttachmentFault)
        );
        assert_eq!(
            r.route(&faults, 20, s, 0).unwrap(),
            super::super::RoutingOutcome::Failed(Failure::AttachmentFault)
        );
    }

    #[test]
    fn partner_fallback_at_both_ends() {
        let g = net(2, 3);
        let t = g.topology();
        let (s, d) = (0, 35);
        let faults = FaultSet::from_links(t, [g.switch_link(s), g.switch_link(d)]).unwrap();
        let r = GqStarRouting::new(&g, RetryPolicy::default());
        let out = r.route(&faults, s, d, 0).unwrap();
        validate_path(t, &faults, s, d, out.path().unwrap().nodes()).unwrap();
    }
}
