use std::collections::HashMap;

use proptest::prelude::*;

use dcn_core::faults::{inject_uniform, FaultSet};
use dcn_core::graph::Family;
use dcn_core::harness::{make_router, run_flows, Network, RouterKind};
use dcn_core::metrics::{abt, cost_normalized, cost_per_server, histogram, LinkLoadTable};
use dcn_core::routing::{RetryPolicy, Workspace};
use dcn_core::traffic::{generate, PatternSpec};

fn net(spec: &str) -> Network {
    Network::build(&spec.parse().unwrap()).unwrap()
}

#[test]
fn loads_match_an_independent_recount() {
    let g = net("gqstar:2:3");
    let t = g.topology();
    let none = FaultSet::none(t.link_count());
    let r = make_router(&g, RouterKind::DimensionOrder, RetryPolicy::default()).unwrap();
    let stream = generate(PatternSpec::AllToAll, t).unwrap();
    let run = run_flows(r.as_ref(), &none, &stream, true).unwrap();

    let mut recount: HashMap<(u32, u32), u64> = HashMap::new();
    let mut crossings = 0u64;
    for f in stream.iter() {
        let out = r.route(&none, f.src, f.dst, f.index).unwrap();
        let nodes = out.path().unwrap().nodes();
        for w in nodes.windows(2) {
            *recount.entry((w[0], w[1])).or_default() += 1;
        }
        crossings += nodes.len() as u64 - 1;
    }
    for (c, &load) in run.table.loads().iter().enumerate() {
        let key = t.channel_endpoints(c as u32);
        assert_eq!(
            load,
            recount.get(&key).copied().unwrap_or(0),
            "channel {key:?}"
        );
    }
    assert_eq!(run.table.total(), crossings);
    assert_eq!(run.channel_sum, crossings);
    assert_eq!(run.table.routed(), 36 * 35);

    let f = *recount.values().max().unwrap();
    assert_eq!(run.table.bottleneck(), f);
    assert_eq!(abt(36, f, 1.0).unwrap(), 1260.0 / f as f64);
}

#[test]
fn failed_links_carry_nothing_in_either_direction() {
    let g = net("gqstar:2:4");
    let t = g.topology();
    let faults = inject_uniform(t, 0.15, 4, 0.15).unwrap();
    let r = make_router(&g, RouterKind::Bfs, RetryPolicy::default()).unwrap();
    let run = run_flows(
        r.as_ref(),
        &faults,
        &generate(PatternSpec::AllToAll, t).unwrap(),
        true,
    )
    .unwrap();
    assert!(!faults.is_empty());
    for &l in faults.links() {
        let [u, v] = t.link(l);
        for c in [t.channel(u, v).unwrap(), t.channel(v, u).unwrap()] {
            assert_eq!(run.table.loads()[c as usize], 0);
        }
    }
}

#[test]
fn histogram_accounts_for_every_channel() {
    let g = net("ficonn:2:4");
    let t = g.topology();
    let none = FaultSet::none(t.link_count());
    let r = make_router(&g, RouterKind::Tor, RetryPolicy::default()).unwrap();
    let run = run_flows(
        r.as_ref(),
        &none,
        &generate(PatternSpec::AllToAll, t).unwrap(),
        true,
    )
    .unwrap();
    let h = histogram(&run.table, t, 7).unwrap();
    assert_eq!(h.bins.iter().sum::<u64>(), u64::from(t.channel_count()));
    // Every cabled channel carries flows; the unused ones are the free ports.
    assert_eq!(h.idle_channels, 0);
    let degree_one = t.servers().filter(|&s| t.degree(s) == 1).count() as u64;
    assert_eq!(h.unused_channels(), degree_one);
    let total = run.table.total() as f64;
    let ports = f64::from(t.channel_count()) + degree_one as f64;
    assert!((h.mean_load_all * ports - total).abs() < 1e-6);
    assert!((h.mean_load_used * f64::from(t.channel_count()) - total).abs() < 1e-6);
}

#[test]
fn single_path_dpillar_leaves_counter_clockwise_channels_idle() {
    let g = net("dpillar:3:4");
    let t = g.topology();
    let none = FaultSet::none(t.link_count());
    let r = make_router(&g, RouterKind::DPillarSp, RetryPolicy::default()).unwrap();
    let pattern = PatternSpec::Random {
        flow_count: 50_000,
        seed: 2,
    };
    let run = run_flows(r.as_ref(), &none, &generate(pattern, t).unwrap(), false).unwrap();
    let h = histogram(&run.table, t, 1000).unwrap();
    assert_eq!(2 * h.unused_channels(), u64::from(t.channel_count()));
}

#[test]
fn cost_example_point() {
    let gq = Family::GqStar { k: 3, n: 10 };
    let dp = cost_normalized(Family::DPillar { k: 4, n: 18 }, 0.05, 0.157);
    let fi = cost_normalized(Family::FiConn { k: 2, n: 24 }, 0.05, 0.157);
    // Per server: GQ* 1 + 0.05 + 1.5·0.157, DPillar 1 + 2·(0.05 + 0.157),
    // FiConn_2 the GQ* figure less 0.157/8.
    assert!((cost_per_server(gq, 0.05, 0.157) - 1.2855).abs() < 1e-12);
    assert!((dp - 1.414 / 1.2855).abs() < 1e-12);
    assert!((fi - 1.265875 / 1.2855).abs() < 1e-12);
    assert!((dp - 1.10).abs() <= 0.01 && (fi - 0.985).abs() <= 0.01);
}

proptest! {
    #[test]
    fn cost_orders_dpillar_stellar_ficonn(rho in 0.001..2.0f64, gamma in 0.001..2.0f64, k in 0u32..6) {
        let gq = cost_normalized(Family::GqStar { k: 3, n: 10 }, rho, gamma);
        let dp = cost_normalized(Family::DPillar { k: 4, n: 18 }, rho, gamma);
        let fi = cost_normalized(Family::FiConn { k, n: 24 }, rho, gamma);
        prop_assert!((gq - 1.0).abs() < 1e-12);
        prop_assert!(dp > gq && gq > fi);
        // Higher FiConn levels leave fewer free ports, so cost rises with k.
        let fi_next = cost_normalized(Family::FiConn { k: k + 1, n: 24 }, rho, gamma);
        prop_assert!(fi_next > fi);
    }

    #[test]
    fn merge_is_associative_and_commutative(seed in any::<u64>(), cuts in (0u64..2000, 0u64..2000)) {
        let g = net("gqstar:2:4");
        let t = g.topology();
        let none = FaultSet::none(t.link_count());
        let r = make_router(&g, RouterKind::GqStar, RetryPolicy::default()).unwrap();
        let stream = generate(PatternSpec::Random { flow_count: 2000, seed }, t).unwrap();
        let (lo, hi) = (cuts.0.min(cuts.1), cuts.0.max(cuts.1));
        let mut parts = [LinkLoadTable::new(t), LinkLoadTable::new(t), LinkLoadTable::new(t)];
        let mut ws = Workspace::new();
        let mut path = Vec::new();
        for f in stream.iter() {
            let part = usize::from(f.index >= lo) + usize::from(f.index >= hi);
            r.route_into(&none, &mut ws, f.src, f.dst, f.index, &mut path).unwrap();
            parts[part].record_flow(t, &path);
        }
        let [a, b, c] = parts;
        let mut left = a.clone();
        left.merge(&b);
        left.merge(&c);
        let mut right = b.clone();
        right.merge(&c);
        let mut right_first = a.clone();
        right_first.merge(&right);
        let mut reversed = c.clone();
        reversed.merge(&b);
        reversed.merge(&a);
        prop_assert_eq!(&left, &right_first);
        prop_assert_eq!(&left, &reversed);
        prop_assert_eq!(left.routed(), 2000);
    }

    #[test]
    fn adding_flows_never_raises_abt(seed in any::<u64>(), extra in 1usize..50) {
        let g = net("gqstar:2:3");
        let t = g.topology();
        let none = FaultSet::none(t.link_count());
        let r = make_router(&g, RouterKind::DimensionOrder, RetryPolicy::default()).unwrap();
        let stream = generate(PatternSpec::Random { flow_count: 200 + extra as u64, seed }, t).unwrap();
        let mut table = LinkLoadTable::new(t);
        let mut ws = Workspace::new();
        let mut path = Vec::new();
        let mut last = f64::INFINITY;
        for (i, f) in stream.iter().enumerate() {
            r.route_into(&none, &mut ws, f.src, f.dst, f.index, &mut path).unwrap();
            table.record_flow(t, &path);
            if i >= 200 {
                let now = abt(36, table.bottleneck(), 1.0).unwrap();
                prop_assert!(now <= last);
                last = now;
            }
        }
    }
}
