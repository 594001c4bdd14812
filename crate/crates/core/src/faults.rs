//! Reproducible bidirectional link failures.

use std::fs;
use std::path::Path as FsPath;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{LinkId, Topology};

/// Largest fraction accepted without an explicit override.
pub const DEFAULT_MAX_FRACTION: f64 = 0.15;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// A set of failed unordered links. A failed link blocks both directions.
#[derive(Clone, Debug)]
pub struct FaultSet {
    failed: Vec<bool>,
    list: Vec<LinkId>,
    fraction: f64,
    seed: u64,
    id: u64,
}

impl PartialEq for FaultSet {
    fn eq(&self, other: &Self) -> bool {
        self.list == other.list
            && self.failed.len() == other.failed.len()
            && self.fraction == other.fraction
            && self.seed == other.seed
    }
}

impl FaultSet {
    /// No failures over a topology with `links` links.
    pub fn none(links: u32) -> Self {
        FaultSet {
            failed: vec![false; links as usize],
            list: Vec::new(),
            fraction: 0.0,
            seed: 0,
            id: next_id(),
        }
    }

    /// Fails exactly the listed links.
    pub fn from_links(
        topology: &Topology,
        links: impl IntoIterator<Item = LinkId>,
    ) -> Result<Self> {
        let total = topology.link_count();
        let mut failed = vec![false; total as usize];
        for l in links {
            if l >= total {
                return Err(Error::argument(format!("link {l} is not in the topology")));
            }
            failed[l as usize] = true;
        }
        let list: Vec<LinkId> = (0..total).filter(|&l| failed[l as usize]).collect();
        let fraction = if total == 0 {
            0.0
        } else {
            list.len() as f64 / total as f64
        };
        Ok(FaultSet {
            failed,
            list,
            fraction,
            seed: 0,
            id: next_id(),
        })
    }

    #[inline]
    pub fn is_failed(&self, link: LinkId) -> bool {
        self.failed.get(link as usize).copied().unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    /// Failed link ids in ascending order.
    pub fn links(&self) -> &[LinkId] {
        &self.list
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Process-unique identity, shared by clones; keys per-fault-set caches.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Number of links a fraction `p` fails out of `links`, rounding half up.
    pub fn target_count(p: f64, links: u32) -> u32 {
        (p * links as f64 + 0.5).floor() as u32
    }
}

/// Fails `round(p · L)` links chosen uniformly without replacement.
///
/// `max_fraction` defaults to [`DEFAULT_MAX_FRACTION`] in callers; pass a
/// larger value to lift the cap.
pub fn inject_uniform(
    topology: &Topology,
    p: f64,
    seed: u64,
    max_fraction: f64,
) -> Result<FaultSet> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::argument(format!(
            "fault fraction {p} is outside [0, 1]"
        )));
    }
    if p > max_fraction {
        return Err(Error::argument(format!(
            "fault fraction {p} exceeds the cap {max_fraction}"
        )));
    }
    let total = topology.link_count();
    let count = FaultSet::target_count(p, total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failed = vec![false; total as usize];
    for l in sample(&mut rng, total as usize, count as usize) {
        failed[l] = true;
    }
    let list = (0..total).filter(|&l| failed[l as usize]).collect();
    Ok(FaultSet {
        failed,
        list,
        fraction: p,
        seed,
        id: next_id(),
    })
}

/// Parses a fault file of `u v` lines naming existing links.
pub fn parse_fault_list(topology: &Topology, text: &str) -> Result<FaultSet> {
    let mut links = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u32> {
            tok.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Input {
                    line: i + 1,
                    message: format!("expected two node ids, got {line:?}"),
                })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Input {
                line: i + 1,
                message: format!("trailing data in {line:?}"),
            });
        }
        if !topology.contains(u) || !topology.contains(v) {
            return Err(Error::Input {
                line: i + 1,
                message: format!("node id out of range in {line:?}"),
            });
        }
        let l = topology.link_between(u, v).ok_or_else(|| Error::Input {
            line: i + 1,
            message: format!("{u} and {v} are not linked"),
        })?;
        links.push(l);
    }
    FaultSet::from_links(topology, links)
}

/// Resolves a `--faults` argument: either `fraction:seed` or a file path.
pub fn resolve_fault_arg(topology: &Topology, arg: &str, max_fraction: f64) -> Result<FaultSet> {
    if let Some((p, seed)) = arg.split_once(':') {
        if let (Ok(p), Ok(seed)) = (p.parse::<f64>(), seed.parse::<u64>()) {
            return inject_uniform(topology, p, seed, max_fraction);
        }
    }
    let text = fs::read_to_string(FsPath::new(arg))?;
    parse_fault_list(topology, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Family, TopologyBuilder};

    /// `links` servers around a single switch.
    fn toy(links: u32) -> Topology {
        let mut b = TopologyBuilder::new(links, 1, Family::GenericStellar);
        for s in 0..links {
            b.add_link(s, links, 0);
        }
        b.build().unwrap()
    }

    #[test]
    fn zero_fraction_is_empty() {
        let t = toy(10);
        let f = inject_uniform(&t, 0.0, 3, DEFAULT_MAX_FRACTION).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn count_rounds_half_up() {
        assert_eq!(FaultSet::target_count(0.10, 40_500), 4_050);
        assert_eq!(FaultSet::target_count(0.15, 10), 2);
        assert_eq!(FaultSet::target_count(0.05, 10), 1);
        assert_eq!(FaultSet::target_count(0.04, 10), 0);
    }

    #[test]
    fn cap_and_range_are_enforced() {
        let t = toy(10);
        assert!(matches!(
            inject_uniform(&t, 0.2, 1, DEFAULT_MAX_FRACTION),
            Err(Error::Argument(_))
        ));
        assert!(inject_uniform(&t, 0.2, 1, 1.0).is_ok());
        assert!(inject_uniform(&t, -0.1, 1, 1.0).is_err());
        assert!(inject_uniform(&t, f64::NAN, 1, 1.0).is_err());
    }

    #[test]
    fn seeds_are_deterministic() {
        let t = toy(200);
        let a = inject_uniform(&t, 0.1, 9, DEFAULT_MAX_FRACTION).unwrap();
        let b = inject_uniform(&t, 0.1, 9, DEFAULT_MAX_FRACTION).unwrap();
        let c = inject_uniform(&t, 0.1, 10, DEFAULT_MAX_FRACTION).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.links(), c.links());
        assert_eq!(a.len(), 20);
    }

    #[test]
    fn fault_file_round_trip() {
        let t = toy(4);
        let f = parse_fault_list(&t, "# comment\n0 4\n\n4 2\n").unwrap();
        assert_eq!(f.links(), &[0, 2]);
        assert!(matches!(
            parse_fault_list(&t, "0 1\n"),
            Err(Error::Input { line: 1, .. })
        ));
        assert!(matches!(
            parse_fault_list(&t, "0 4\n0 x\n"),
            Err(Error::Input { line: 2, .. })
        ));
    }
}
