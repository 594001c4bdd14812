//! Synthetic workloads as index-addressable flow streams.
//!
//! Flow `i` of any stream can be computed directly, so workers can consume
//! disjoint index ranges without coordinating.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Topology};
use crate::seed::rng_for;

pub const DEFAULT_GROUP_SIZE: u32 = 1000;
pub const DEFAULT_RANDOM_FLOWS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flow {
    pub src: NodeId,
    pub dst: NodeId,
    /// Position in the stream; seeds per-flow randomness.
    pub index: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternSpec {
    AllToAll,
    ManyAllToAll { group_size: u32, seed: u64 },
    Butterfly,
    Random { flow_count: u64, seed: u64 },
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PatternSpec::AllToAll => f.write_str("all2all"),
            PatternSpec::ManyAllToAll { group_size, seed } => write!(f, "many:{group_size}:{seed}"),
            PatternSpec::Butterfly => f.write_str("butterfly"),
            PatternSpec::Random { flow_count, seed } => write!(f, "random:{flow_count}:{seed}"),
        }
    }
}

impl FromStr for PatternSpec {
    type Err = Error;

    /// `all2all`, `many[:SIZE[:SEED]]`, `butterfly`, or `random[:COUNT[:SEED]]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let bad = || Error::argument(format!("unrecognised pattern {s:?}"));
        let num = |i: usize, default: u64| -> Result<u64> {
            rest.get(i)
                .map_or(Ok(default), |x| x.parse().map_err(|_| bad()))
        };
        let pattern = match head {
            "all2all" | "all-to-all" if rest.is_empty() => PatternSpec::AllToAll,
            "butterfly" if rest.is_empty() => PatternSpec::Butterfly,
            "many" if rest.len() <= 2 => PatternSpec::ManyAllToAll {
                group_size: u32::try_from(num(0, DEFAULT_GROUP_SIZE as u64)?).map_err(|_| bad())?,
                seed: num(1, 0)?,
            },
            "random" if rest.len() <= 2 => PatternSpec::Random {
                flow_count: num(0, DEFAULT_RANDOM_FLOWS)?,
                seed: num(1, 0)?,
            },
            _ => return Err(bad()),
        };
        Ok(pattern)
    }
}

/// A generated workload.
#[derive(Clone, Debug)]
pub struct FlowStream {
    kind: Stream,
    len: u64,
}

#[derive(Clone, Debug)]
enum Stream {
    AllToAll { n: u64 },
    Many { members: Vec<NodeId>, size: u64 },
    Butterfly { n: u32, offsets: Vec<u64> },
    Random { n: u32, seed: u64 },
}

/// Builds the flow stream of `pattern` over the servers of `topology`.
pub fn generate(pattern: PatternSpec, topology: &Topology) -> Result<FlowStream> {
    let n = topology.server_count();
    let (kind, len) = match pattern {
        PatternSpec::AllToAll => {
            let n = n as u64;
            (Stream::AllToAll { n }, n * n.saturating_sub(1))
        }
        PatternSpec::ManyAllToAll { group_size, seed } => {
            if group_size == 0 || group_size > n {
                return Err(Error::argument(format!(
                    "group size {group_size} does not fit {n} servers"
                )));
            }
            let mut members: Vec<NodeId> = (0..n).collect();
            members.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let groups = (n / group_size) as u64;
            members.truncate((groups * group_size as u64) as usize);
            let size = group_size as u64;
            (Stream::Many { members, size }, groups * size * (size - 1))
        }
        PatternSpec::Butterfly => {
            let rounds = 32 - n.saturating_sub(1).leading_zeros();
            let mut offsets = Vec::with_capacity(n as usize + 1);
            let mut acc = 0u64;
            offsets.push(0);
            for i in 0..n {
                acc += (0..rounds).filter(|&j| i ^ (1 << j) < n).count() as u64;
                offsets.push(acc);
            }
            (Stream::Butterfly { n, offsets }, acc)
        }
        PatternSpec::Random { flow_count, seed } => {
            if n < 2 {
                return Err(Error::argument("random traffic needs at least two servers"));
            }
            (Stream::Random { n, seed }, flow_count)
        }
    };
    Ok(FlowStream { kind, len })
}

impl FlowStream {
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Flow number `i`, computed without generating its predecessors.
    pub fn get(&self, i: u64) -> Flow {
        debug_assert!(i < self.len);
        let (src, dst) = match &self.kind {
            Stream::AllToAll { n } => ordered_pair(i, *n),
            Stream::Many { members, size } => {
                let per = size * (size - 1);
                let (g, j) = (i / per, i % per);
                let (a, b) = ordered_pair(j, *size);
                let base = (g * size) as usize;
                (members[base + a as usize], members[base + b as usize])
            }
            Stream::Butterfly { n, offsets } => {
                let src = offsets.partition_point(|&o| o <= i) - 1;
                let mut m = i - offsets[src];
                let src = src as u32;
                let mut j = 0;
                loop {
                    let dst = src ^ (1 << j);
                    if dst < *n {
                        if m == 0 {
                            break (src, dst);
                        }
                        m -= 1;
                    }
                    j += 1;
                }
            }
            Stream::Random { n, seed } => {
                let mut rng = rng_for(*seed, i);
                let src = rng.gen_range(0..*n);
                let mut dst = rng.gen_range(0..*n);
                while dst == src {
                    dst = rng.gen_range(0..*n);
                }
                (src, dst)
            }
        };
        Flow { src, dst, index: i }
    }

    pub fn iter(&self) -> impl Iterator<Item = Flow> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// The `i`-th ordered pair `(a, b)`, `a != b`, over `0..n` in ascending order.
#[inline]
fn ordered_pair(i: u64, n: u64) -> (u32, u32) {
    let a = i / (n - 1);
    let r = i % (n - 1);
    let b = if r < a { r } else { r + 1 };
    (a as u32, b as u32)
}
