//! Construction, routing, and flow-level evaluation of dual-port
//! server-centric datacenter networks.
//!
//! The crate builds stellar networks (every base-graph edge replaced by two
//! servers, every base node by a switch), the generalized-hypercube instance
//! GQ*, and the FiConn and DPillar families. It routes synthetic workloads
//! with each family's algorithms, optionally under random link failures, and
//! reports throughput, distance, connectivity, load, and cost figures.

pub mod error;
pub mod faults;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod routing;
pub mod seed;
pub mod topology;
pub mod traffic;

pub use error::{Error, Result};
