//! Base graphs, the stellar transform, and the three network families.

mod base;
mod dpillar;
mod export;
mod ficonn;
mod gqstar;
mod stellar;

pub use base::{build_gq, build_gq_within, load_base_graph, BaseGraph, GqParams};
pub use dpillar::{build_dpillar, DPillar, DPillarLayout, DPillarParams};
pub use export::{write_links_csv, write_nodes_csv};
pub use ficonn::{build_ficonn, FiConn, FiConnParams};
pub use gqstar::{build_gq_star, GqStar};
pub use stellar::{inverse_stellar, stellar_transform, StellarMap};

/// Sizings that fill 48-port switches with a GQ* of degree `k(n−1)`.
pub const GQ_STAR_48_PORT_PRESETS: [(u32, u32); 3] = [(2, 25), (3, 17), (4, 13)];
