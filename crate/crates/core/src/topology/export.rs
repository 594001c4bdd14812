use std::io::Write;

use crate::error::Result;
use crate::graph::Topology;

/// Writes one row per node: `node_id, kind, label_tuple`.
///
/// Labels print as space-separated coordinates in parentheses; unlabeled
/// topologies leave the column empty.
pub fn write_nodes_csv<W: Write>(topology: &Topology, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "kind", "label_tuple"])?;
    for v in 0..topology.node_count() {
        let label = topology
            .label(v)
            .map(|l| {
                let parts: Vec<String> = l.iter().map(u32::to_string).collect();
                format!("({})", parts.join(" "))
            })
            .unwrap_or_default();
        w.write_record([v.to_string(), topology.kind(v).to_string(), label])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one row per unordered link: `link_src, link_dst, level_or_dimension`.
pub fn write_links_csv<W: Write>(topology: &Topology, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["link_src", "link_dst", "level_or_dimension"])?;
    for (l, [a, b]) in topology.links().iter().enumerate() {
        w.write_record([
            a.to_string(),
            b.to_string(),
            topology.link_tag(l as u32).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
