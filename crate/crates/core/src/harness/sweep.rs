use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{
    cost_table, gamma_ladder, parse_config, parse_seeds, run, write_cost_csv, write_summary_csv,
    ExperimentSpec, FaultSource, RouterKind, TopologySpec, RHO_LADDER, SUMMARY_HEADER,
};
use crate::error::{Error, Result};
use crate::faults::DEFAULT_MAX_FRACTION;
use crate::seed::mix;
use crate::traffic::PatternSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Flow experiments over topology × router × pattern × fault fraction.
    Flows,
    /// Cost table over topology family × rho × gamma.
    Cost,
}

/// A parameter grid; every list key spans one axis of the product.
#[derive(Clone, Debug)]
pub struct Grid {
    pub mode: SweepMode,
    pub topologies: Vec<TopologySpec>,
    pub routers: Vec<RouterKind>,
    pub patterns: Vec<PatternSpec>,
    pub fault_fractions: Vec<f64>,
    /// Every cell runs all seeds.
    pub seeds: Vec<u64>,
    pub rhos: Vec<f64>,
    pub gammas: Vec<f64>,
    pub workers: usize,
    pub max_fault_fraction: f64,
    pub check_paths: bool,
}

fn list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(parse)
        .collect()
}

fn number<T: std::str::FromStr>(key: &str) -> impl Fn(&str) -> Result<T> + '_ {
    move |v| {
        v.parse()
            .map_err(|_| Error::argument(format!("bad value {v:?} for {key}")))
    }
}

/// Parses a grid file: flat `key = value` lines with comma-separated lists.
///
/// Keys: `mode` (`flows` or `cost`), `topology`, `router`, `pattern`,
/// `fault-fraction`, `seeds`, `rho`, `gamma`, `workers`,
/// `max-fault-fraction`, `check`. A missing `topology` or `router` list
/// makes the grid empty.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let mut grid = Grid {
        mode: SweepMode::Flows,
        topologies: Vec::new(),
        routers: Vec::new(),
        patterns: vec![PatternSpec::AllToAll],
        fault_fractions: vec![0.0],
        seeds: vec![0],
        rhos: RHO_LADDER.to_vec(),
        gammas: gamma_ladder(),
        workers: 0,
        max_fault_fraction: DEFAULT_MAX_FRACTION,
        check_paths: false,
    };
    for (key, value) in parse_config(text)? {
        match key.as_str() {
            "mode" => {
                grid.mode = match value.as_str() {
                    "flows" => SweepMode::Flows,
                    "cost" => SweepMode::Cost,
                    _ => return Err(Error::argument(format!("unknown sweep mode {value:?}"))),
                }
            }
            "topology" => grid.topologies = list(&value, str::parse)?,
            "router" => grid.routers = list(&value, str::parse)?,
            "pattern" => grid.patterns = list(&value, str::parse)?,
            "fault-fraction" => grid.fault_fractions = list(&value, number(&key))?,
            "seeds" => grid.seeds = parse_seeds(&value)?,
            "rho" => grid.rhos = list(&value, number(&key))?,
            "gamma" => grid.gammas = list(&value, number(&key))?,
            "workers" => grid.workers = number(&key)(&value)?,
            "max-fault-fraction" => grid.max_fault_fraction = number(&key)(&value)?,
            "check" => grid.check_paths = number(&key)(&value)?,
            _ => return Err(Error::argument(format!("unknown grid key {key:?}"))),
        }
    }
    Ok(grid)
}

/// Outcome of a sweep.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    pub cells: usize,
    /// Cells computed by this call.
    pub ran: usize,
    /// Cells whose output already existed.
    pub resumed: usize,
    /// `(cell, error)` for every cell that failed.
    pub failed: Vec<(String, String)>,
    /// The concatenated output file.
    pub output: PathBuf,
}

/// Runs every cell of `grid`, writing into `out_dir`.
///
/// Flow cells write `cells/<cell>.csv`; a cell whose file exists is not
/// rerun, so an interrupted sweep resumes where it stopped. Completed cells
/// are concatenated into `summary.csv` and failures listed in `failed.txt`.
/// Cost grids write `cost.csv`.
pub fn sweep(grid: &Grid, out_dir: &Path) -> Result<SweepReport> {
    fs::create_dir_all(out_dir)?;
    if grid.mode == SweepMode::Cost {
        let families: Vec<_> = grid.topologies.iter().map(TopologySpec::family).collect();
        let rows = cost_table(&families, &grid.rhos, &grid.gammas);
        let output = out_dir.join("cost.csv");
        write_cost_csv(&rows, fs::File::create(&output)?)?;
        return Ok(SweepReport {
            cells: rows.len(),
            ran: rows.len(),
            output,
            ..Default::default()
        });
    }

    let cell_dir = out_dir.join("cells");
    fs::create_dir_all(&cell_dir)?;
    let seed_tag = grid
        .seeds
        .iter()
        .fold(grid.seeds.len() as u64, |h, &s| mix(h, s))
        & 0xffff_ffff;
    let mut report = SweepReport {
        output: out_dir.join("summary.csv"),
        ..Default::default()
    };
    let mut files = Vec::new();
    for topology in &grid.topologies {
        for &router in &grid.routers {
            for &pattern in &grid.patterns {
                for &fraction in &grid.fault_fractions {
                    let name = cell_name(&format!(
                        "{topology}_{router}_{pattern}_p{fraction}_s{seed_tag:08x}"
                    ));
                    let file = cell_dir.join(format!("{name}.csv"));
                    report.cells += 1;
                    if file.exists() {
                        report.resumed += 1;
                        files.push(file);
                        continue;
                    }
                    let mut spec = ExperimentSpec::new(topology.clone(), router, pattern);
                    spec.faults = FaultSource::Uniform {
                        fraction,
                        seeds: grid.seeds.clone(),
                    };
                    spec.workers = grid.workers;
                    spec.max_fault_fraction = grid.max_fault_fraction;
                    spec.check_paths = grid.check_paths;
                    match run(&spec)
                        .and_then(|r| write_atomic(&file, |w| write_summary_csv(&r.rows, w)))
                    {
                        Ok(()) => {
                            report.ran += 1;
                            files.push(file);
                        }
                        Err(e) => report.failed.push((name, e.to_string())),
                    }
                }
            }
        }
    }

    write_atomic(&report.output, |w| {
        writeln!(w, "{}", SUMMARY_HEADER.join(","))?;
        for file in &files {
            let text = fs::read_to_string(file)?;
            for line in text.lines().skip(1) {
                writeln!(w, "{line}")?;
            }
        }
        Ok(())
    })?;
    let failed_file = out_dir.join("failed.txt");
    if report.failed.is_empty() {
        if failed_file.exists() {
            fs::remove_file(&failed_file)?;
        }
    } else {
        write_atomic(&failed_file, |w| {
            for (cell, err) in &report.failed {
                writeln!(w, "{cell}\t{err}")?;
            }
            Ok(())
        })?;
    }
    Ok(report)
}

/// File-name-safe form of a cell description.
fn cell_name(raw: &str) -> String {
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Writes through a temporary file so readers never see a partial file.
fn write_atomic(path: &Path, body: impl FnOnce(&mut fs::File) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    body(&mut f)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}
