use crate::error::{Error, Result};

/// Parses flat `key = value` text into entries in file order.
///
/// Blank lines and lines starting with `#` are skipped. Underscores in keys
/// become hyphens, so `fault_fraction` and `fault-fraction` are the same key.
/// A repeated key is an error.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let input = |message: String| Error::Input {
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| input(format!("expected key = value, got {line:?}")))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(input("empty key".into()));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(input(format!("{key} is set twice")));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Parses a seed list: comma-separated values and inclusive `A..B` ranges.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::argument(format!("bad seed list {s:?}"));
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (u64, u64) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b {
                return Err(bad());
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(seeds)
}
