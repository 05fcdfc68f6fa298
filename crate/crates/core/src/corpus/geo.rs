use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Message;
use crate::{Error, Result};

/// Users located in exactly one region, plus optional region densities.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeoMap {
    pub user_to_region: BTreeMap<String, String>,
    pub region_population_density: BTreeMap<String, f64>,
}

/// Keep a user iff they wrote at least `min_contributions` messages in
/// region-mapped groups and all those groups map to one region.
pub fn georeference_users<'a, I>(messages: I, group_to_region: &BTreeMap<String, String>, min_contributions: usize) -> GeoMap
where
    I: IntoIterator<Item = &'a Message>,
{
    let mut per_user: BTreeMap<&str, (usize, BTreeSet<&str>)> = BTreeMap::new();
    for m in messages {
        let Some(region) = m.group.as_ref().and_then(|g| group_to_region.get(g)) else {
            continue;
        };
        let entry = per_user.entry(m.author.as_str()).or_default();
        entry.0 += 1;
        entry.1.insert(region.as_str());
    }
    let user_to_region = per_user
        .into_iter()
        .filter(|(user, (n, regions))| !user.is_empty() && *n >= min_contributions && regions.len() == 1)
        .map(|(user, (_, regions))| (user.to_string(), regions.into_iter().next().unwrap().to_string()))
        .collect();
    GeoMap {
        user_to_region,
        region_population_density: BTreeMap::new(),
    }
}

fn read_pairs(path: &Path, expected: [&str; 2]) -> Result<Vec<(usize, String, String)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Invalid(format!("{}: {other:?}", path.display())),
        })?;
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_lowercase()).collect();
    if header.len() != 2 || header[0] != expected[0] {
        return Err(Error::parse(
            path.display().to_string(),
            1,
            format!("expected header `{},{}`", expected[0], expected[1]),
        ));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() != 2 {
            return Err(Error::parse(path.display().to_string(), line, "expected 2 fields"));
        }
        out.push((line, row[0].trim().to_string(), row[1].trim().to_string()));
    }
    Ok(out)
}

/// CSV `group,region`.
pub fn load_group_regions(path: &Path) -> Result<BTreeMap<String, String>> {
    Ok(read_pairs(path, ["group", "region"])?
        .into_iter()
        .map(|(_, g, r)| (g, r))
        .collect())
}

/// CSV `region,<value>`: densities (`region,density`) or census indicators
/// (`region,value`).
pub fn load_region_values(path: &Path) -> Result<BTreeMap<String, f64>> {
    read_pairs(path, ["region", "value"])?
        .into_iter()
        .map(|(line, region, v)| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(|x| (region, x))
                .ok_or_else(|| Error::parse(path.display().to_string(), line, format!("bad number `{v}`")))
        })
        .collect()
}
