use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Dimension, Error, Result};

/// One annotator's judgment of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub sentence_id: String,
    pub annotator_id: String,
    pub labels: BTreeSet<Dimension>,
    /// The annotator picked "other".
    pub other_flag: bool,
    pub is_gold: bool,
    pub gold_labels: BTreeSet<Dimension>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    /// 1-based line number in the file, header included.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct AnnotationLoad {
    pub records: Vec<AnnotationRecord>,
    pub rejected: Vec<RejectedRow>,
}

const HEADER: [&str; 5] = ["sentence_id", "annotator_id", "labels", "is_gold", "gold_labels"];

pub fn load_annotations(path: &Path) -> Result<AnnotationLoad> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(file, &path.display().to_string())
}

/// Parse the annotation CSV. Bad rows are rejected individually; a wrong
/// header is an error.
pub fn parse_annotations<R: std::io::Read>(reader: R, source_name: &str) -> Result<AnnotationLoad> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_lowercase()).collect();
    if header != HEADER {
        return Err(Error::parse(
            source_name,
            1,
            format!("expected header `{}`, found `{}`", HEADER.join(","), header.join(",")),
        ));
    }
    let mut out = AnnotationLoad::default();
    for (i, row) in rdr.records().enumerate() {
        let line = row.as_ref().ok().and_then(|r| r.position()).map(|p| p.line() as usize).unwrap_or(i + 2);
        match row.map_err(|e| e.to_string()).and_then(|r| parse_row(&r)) {
            Ok(rec) => out.records.push(rec),
            Err(reason) => out.rejected.push(RejectedRow { line, reason }),
        }
    }
    Ok(out)
}

pub(crate) fn parse_labels(field: &str) -> std::result::Result<(BTreeSet<Dimension>, bool), String> {
    let mut labels = BTreeSet::new();
    let mut other = false;
    for token in field.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        if token.eq_ignore_ascii_case("other") {
            other = true;
            continue;
        }
        let d: Dimension = token.parse().map_err(|_| format!("unknown dimension `{token}`"))?;
        labels.insert(d);
    }
    Ok((labels, other))
}

fn parse_bool(field: &str) -> std::result::Result<bool, String> {
    match field.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" | "" => Ok(false),
        other => Err(format!("bad boolean `{other}`")),
    }
}

fn parse_row(row: &csv::StringRecord) -> std::result::Result<AnnotationRecord, String> {
    if row.len() < 4 || row.len() > 5 {
        return Err(format!("expected 5 fields, found {}", row.len()));
    }
    let sentence_id = row[0].trim().to_string();
    let annotator_id = row[1].trim().to_string();
    if sentence_id.is_empty() || annotator_id.is_empty() {
        return Err("empty sentence_id or annotator_id".into());
    }
    let (labels, other_flag) = parse_labels(&row[2])?;
    if labels.is_empty() && !other_flag {
        return Err("no label and no `other`".into());
    }
    let is_gold = parse_bool(&row[3])?;
    let (gold_labels, _) = parse_labels(row.get(4).unwrap_or(""))?;
    if is_gold && gold_labels.is_empty() {
        return Err("gold row without gold_labels".into());
    }
    Ok(AnnotationRecord {
        sentence_id,
        annotator_id,
        labels,
        other_flag,
        is_gold,
        gold_labels: if is_gold { gold_labels } else { BTreeSet::new() },
    })
}
