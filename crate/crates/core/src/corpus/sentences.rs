use std::collections::{BTreeSet, HashSet};
use std::io::Read;
use std::path::Path;

use crate::annotations::TrainingSets;
use crate::{Dimension, Error, Result};

/// A row of a sentence table. `labels` is present when the table carries a
/// `labels` column (consensus dimensions, `;`-separated, may be empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub id: String,
    pub text: String,
    pub labels: Option<BTreeSet<Dimension>>,
}

pub fn load_sentence_table(path: &Path) -> Result<Vec<SentenceRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sentence_table(file, &path.display().to_string())
}

/// Reads `sentence_id,text[,labels]`. Unlike annotation exports, any bad row
/// is an error: these tables are small and hand-maintained.
pub fn parse_sentence_table<R: Read>(reader: R, source_name: &str) -> Result<Vec<SentenceRecord>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_lowercase()).collect();
    let labeled = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["sentence_id", "text"] => false,
        ["sentence_id", "text", "labels"] => true,
        _ => {
            return Err(Error::parse(
                source_name,
                1,
                format!("expected header `sentence_id,text[,labels]`, found `{}`", header.join(",")),
            ))
        }
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let id = row[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::parse(source_name, line, "empty sentence_id"));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::parse(source_name, line, format!("duplicate sentence_id `{id}`")));
        }
        let labels = if labeled {
            let (labels, _) = super::annotations::parse_labels(&row[2]).map_err(|m| Error::parse(source_name, line, m))?;
            Some(labels)
        } else {
            None
        };
        out.push(SentenceRecord { id, text: row[1].to_string(), labels });
    }
    Ok(out)
}

/// Training sets from consensus labels carried by the table itself: every
/// labeled sentence without `d` is a negative for `d`.
pub fn labeled_training_sets(records: &[SentenceRecord]) -> Result<TrainingSets> {
    let mut sets = TrainingSets::default();
    for d in Dimension::ALL {
        let s = sets.sets.entry(d).or_default();
        for r in records {
            let Some(labels) = &r.labels else {
                return Err(Error::Invalid(format!("sentence `{}` has no labels column", r.id)));
            };
            if labels.contains(&d) {
                s.positives.push(r.id.clone());
            } else {
                s.negatives.push(r.id.clone());
            }
        }
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_table() {
        let t = "sentence_id,text,labels\na,\"hi, there\",fun;support\nb,no,\n";
        let rows = parse_sentence_table(t.as_bytes(), "t").unwrap();
        assert_eq!(rows[0].text, "hi, there");
        assert_eq!(rows[1].labels.as_ref().unwrap().len(), 0);
        let sets = labeled_training_sets(&rows).unwrap();
        assert_eq!(sets.get(Dimension::Fun).positives, vec!["a"]);
        assert_eq!(sets.get(Dimension::Fun).negatives, vec!["b"]);
    }

    #[test]
    fn bad_tables() {
        assert!(parse_sentence_table("id,text\n".as_bytes(), "t").is_err());
        assert!(parse_sentence_table("sentence_id,text\na,x\na,y\n".as_bytes(), "t").is_err());
        assert!(parse_sentence_table("sentence_id,text,labels\na,x,nonsense\n".as_bytes(), "t").is_err());
        let plain = parse_sentence_table("sentence_id,text\na,x\n".as_bytes(), "t").unwrap();
        assert!(labeled_training_sets(&plain).is_err());
    }
}
