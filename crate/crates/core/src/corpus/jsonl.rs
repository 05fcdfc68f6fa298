use std::path::Path;

use chrono::{DateTime, Utc};
use serde_json::Value;

use super::{read_file, Collector, LoadReport, Message, Source};
use crate::Result;

pub(super) fn load(path: &Path, source: Source) -> Result<LoadReport> {
    let text = read_file(path)?;
    let mut collector = Collector::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        collector.record(parse_line(line, i + 1, source));
    }
    Ok(collector.finish())
}

fn string_field(obj: &serde_json::Map<String, Value>, key: &str) -> Option<String> {
    match obj.get(key)? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn timestamp_field(v: Option<&Value>) -> Option<Option<DateTime<Utc>>> {
    let secs = match v {
        None | Some(Value::Null) => return Some(None),
        Some(Value::Number(n)) => n.as_f64()?,
        Some(Value::String(s)) => s.trim().parse::<f64>().ok()?,
        Some(_) => return None,
    };
    DateTime::from_timestamp(secs.floor() as i64, 0).map(Some)
}

/// Required key `text`; optional `id, author, recipient, created_utc, group`.
/// A missing id becomes `line-<n>`.
fn parse_line(line: &str, line_no: usize, source: Source) -> Option<Message> {
    let value: Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;
    let text = obj.get("text")?.as_str()?.to_string();
    let timestamp = timestamp_field(obj.get("created_utc"))?;
    Some(Message {
        id: string_field(obj, "id").unwrap_or_else(|| format!("line-{line_no}")),
        author: string_field(obj, "author").unwrap_or_default(),
        recipient: string_field(obj, "recipient"),
        timestamp,
        text,
        group: string_field(obj, "group"),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_messages, MessageFormat};
    use crate::Error;

    fn write(body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        std::fs::write(&p, body).unwrap();
        (dir, p)
    }

    #[test]
    fn single_comment() {
        let (_d, p) = write(r#"{"id":"a1","author":"u1","text":"hi there","group":"g"}"#);
        let r = load_messages(&p, MessageFormat::CommentsJsonl).unwrap();
        assert_eq!(r.messages.len(), 1);
        let m = &r.messages[0];
        assert_eq!((m.id.as_str(), m.author.as_str(), m.text.as_str()), ("a1", "u1", "hi there"));
        assert_eq!(m.group.as_deref(), Some("g"));
        assert_eq!(m.source, Source::Comments);
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn empty_file_is_empty_stream() {
        let (_d, p) = write("");
        let r = load_messages(&p, MessageFormat::TweetsJsonl).unwrap();
        assert!(r.messages.is_empty());
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn malformed_lines_are_counted() {
        let body = concat!(
            r#"{"id":"1","text":"ok","created_utc":1500000000}"#, "\n",
            "not json\n",
            r#"{"id":"2","text":"fine","created_utc":"1500000001"}"#, "\n",
            r#"{"id":"1","text":"duplicate id"}"#, "\n",
            r#"{"id":"3","text":"   "}"#, "\n",
            r#"{"id":"4","text":"x","author":"a"}"#, "\n",
        );
        let (_d, p) = write(body);
        let r = load_messages(&p, MessageFormat::CommentsJsonl).unwrap();
        assert_eq!(r.records, 6);
        assert_eq!(r.skipped, 3);
        assert_eq!(r.messages[1].timestamp.unwrap().timestamp(), 1_500_000_001);
    }

    #[test]
    fn mostly_malformed_is_format_mismatch() {
        let (_d, p) = write("a\nb\n{\"text\":\"ok\"}\n");
        let err = load_messages(&p, MessageFormat::CommentsJsonl).unwrap_err();
        assert!(matches!(err, Error::FormatMismatch { malformed: 2, total: 3, .. }));
    }
}
