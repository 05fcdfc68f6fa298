use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use walkdir::WalkDir;

use super::{Collector, LoadReport, Message, Source};
use crate::{Error, Result};

/// Every regular file under `path` (or `path` itself) is one email. Files are
/// visited in sorted path order.
pub(super) fn load(path: &Path) -> Result<LoadReport> {
    let mut files = Vec::new();
    if path.is_file() {
        files.push(path.to_path_buf());
    } else {
        for entry in WalkDir::new(path).sort_by_file_name() {
            let entry = entry.map_err(|e| {
                let p = e.path().unwrap_or(path).to_path_buf();
                Error::io(p, e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk error")))
            })?;
            if entry.file_type().is_file() {
                files.push(entry.into_path());
            }
        }
    }
    let mut collector = Collector::default();
    for file in files {
        let raw = match std::fs::read(&file) {
            Ok(bytes) => String::from_utf8_lossy(&bytes).into_owned(),
            Err(e) => return Err(Error::io(&file, e)),
        };
        let rel = file.strip_prefix(path).unwrap_or(&file);
        let base = if rel.as_os_str().is_empty() {
            file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
        } else {
            rel.to_string_lossy().into_owned()
        };
        match parse_email(&raw, &base) {
            Some(msgs) => collector.record_many(msgs),
            None => collector.record(None),
        }
    }
    Ok(collector.finish())
}

struct Headers {
    fields: Vec<(String, String)>,
}

impl Headers {
    fn get(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

/// Headers up to the first blank line (continuation lines folded), then body.
fn split_headers(raw: &str) -> Option<(Headers, &str)> {
    let mut fields: Vec<(String, String)> = Vec::new();
    let mut offset = 0;
    for line in raw.split_inclusive('\n') {
        offset += line.len();
        let l = line.trim_end_matches(['\r', '\n']);
        if l.is_empty() {
            return Some((Headers { fields }, &raw[offset..]));
        }
        if l.starts_with([' ', '\t']) {
            let last = fields.last_mut()?;
            last.1.push(' ');
            last.1.push_str(l.trim());
            continue;
        }
        let (k, v) = l.split_once(':')?;
        fields.push((k.trim().to_string(), v.trim().to_string()));
    }
    None
}

fn address(s: &str) -> String {
    let s = s.trim();
    let inner = match (s.find('<'), s.rfind('>')) {
        (Some(a), Some(b)) if a < b => &s[a + 1..b],
        _ => s,
    };
    inner.trim().trim_matches('"').to_lowercase()
}

pub(super) fn parse_date(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    let no_comment = match s.rfind('(') {
        Some(i) if s.ends_with(')') => s[..i].trim(),
        _ => s,
    };
    if let Ok(d) = DateTime::parse_from_rfc2822(no_comment) {
        return Some(d.with_timezone(&Utc));
    }
    if let Ok(d) = DateTime::parse_from_rfc3339(no_comment) {
        return Some(d.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(d) = NaiveDateTime::parse_from_str(no_comment, fmt) {
            return Some(d.and_utc());
        }
    }
    None
}

/// One message per recipient; `None` when there is no header block, no
/// sender, or an empty body. A missing `To:` yields one message without
/// recipient.
fn parse_email(raw: &str, base_id: &str) -> Option<Vec<Message>> {
    let (headers, body) = split_headers(raw)?;
    let author = address(headers.get("from")?);
    if author.is_empty() {
        return None;
    }
    let body = body.trim();
    if body.is_empty() {
        return None;
    }
    let base = headers
        .get("message-id")
        .map(|v| v.trim().trim_matches(['<', '>']).to_string())
        .filter(|v| !v.is_empty())
        .unwrap_or_else(|| base_id.to_string());
    let timestamp = headers.get("date").and_then(parse_date);
    let recipients: Vec<String> = headers
        .get("to")
        .map(|v| v.split(',').map(address).filter(|a| !a.is_empty()).collect())
        .unwrap_or_default();
    let make = |id: String, recipient: Option<String>| Message {
        id,
        author: author.clone(),
        recipient,
        timestamp,
        text: body.to_string(),
        group: None,
        source: Source::Email,
    };
    Some(match recipients.len() {
        0 => vec![make(base, None)],
        1 => vec![make(base, recipients.into_iter().next())],
        _ => recipients
            .into_iter()
            .enumerate()
            .map(|(i, r)| make(format!("{base}#{}", i + 1), Some(r)))
            .collect(),
    })
}
