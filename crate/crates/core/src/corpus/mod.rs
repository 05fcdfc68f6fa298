//! Corpus ingestion: message corpora, annotation exports and geo tables.

mod annotations;
mod dialog;
mod email;
mod geo;
mod jsonl;
mod sentences;

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use annotations::{load_annotations, parse_annotations, AnnotationLoad, AnnotationRecord, RejectedRow};
pub use dialog::DialogSeparator;
pub use sentences::{labeled_training_sets, load_sentence_table, parse_sentence_table, SentenceRecord};
pub use geo::{georeference_users, load_group_regions, load_region_values, GeoMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Comments,
    Email,
    Dialog,
    Tweets,
}

/// One unit of communication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub author: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipient: Option<String>,
    #[serde(
        default,
        rename = "created_utc",
        with = "chrono::serde::ts_seconds_option",
        skip_serializing_if = "Option::is_none"
    )]
    pub timestamp: Option<DateTime<Utc>>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageFormat {
    CommentsJsonl,
    EmailDir,
    DialogTsv,
    TweetsJsonl,
}

impl FromStr for MessageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "comments_jsonl" => Ok(MessageFormat::CommentsJsonl),
            "email_dir" => Ok(MessageFormat::EmailDir),
            "dialog_tsv" => Ok(MessageFormat::DialogTsv),
            "tweets_jsonl" => Ok(MessageFormat::TweetsJsonl),
            other => Err(Error::Invalid(format!(
                "unknown format `{other}` (expected comments_jsonl, email_dir, dialog_tsv or tweets_jsonl)"
            ))),
        }
    }
}

impl fmt::Display for MessageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageFormat::CommentsJsonl => "comments_jsonl",
            MessageFormat::EmailDir => "email_dir",
            MessageFormat::DialogTsv => "dialog_tsv",
            MessageFormat::TweetsJsonl => "tweets_jsonl",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Dialog field separator; detected per line when `None`.
    pub dialog_separator: Option<DialogSeparator>,
}

/// Parsed messages in file order plus the number of skipped records.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub messages: Vec<Message>,
    pub records: usize,
    pub skipped: usize,
}

pub fn load_messages(path: &Path, format: MessageFormat) -> Result<LoadReport> {
    load_messages_with(path, format, &LoadOptions::default())
}

pub fn load_messages_with(path: &Path, format: MessageFormat, options: &LoadOptions) -> Result<LoadReport> {
    let report = match format {
        MessageFormat::CommentsJsonl => jsonl::load(path, Source::Comments)?,
        MessageFormat::TweetsJsonl => jsonl::load(path, Source::Tweets)?,
        MessageFormat::EmailDir => email::load(path)?,
        MessageFormat::DialogTsv => dialog::load(path, options.dialog_separator.clone())?,
    };
    check_malformed(path, &report)?;
    Ok(report)
}

/// More than half of the records malformed means the format is wrong.
fn check_malformed(path: &Path, report: &LoadReport) -> Result<()> {
    if report.records > 0 && report.skipped * 2 > report.records {
        return Err(Error::FormatMismatch {
            path: path.to_path_buf(),
            malformed: report.skipped,
            total: report.records,
        });
    }
    Ok(())
}

/// Collects messages while enforcing id uniqueness and non-empty text.
#[derive(Default)]
pub(crate) struct Collector {
    report: LoadReport,
    seen: HashSet<String>,
}

impl Collector {
    pub(crate) fn record(&mut self, message: Option<Message>) {
        self.report.records += 1;
        match message {
            Some(m) if !m.id.is_empty() && !m.text.trim().is_empty() && !self.seen.contains(&m.id) => {
                self.seen.insert(m.id.clone());
                self.report.messages.push(m);
            }
            _ => self.report.skipped += 1,
        }
    }

    /// Several messages from one record (multi-recipient email). The record
    /// counts once; it is skipped if none of its messages is valid.
    pub(crate) fn record_many(&mut self, messages: Vec<Message>) {
        self.report.records += 1;
        let before = self.report.messages.len();
        for m in messages {
            if !m.id.is_empty() && !m.text.trim().is_empty() && self.seen.insert(m.id.clone()) {
                self.report.messages.push(m);
            }
        }
        if self.report.messages.len() == before {
            self.report.skipped += 1;
        }
    }

    pub(crate) fn finish(self) -> LoadReport {
        self.report
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Write messages as `comments_jsonl`-compatible lines (all fields kept).
pub fn write_messages_jsonl(path: &Path, messages: &[Message]) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for m in messages {
        serde_json::to_writer(&mut w, m)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read back what [`write_messages_jsonl`] produced.
pub fn read_messages_jsonl(path: &Path) -> Result<Vec<Message>> {
    let text = read_file(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::parse(path.display().to_string(), i + 1, e.to_string()))
        })
        .collect()
}
