use std::path::Path;

use super::{Collector, LoadReport, Message, Source};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DialogSeparator {
    /// The ` +++$+++ ` separator of the public movie-dialog corpus.
    Cornell,
    Tab,
    Custom(String),
}

impl DialogSeparator {
    fn as_str(&self) -> &str {
        match self {
            DialogSeparator::Cornell => "+++$+++",
            DialogSeparator::Tab => "\t",
            DialogSeparator::Custom(s) => s,
        }
    }

    fn detect(line: &str) -> DialogSeparator {
        if line.contains("+++$+++") {
            DialogSeparator::Cornell
        } else {
            DialogSeparator::Tab
        }
    }
}

/// Lines are `line_id, character_id, movie_id, [character_name,] text`.
/// The character becomes the author and the movie the group.
pub(super) fn load(path: &Path, separator: Option<DialogSeparator>) -> Result<LoadReport> {
    // Movie-dialog dumps are not always valid UTF-8.
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let mut collector = Collector::default();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let sep = separator.clone().unwrap_or_else(|| DialogSeparator::detect(line));
        collector.record(parse_line(line, &sep));
    }
    Ok(collector.finish())
}

fn parse_line(line: &str, sep: &DialogSeparator) -> Option<Message> {
    let fields: Vec<&str> = line.split(sep.as_str()).map(str::trim).collect();
    let (id, author, group, text) = match fields.len() {
        4 => (fields[0], fields[1], fields[2], fields[3].to_string()),
        n if n >= 5 => (fields[0], fields[1], fields[2], fields[4..].join(sep.as_str())),
        _ => return None,
    };
    if id.is_empty() || author.is_empty() {
        return None;
    }
    Some(Message {
        id: id.to_string(),
        author: author.to_string(),
        recipient: None,
        timestamp: None,
        text,
        group: (!group.is_empty()).then(|| group.to_string()),
        source: Source::Dialog,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_messages, load_messages_with, LoadOptions, MessageFormat};

    #[test]
    fn cornell_and_tab_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lines.txt");
        std::fs::write(
            &p,
            "L1045 +++$+++ u0 +++$+++ m0 +++$+++ BIANCA +++$+++ They do not!\nL2\tu2\tm0\tI do.\nbroken line\n",
        )
        .unwrap();
        let r = load_messages(&p, MessageFormat::DialogTsv).unwrap();
        assert_eq!(r.messages.len(), 2);
        assert_eq!(r.skipped, 1);
        assert_eq!(r.messages[0].text, "They do not!");
        assert_eq!(r.messages[0].author, "u0");
        assert_eq!(r.messages[0].group.as_deref(), Some("m0"));
        assert_eq!(r.messages[1].text, "I do.");
    }

    #[test]
    fn custom_separator() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lines.txt");
        std::fs::write(&p, "L1|u0|m0|Hello you|there\n").unwrap();
        let opts = LoadOptions { dialog_separator: Some(DialogSeparator::Custom("|".into())) };
        let r = load_messages_with(&p, MessageFormat::DialogTsv, &opts).unwrap();
        assert_eq!(r.messages[0].text, "there");
        assert_eq!(r.messages[0].id, "L1");
    }
}
