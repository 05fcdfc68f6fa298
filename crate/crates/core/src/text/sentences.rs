use serde::{Deserialize, Serialize};

use super::{tokenize, TextRules, Token};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    /// Trimmed sentence text with original casing.
    pub text: String,
    pub tokens: Vec<Token>,
    /// Ordinal of the sentence within its source text.
    pub index_in_text: usize,
    /// Byte offset of `text` in the source text.
    pub start: usize,
}

impl Sentence {
    /// A standalone sentence (no segmentation), e.g. an annotated item.
    pub fn from_text(text: &str) -> Self {
        let text = text.trim();
        Sentence {
            text: text.to_string(),
            tokens: if text.chars().any(char::is_alphanumeric) { tokenize(text) } else { Vec::new() },
            index_in_text: 0,
            start: 0,
        }
    }

    pub fn word_count(&self) -> usize {
        super::word_count(&self.tokens)
    }
}

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}'];

/// Split with the bundled abbreviation list.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    split_sentences_with(text, TextRules::bundled())
}

/// Boundaries fall after runs of `.`, `!`, `?` (plus closing quotes or
/// brackets) that are followed by whitespace or the end of input, and at
/// newlines. A single `.` ending a listed abbreviation is not a boundary.
/// Segments without any word character are merged into a neighbour.
pub fn split_sentences_with(text: &str, rules: &TextRules) -> Vec<Sentence> {
    let mut cuts: Vec<usize> = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c == '\n' {
            cuts.push(pos + 1);
            i += 1;
            continue;
        }
        if matches!(c, '.' | '!' | '?' | '\u{2026}') {
            let run_start = pos;
            let mut j = i;
            while j < bytes.len() && matches!(bytes[j].1, '.' | '!' | '?' | '\u{2026}') {
                j += 1;
            }
            while j < bytes.len() && CLOSERS.contains(&bytes[j].1) {
                j += 1;
            }
            let end = bytes.get(j).map(|&(p, _)| p).unwrap_or(text.len());
            let at_boundary = j == bytes.len() || bytes[j].1.is_whitespace();
            let run = &text[run_start..end];
            if at_boundary && !(run == "." && ends_with_abbreviation(&text[..run_start], rules)) {
                cuts.push(end);
            }
            i = j.max(i + 1);
            continue;
        }
        i += 1;
    }
    cuts.push(text.len());

    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut prev = 0;
    for cut in cuts {
        if cut <= prev {
            continue;
        }
        let seg = &text[prev..cut];
        let lead = seg.len() - seg.trim_start().len();
        let trimmed = seg.trim();
        if !trimmed.is_empty() {
            spans.push((prev + lead, prev + lead + trimmed.len()));
        }
        prev = cut;
    }

    // Merge segments with no word characters into the previous one (or the next).
    let has_word = |s: &(usize, usize)| text[s.0..s.1].chars().any(char::is_alphanumeric);
    let mut merged: Vec<(usize, usize)> = Vec::new();
    let mut pending_start: Option<usize> = None;
    for span in spans {
        if has_word(&span) {
            let start = pending_start.take().unwrap_or(span.0);
            merged.push((start, span.1));
        } else if let Some(last) = merged.last_mut() {
            last.1 = span.1;
        } else {
            pending_start.get_or_insert(span.0);
        }
    }
    if let Some(start) = pending_start {
        // The whole text has no word character.
        merged.push((start, text.trim_end().len()));
    }

    merged
        .into_iter()
        .enumerate()
        .map(|(idx, (s, e))| {
            let t = &text[s..e];
            Sentence {
                text: t.to_string(),
                tokens: if t.chars().any(char::is_alphanumeric) { tokenize(t) } else { Vec::new() },
                index_in_text: idx,
                start: s,
            }
        })
        .collect()
}

fn ends_with_abbreviation(before: &str, rules: &TextRules) -> bool {
    let word = before
        .rsplit(|c: char| c.is_whitespace() || c == '(' || c == '"')
        .next()
        .unwrap_or("");
    !word.is_empty() && rules.abbreviations.contains(&word.to_lowercase())
}
