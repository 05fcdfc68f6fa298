use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punctuation,
    Emoticon,
    Number,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    /// Lowercased surface form.
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn is_wordlike(&self) -> bool {
        matches!(self.kind, TokenKind::Word | TokenKind::Number)
    }
}

/// A token with its original casing, for features that look at capitals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken<'a> {
    pub text: &'a str,
    pub kind: TokenKind,
    /// Replacement surface for collapsed URLs and user handles.
    pub placeholder: Option<&'static str>,
}

impl RawToken<'_> {
    pub fn to_token(&self) -> Token {
        Token {
            surface: match self.placeholder {
                Some(p) => p.to_string(),
                None => self.text.to_lowercase(),
            },
            kind: self.kind,
        }
    }
}

const URL_TOKEN: &str = "<url>";
const USER_TOKEN: &str = "<user>";

// Longest first so ":-)" wins over ":-".
const EMOTICONS: &[&str] = &[
    ":'-(", ":'(", ":-)", ":-(", ":-d", ":-p", ";-)", ":-/", ":-o", ":)", ":(", ":d", ":p", ";)", ":/", ":o", "=)",
    "=(", "<3", "^_^", "^^",
];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn starts_with_ci(s: &str, prefix: &str) -> bool {
    s.len() >= prefix.len() && s.is_char_boundary(prefix.len()) && s[..prefix.len()].eq_ignore_ascii_case(prefix)
}

fn match_emoticon(rest: &str) -> Option<usize> {
    for e in EMOTICONS {
        if starts_with_ci(rest, e) {
            let after = rest[e.len()..].chars().next();
            let last = e.chars().last().unwrap();
            // Letter-final emoticons (":d", ":p") must not run into a word.
            if last.is_alphabetic() && after.is_some_and(is_word_char) {
                continue;
            }
            return Some(e.len());
        }
    }
    None
}

fn match_url(rest: &str) -> Option<usize> {
    if starts_with_ci(rest, "http://") || starts_with_ci(rest, "https://") || starts_with_ci(rest, "www.") {
        Some(rest.find(char::is_whitespace).unwrap_or(rest.len()))
    } else {
        None
    }
}

fn match_handle(rest: &str) -> Option<usize> {
    let body_len = |s: &str| s.find(|c: char| !is_word_char(c)).unwrap_or(s.len());
    if let Some(body) = rest.strip_prefix('@') {
        let n = body_len(body);
        return (n > 0).then_some(1 + n);
    }
    for prefix in ["/u/", "u/"] {
        if let Some(body) = rest.strip_prefix(prefix) {
            let n = body_len(body);
            if n > 0 {
                return Some(prefix.len() + n);
            }
        }
    }
    None
}

fn match_placeholder(rest: &str) -> Option<(usize, &'static str)> {
    [URL_TOKEN, USER_TOKEN]
        .into_iter()
        .find(|p| rest.starts_with(p))
        .map(|p| (p.len(), p))
}

/// Length of a word/number run starting at `rest`. Apostrophes and hyphens
/// join when followed by a word character; `.`/`,` join digits in numbers.
fn match_word(rest: &str) -> usize {
    let chars: Vec<(usize, char)> = rest.char_indices().collect();
    let mut end = 0;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if is_word_char(c) {
            end = pos + c.len_utf8();
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).map(|&(_, n)| n);
        let prev = if i > 0 { Some(chars[i - 1].1) } else { None };
        let joins = match c {
            '\'' | '\u{2019}' | '-' => next.is_some_and(is_word_char) && i > 0,
            '.' | ',' => prev.is_some_and(|p| p.is_ascii_digit()) && next.is_some_and(|n| n.is_ascii_digit()),
            _ => false,
        };
        if joins {
            i += 1;
        } else {
            break;
        }
    }
    end
}

/// Split text into tokens keeping the original casing.
pub fn raw_tokens(text: &str) -> Vec<RawToken<'_>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if let Some((len, p)) = match_placeholder(rest) {
            out.push(RawToken { text: &rest[..len], kind: TokenKind::Word, placeholder: Some(p) });
            i += len;
            continue;
        }
        if let Some(len) = match_url(rest) {
            out.push(RawToken { text: &rest[..len], kind: TokenKind::Word, placeholder: Some(URL_TOKEN) });
            i += len;
            continue;
        }
        if let Some(len) = match_handle(rest) {
            out.push(RawToken { text: &rest[..len], kind: TokenKind::Word, placeholder: Some(USER_TOKEN) });
            i += len;
            continue;
        }
        if let Some(len) = match_emoticon(rest) {
            out.push(RawToken { text: &rest[..len], kind: TokenKind::Emoticon, placeholder: None });
            i += len;
            continue;
        }
        if is_word_char(c) {
            let len = match_word(rest);
            let piece = &rest[..len];
            let kind = if piece.chars().any(char::is_alphabetic) {
                TokenKind::Word
            } else if piece.chars().any(|c| c.is_numeric()) {
                TokenKind::Number
            } else {
                TokenKind::Punctuation
            };
            out.push(RawToken { text: piece, kind, placeholder: None });
            i += len;
            continue;
        }
        // Punctuation run: everything up to whitespace or a word character.
        let mut len = c.len_utf8();
        while let Some(ch) = rest[len..].chars().next() {
            let tail = &rest[len..];
            if ch.is_whitespace()
                || is_word_char(ch)
                || match_handle(tail).is_some()
                || match_placeholder(tail).is_some()
                || match_emoticon(tail).is_some()
            {
                break;
            }
            len += ch.len_utf8();
        }
        out.push(RawToken { text: &rest[..len], kind: TokenKind::Punctuation, placeholder: None });
        i += len;
    }
    out
}

/// Lowercased tokens. Contractions stay whole, punctuation runs become one
/// token, URLs and user handles collapse to `<url>` and `<user>`.
pub fn tokenize(text: &str) -> Vec<Token> {
    raw_tokens(text).iter().map(RawToken::to_token).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn contraction_and_punctuation_run() {
        assert_eq!(surfaces("I can't GO!!!"), vec!["i", "can't", "go", "!!!"]);
        let kinds: Vec<TokenKind> = tokenize("I can't GO!!!").into_iter().map(|t| t.kind).collect();
        assert_eq!(kinds.last(), Some(&TokenKind::Punctuation));
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(surfaces("a b"), vec!["a", "b"]);
        assert_eq!(surfaces("..."), vec!["..."]);
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn placeholders_and_emoticons() {
        assert_eq!(
            surfaces("ask @bob_99 or u/alice at https://x.org/a?b=1 :)"),
            vec!["ask", "<user>", "or", "<user>", "at", "<url>", ":)"]
        );
        assert_eq!(tokenize(":D")[0].kind, TokenKind::Emoticon);
        assert_eq!(surfaces(":Daniel"), vec![":", "daniel"]);
    }

    #[test]
    fn numbers_and_hyphens() {
        let t = tokenize("know-how costs 3.50 dollars");
        assert_eq!(t[0].surface, "know-how");
        assert_eq!(t[2], Token { surface: "3.50".into(), kind: TokenKind::Number });
    }

    #[test]
    fn idempotent_on_joined_output() {
        for text in ["I can't GO!!! :) see www.x.com, @me", "'cause it's 4,000.5 -- ok?!", "<url> <user> ^_^"] {
            let once = tokenize(text);
            let joined: Vec<String> = once.iter().map(|t| t.surface.clone()).collect();
            assert_eq!(tokenize(&joined.join(" ")), once, "{text}");
        }
    }
}
