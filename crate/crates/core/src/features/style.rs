use crate::resources::StyleLexica;
use crate::text::{raw_tokens, Sentence, TokenKind};

pub const STYLE_NAMES: [&str; 26] = [
    "elongated_words",
    "caps_words",
    "question_marks",
    "exclamation_marks",
    "ellipses",
    "emoticons",
    "hedge_ratio",
    "politeness_ratio",
    "morality_ratio",
    "empathy_ratio",
    "integration_ratio",
    "pol_gratitude",
    "pol_apology",
    "pol_please",
    "pol_please_start",
    "pol_greeting",
    "pol_deference",
    "pol_direct_question",
    "pol_direct_start",
    "pol_counterfactual",
    "pol_indicative",
    "pol_factuality",
    "pol_first_person_start",
    "pol_first_person_plural",
    "pol_first_person",
    "pol_second_person",
];

fn has_elongation(word: &str) -> bool {
    let mut run = 1;
    let mut prev: Option<char> = None;
    for c in word.chars().flat_map(char::to_lowercase) {
        if Some(c) == prev && c.is_alphabetic() {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            run = 1;
        }
        prev = Some(c);
    }
    false
}

fn is_caps_word(word: &str) -> bool {
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

fn count_ellipses(text: &str) -> usize {
    let mut n = text.matches('\u{2026}').count();
    let mut run = 0;
    for c in text.chars().chain(std::iter::once(' ')) {
        if c == '.' {
            run += 1;
        } else {
            if run >= 3 {
                n += 1;
            }
            run = 0;
        }
    }
    n
}

fn contains_seq(words: &[&str], seq: &[&str]) -> bool {
    words.windows(seq.len()).any(|w| w == seq)
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Syntactic markers (counts), word-list ratios and lexical politeness
/// strategies (0/1 indicators), in [`STYLE_NAMES`] order.
pub fn style_features(sentence: &Sentence, lexica: &StyleLexica) -> Vec<f64> {
    let raw = raw_tokens(&sentence.text);
    let raw_words: Vec<&str> = raw
        .iter()
        .filter(|t| t.kind == TokenKind::Word && t.placeholder.is_none())
        .map(|t| t.text)
        .collect();
    let words: Vec<&str> = sentence
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Word)
        .map(|t| t.surface.as_str())
        .collect();
    let first = words.first().copied().unwrap_or("");
    let any = |set: &[&str]| words.iter().any(|w| set.contains(w));
    let tokens = &sentence.tokens;

    vec![
        raw_words.iter().filter(|w| has_elongation(w)).count() as f64,
        raw_words.iter().filter(|w| is_caps_word(w)).count() as f64,
        sentence.text.matches('?').count() as f64,
        sentence.text.matches('!').count() as f64,
        count_ellipses(&sentence.text) as f64,
        tokens.iter().filter(|t| t.kind == TokenKind::Emoticon).count() as f64,
        lexica.hedge.ratio(tokens),
        lexica.politeness.ratio(tokens),
        lexica.morality.ratio(tokens),
        lexica.empathy.ratio(tokens),
        lexica.integration.ratio(tokens),
        flag(any(&["thank", "thanks", "appreciate", "appreciated", "grateful"])),
        flag(any(&["sorry", "apologize", "apologise", "apologies", "oops"]) || contains_seq(&words, &["excuse", "me"])),
        flag(words.iter().skip(1).any(|w| *w == "please")),
        flag(first == "please"),
        flag(["hi", "hello", "hey", "greetings"].contains(&first)),
        flag(["great", "good", "nice", "interesting", "cool", "excellent", "awesome"].contains(&first)),
        flag(["what", "why", "who", "how", "where", "when"].contains(&first)),
        flag(["so", "then", "and", "but", "or"].contains(&first)),
        flag(contains_seq(&words, &["could", "you"]) || contains_seq(&words, &["would", "you"])),
        flag(contains_seq(&words, &["can", "you"]) || contains_seq(&words, &["will", "you"])),
        flag(
            contains_seq(&words, &["in", "fact"])
                || any(&["actually", "honestly", "truly"])
                || contains_seq(&words, &["the", "truth"])
                || contains_seq(&words, &["the", "point"]),
        ),
        flag(["i", "my", "mine", "myself"].contains(&first)),
        flag(any(&["we", "our", "ours", "us", "ourselves"])),
        flag(words.iter().skip(1).any(|w| ["i", "me", "my", "mine", "myself"].contains(w))),
        flag(any(&["you", "your", "yours", "yourself", "yourselves"])),
    ]
}
