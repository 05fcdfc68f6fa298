use crate::resources::Resources;
use crate::text::{raw_tokens, Sentence, TokenKind};

pub const SENTIMENT_NAMES: [&str; 6] = ["positive", "neutral", "negative", "compound", "offensive_ratio", "hate_ratio"];

const NEGATION_SCALAR: f64 = -0.74;
const BOOSTER_INCREMENT: f64 = 0.293;
const BOOSTER_DAMPING: [f64; 3] = [1.0, 0.95, 0.9];
const CAPS_EMPHASIS: f64 = 1.5;
const EXCLAMATION_INCREMENT: f64 = 0.292;
const MAX_EXCLAMATIONS: usize = 3;
const NORMALIZE_ALPHA: f64 = 15.0;

/// Lexicon sentiment with negation, boosters, capitalisation and
/// exclamation rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentScores {
    pub positive: f64,
    pub neutral: f64,
    pub negative: f64,
    pub compound: f64,
}

impl SentimentScores {
    pub const NEUTRAL: SentimentScores = SentimentScores { positive: 0.0, neutral: 1.0, negative: 0.0, compound: 0.0 };
}

fn is_upper(word: &str) -> bool {
    word.chars().any(char::is_alphabetic) && word.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
}

fn is_negation(word: &str, resources: &Resources) -> bool {
    resources.negations.contains(word) || word.ends_with("n't")
}

pub fn sentiment_scores(text: &str, resources: &Resources) -> SentimentScores {
    let raw: Vec<&str> = raw_tokens(text)
        .into_iter()
        .filter(|t| t.kind == TokenKind::Word && t.placeholder.is_none())
        .map(|t| t.text)
        .collect();
    if raw.is_empty() {
        return SentimentScores::NEUTRAL;
    }
    let lower: Vec<String> = raw.iter().map(|w| w.to_lowercase()).collect();
    let upper_count = raw.iter().filter(|w| is_upper(w)).count();
    let caps_differ = upper_count > 0 && upper_count < raw.len();

    let mut valences = Vec::with_capacity(raw.len());
    for (i, word) in lower.iter().enumerate() {
        let mut v = match resources.valence.get(word) {
            Some(&v) if !resources.boosters.contains_key(word) => v,
            _ => {
                valences.push(0.0);
                continue;
            }
        };
        if caps_differ && is_upper(raw[i]) {
            v *= CAPS_EMPHASIS;
        }
        let mut negated = false;
        for (d, damping) in BOOSTER_DAMPING.iter().enumerate() {
            let Some(j) = i.checked_sub(d + 1) else { break };
            if let Some(&b) = resources.boosters.get(&lower[j]) {
                v += BOOSTER_INCREMENT * b.signum() * v.signum() * damping;
            }
            negated |= is_negation(&lower[j], resources);
        }
        if negated {
            v *= NEGATION_SCALAR;
        }
        valences.push(v);
    }

    let mut sum: f64 = valences.iter().sum();
    let bangs = text.matches('!').count().min(MAX_EXCLAMATIONS) as f64 * EXCLAMATION_INCREMENT;
    let mut pos_sum: f64 = valences.iter().filter(|&&v| v > 0.0).map(|v| v + 1.0).sum();
    let mut neg_sum: f64 = valences.iter().filter(|&&v| v < 0.0).map(|v| v - 1.0).sum();
    let neu = valences.iter().filter(|&&v| v == 0.0).count() as f64;
    if sum > 0.0 {
        sum += bangs;
        pos_sum += bangs;
    } else if sum < 0.0 {
        sum -= bangs;
        neg_sum -= bangs;
    }
    let compound = (sum / (sum * sum + NORMALIZE_ALPHA).sqrt()).clamp(-1.0, 1.0);
    let total = pos_sum + neg_sum.abs() + neu;
    if total == 0.0 {
        return SentimentScores::NEUTRAL;
    }
    SentimentScores { positive: pos_sum / total, neutral: neu / total, negative: neg_sum.abs() / total, compound }
}

/// Sentiment scores followed by offensive and hate phrase ratios, in
/// [`SENTIMENT_NAMES`] order.
pub fn sentiment_features(sentence: &Sentence, resources: &Resources) -> Vec<f64> {
    let s = sentiment_scores(&sentence.text, resources);
    vec![
        s.positive,
        s.neutral,
        s.negative,
        s.compound,
        resources.offensive.ratio(&sentence.tokens),
        resources.hate.ratio(&sentence.tokens),
    ]
}
