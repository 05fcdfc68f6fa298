use std::collections::{HashMap, HashSet};

use crate::lexicon::count_syllables;
use crate::text::{Sentence, TokenKind};

pub const READABILITY_NAMES: [&str; 12] = [
    "words",
    "avg_word_length",
    "avg_syllables_per_word",
    "word_entropy",
    "words_per_sentence",
    "flesch_kincaid_grade",
    "automated_readability_index",
    "coleman_liau",
    "flesch_reading_ease",
    "gunning_fog",
    "smog",
    "dale_chall",
];

// Published coefficients of each index.
const FK_WORDS: f64 = 0.39;
const FK_SYLLABLES: f64 = 11.8;
const FK_CONST: f64 = -15.59;
const ARI_CHARS: f64 = 4.71;
const ARI_WORDS: f64 = 0.5;
const ARI_CONST: f64 = -21.43;
const CL_LETTERS: f64 = 0.0588;
const CL_SENTENCES: f64 = -0.296;
const CL_CONST: f64 = -15.8;
const FRE_CONST: f64 = 206.835;
const FRE_WORDS: f64 = -1.015;
const FRE_SYLLABLES: f64 = -84.6;
const FOG_SCALE: f64 = 0.4;
const SMOG_SCALE: f64 = 1.0430;
const SMOG_CONST: f64 = 3.1291;
const DC_DIFFICULT: f64 = 0.1579;
const DC_WORDS: f64 = 0.0496;
const DC_ADJUST: f64 = 3.6365;

/// Shannon entropy (bits) of a frequency table.
pub fn entropy_bits<'a>(items: impl IntoIterator<Item = &'a str>) -> f64 {
    let mut freq: HashMap<&str, usize> = HashMap::new();
    let mut n = 0usize;
    for w in items {
        *freq.entry(w).or_default() += 1;
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    let mut counts: Vec<usize> = freq.into_values().collect();
    counts.sort_unstable();
    let h: f64 = counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Sentence-level readability statistics (one sentence, S = 1), in
/// [`READABILITY_NAMES`] order. All zeros without words.
pub fn readability_features(sentence: &Sentence, easy_words: &HashSet<String>) -> Vec<f64> {
    let words: Vec<&str> = sentence
        .tokens
        .iter()
        .filter(|t| t.is_wordlike())
        .map(|t| t.surface.as_str())
        .collect();
    if words.is_empty() {
        return vec![0.0; READABILITY_NAMES.len()];
    }
    let w = words.len() as f64;
    let s = 1.0;
    let syllables: Vec<usize> = words.iter().map(|x| count_syllables(x)).collect();
    let syl = syllables.iter().sum::<usize>() as f64;
    let letters = words.iter().map(|x| x.chars().filter(|c| c.is_alphanumeric()).count()).sum::<usize>() as f64;
    let polysyllables = syllables.iter().filter(|&&n| n >= 3).count() as f64;
    let difficult = sentence
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Word && !t.surface.starts_with('<') && !easy_words.contains(&t.surface))
        .count() as f64;
    let difficult_pct = 100.0 * difficult / w;

    let fk = FK_WORDS * (w / s) + FK_SYLLABLES * (syl / w) + FK_CONST;
    let ari = ARI_CHARS * (letters / w) + ARI_WORDS * (w / s) + ARI_CONST;
    let cl = CL_LETTERS * (100.0 * letters / w) + CL_SENTENCES * (100.0 * s / w) + CL_CONST;
    let fre = FRE_CONST + FRE_WORDS * (w / s) + FRE_SYLLABLES * (syl / w);
    let fog = FOG_SCALE * ((w / s) + 100.0 * (polysyllables / w));
    let smog = SMOG_SCALE * (polysyllables * 30.0 / s).sqrt() + SMOG_CONST;
    let mut dc = DC_DIFFICULT * difficult_pct + DC_WORDS * (w / s);
    if difficult_pct > 5.0 {
        dc += DC_ADJUST;
    }
    vec![
        w,
        letters / w,
        syl / w,
        entropy_bits(words.iter().copied()),
        w / s,
        fk,
        ari,
        cl,
        fre,
        fog,
        smog,
        dc,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Resources;

    fn feats(text: &str) -> Vec<f64> {
        readability_features(&Sentence::from_text(text), &Resources::bundled().dale_chall_easy)
    }

    #[test]
    fn word_count_and_entropy() {
        let f = feats("the cat sat on the mat");
        assert_eq!(f[0], 6.0);
        // {the: 2, cat, sat, on, mat: 1}
        let expected = -(2.0 / 6.0f64) * (2.0 / 6.0f64).log2() - 4.0 * (1.0 / 6.0f64) * (1.0 / 6.0f64).log2();
        assert!((f[3] - expected).abs() < 1e-12);
        assert!((f[3] - 2.252).abs() < 1e-3);
    }

    #[test]
    fn repeated_word_has_zero_entropy() {
        assert_eq!(feats("go go go")[3], 0.0);
    }

    #[test]
    fn flesch_matches_hand_application() {
        // beautiful(3) people(2: eo, e is after l) make(1) music(2) = 8 syllables, 4 words
        let f = feats("Beautiful people make music.");
        assert_eq!(f[2], 8.0 / 4.0);
        let hand = 206.835 - 1.015 * 4.0 - 84.6 * (8.0 / 4.0);
        assert!((f[8] - hand).abs() < 1e-12);
        let kincaid = 0.39 * 4.0 + 11.8 * 2.0 - 15.59;
        assert!((f[5] - kincaid).abs() < 1e-12);
    }

    #[test]
    fn no_words_all_zero() {
        assert!(feats("").iter().all(|&v| v == 0.0));
        assert!(feats("!!!").iter().all(|&v| v == 0.0));
    }
}
