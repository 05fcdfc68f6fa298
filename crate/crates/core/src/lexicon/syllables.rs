/// Vowel-group syllable estimate.
///
/// Counts maximal runs of `aeiouy`, drops a silent final `e` that forms its
/// own group (except after `l`, as in "table"), and never returns less than 1.
pub fn count_syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut prev_vowel = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = letters.len();
    if n >= 2 && letters[n - 1] == 'e' && groups > 1 {
        let before = letters[n - 2];
        if !is_vowel(before) && before != 'l' {
            groups -= 1;
        }
    }
    groups.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counted_words() {
        assert_eq!(count_syllables("cat"), 1);
        assert_eq!(count_syllables("beautiful"), 3);
        assert_eq!(count_syllables("e"), 1);
        assert_eq!(count_syllables("table"), 2);
        assert_eq!(count_syllables("make"), 1);
        assert_eq!(count_syllables("the"), 1);
        assert_eq!(count_syllables("see"), 1);
        assert_eq!(count_syllables("conversation"), 4);
        assert_eq!(count_syllables("42"), 1);
    }
}
