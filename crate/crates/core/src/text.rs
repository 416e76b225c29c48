//! Input normalization shared by pattern parsing, the brain's preprocessing
//! step and the transcript analytics.
//!
//! Words are uppercased, punctuation is dropped and contractions are expanded
//! from the table in `data/contractions.txt`. Sentences split on `.`, `!` and
//! `?`.

use std::collections::HashMap;
use std::sync::OnceLock;

static CONTRACTIONS_SRC: &str = include_str!("../data/contractions.txt");

fn contractions() -> &'static HashMap<String, Vec<String>> {
    static TABLE: OnceLock<HashMap<String, Vec<String>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        CONTRACTIONS_SRC
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let (from, to) = l.split_once('=')?;
                Some((
                    from.trim().to_string(),
                    to.split_whitespace().map(str::to_string).collect(),
                ))
            })
            .collect()
    })
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}')
}

/// Splits raw text into sentences and normalizes each into uppercase word
/// tokens. Sentences that normalize to nothing are dropped.
pub fn sentences(raw: &str) -> Vec<Vec<String>> {
    split_sentences(raw)
        .into_iter()
        .map(|s| normalize_words(&s))
        .filter(|s| !s.is_empty())
        .collect()
}

fn split_sentences(raw: &str) -> Vec<String> {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        // a period between digits is a decimal point, not a sentence end
        let decimal = c == '.'
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
        if is_sentence_end(c) && !decimal {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out
}

/// Normalizes a fragment (no sentence splitting) into uppercase words.
pub fn normalize_words(text: &str) -> Vec<String> {
    let upper = text.to_uppercase();
    let chars: Vec<char> = upper.chars().collect();
    let mut cleaned = String::with_capacity(upper.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cleaned.push(c);
        } else if is_apostrophe(c) {
            cleaned.push('\'');
        } else if c == ','
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
        {
            // thousands separator: 10,000 is one token
        } else {
            cleaned.push(' ');
        }
    }

    let table = contractions();
    let mut words = Vec::new();
    for raw_token in cleaned.split_whitespace() {
        let token = raw_token.trim_matches('\'');
        if token.is_empty() {
            continue;
        }
        if let Some(expansion) = table.get(token) {
            words.extend(expansion.iter().cloned());
            continue;
        }
        let word: String = token.chars().filter(|&c| c != '\'').collect();
        if !word.is_empty() {
            words.push(word);
        }
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter()
            .map(|x| x.iter().map(|w| w.to_string()).collect())
            .collect()
    }

    #[test]
    fn punctuation_and_case() {
        assert_eq!(sentences("hello, Ryan!"), s(&[&["HELLO", "RYAN"]]));
    }

    #[test]
    fn contraction_expansion() {
        assert_eq!(
            sentences("I'm fine. Thanks."),
            s(&[&["I", "AM", "FINE"], &["THANKS"]])
        );
        assert_eq!(sentences("I don’t know"), s(&[&["I", "DO", "NOT", "KNOW"]]));
    }

    #[test]
    fn blank_input() {
        assert!(sentences("   ").is_empty());
        assert!(sentences("?!...").is_empty());
    }

    #[test]
    fn numbers_survive() {
        assert_eq!(
            sentences("You walked 10,000 steps."),
            s(&[&["YOU", "WALKED", "10000", "STEPS"]])
        );
        assert_eq!(sentences("about 3.5 hours"), s(&[&["ABOUT", "3", "5", "HOURS"]]));
    }

    #[test]
    fn unknown_apostrophe_words_are_joined() {
        assert_eq!(normalize_words("Rose's 'book'"), vec!["ROSES", "BOOK"]);
    }
}
