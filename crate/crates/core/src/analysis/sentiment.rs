use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::text;

/// Five-class sentence sentiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    VeryNegative,
    Negative,
    Neutral,
    Positive,
    VeryPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 5] = [
        SentimentLabel::VeryNegative,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
        SentimentLabel::Positive,
        SentimentLabel::VeryPositive,
    ];

    /// Folds the rare extreme classes into their neighbours.
    pub fn collapse(self) -> Polarity {
        match self {
            SentimentLabel::VeryNegative | SentimentLabel::Negative => Polarity::Negative,
            SentimentLabel::Neutral => Polarity::Neutral,
            SentimentLabel::Positive | SentimentLabel::VeryPositive => Polarity::Positive,
        }
    }

    /// Label for a summed valence: <=-4, -3..-1, 0, 1..3, >=4.
    pub fn from_valence(sum: i64) -> SentimentLabel {
        match sum {
            i64::MIN..=-4 => SentimentLabel::VeryNegative,
            -3..=-1 => SentimentLabel::Negative,
            0 => SentimentLabel::Neutral,
            1..=3 => SentimentLabel::Positive,
            _ => SentimentLabel::VeryPositive,
        }
    }
}

/// Maps one normalized sentence to a sentiment label.
pub trait SentimentScorer {
    fn label(&self, tokens: &[String]) -> SentimentLabel;
}

/// Sums integer word valences from a lexicon file.
#[derive(Debug, Clone, Default)]
pub struct LexiconScorer {
    valence: HashMap<String, i64>,
}

impl LexiconScorer {
    /// Lexicon format: one `word<whitespace>integer` per line; blank lines
    /// and `#` comments are skipped. Words are normalized like user input
    /// and must come out as a single token.
    pub fn parse(source: &str) -> Result<LexiconScorer, AnalysisError> {
        let mut valence = HashMap::new();
        for (i, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| AnalysisError::BadLexicon {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (word, value) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| bad("expected `word value`"))?;
            let value: i64 = value.trim().parse().map_err(|_| bad("valence is not an integer"))?;
            let mut words = text::normalize_words(word.trim());
            if words.len() != 1 {
                return Err(bad("entry must be a single word"));
            }
            if valence.insert(words.remove(0), value).is_some() {
                return Err(bad("duplicate entry"));
            }
        }
        Ok(LexiconScorer { valence })
    }

    pub fn load(path: &Path) -> Result<LexiconScorer, AnalysisError> {
        let source = std::fs::read_to_string(path).map_err(|e| AnalysisError::BadLexicon {
            line: 0,
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&source)
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }
}

impl SentimentScorer for LexiconScorer {
    fn label(&self, tokens: &[String]) -> SentimentLabel {
        let sum = tokens
            .iter()
            .map(|t| self.valence.get(&t.to_uppercase()).copied().unwrap_or(0))
            .sum();
        SentimentLabel::from_valence(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        text::normalize_words(s)
    }

    #[test]
    fn lexicon_thresholds() {
        let lex = LexiconScorer::parse("great 2\nfeel 0\nterrible -3\nawful -3\n# c\n\n").unwrap();
        assert_eq!(lex.len(), 4);
        assert_eq!(lex.label(&toks("i feel great")), SentimentLabel::Positive);
        assert_eq!(lex.label(&[]), SentimentLabel::Neutral);
        assert_eq!(lex.label(&toks("terrible awful")), SentimentLabel::VeryNegative);
        assert_eq!(lex.label(&toks("Great, great!")), SentimentLabel::VeryPositive);
    }

    #[test]
    fn valence_bands() {
        let expect = [
            (-9, SentimentLabel::VeryNegative),
            (-4, SentimentLabel::VeryNegative),
            (-3, SentimentLabel::Negative),
            (-1, SentimentLabel::Negative),
            (0, SentimentLabel::Neutral),
            (1, SentimentLabel::Positive),
            (3, SentimentLabel::Positive),
            (4, SentimentLabel::VeryPositive),
        ];
        for (v, l) in expect {
            assert_eq!(SentimentLabel::from_valence(v), l, "{v}");
        }
    }

    #[test]
    fn bad_lexicons() {
        for src in ["good", "good x", "good 1\ngood 2", "two words 1"] {
            assert!(
                matches!(LexiconScorer::parse(src), Err(AnalysisError::BadLexicon { .. })),
                "{src}"
            );
        }
    }
}
