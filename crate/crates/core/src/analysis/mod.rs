//! Transcript analytics: per-session response length, scaled sentence
//! sentiment, linear trends, face-scale deltas and survey reliability.

mod regression;
mod reliability;
mod sentiment;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use regression::{fit_line, RegressionFit};
pub use reliability::cronbach_alpha;
pub use sentiment::{LexiconScorer, Polarity, SentimentLabel, SentimentScorer};

use crate::persistence::{Speaker, Store, StoreError, TranscriptTurn};
use crate::text;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("transcript has no user turns")]
    NoUserTurns,
    #[error("transcript has no user sentences")]
    NoUserSentences,
    #[error("need at least two distinct x values")]
    DegenerateX,
    #[error("face-scale score {0} outside 1..=20")]
    OutOfRange(i32),
    #[error("total score variance is zero")]
    DegenerateTotal,
    #[error("need at least two respondents")]
    TooFewRespondents,
    #[error("need at least two items")]
    TooFewItems,
    #[error("rows have different lengths")]
    RaggedMatrix,
    #[error("lexicon line {line}: {reason}")]
    BadLexicon { line: usize, reason: String },
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn user_turns(transcript: &[TranscriptTurn]) -> impl Iterator<Item = &TranscriptTurn> {
    transcript.iter().filter(|t| t.speaker == Speaker::User)
}

/// Mean number of word tokens per user turn.
pub fn avg_token_length(transcript: &[TranscriptTurn]) -> Result<f64, AnalysisError> {
    let counts: Vec<usize> = user_turns(transcript)
        .map(|t| text::sentences(&t.text).iter().map(Vec::len).sum())
        .filter(|&n| n > 0)
        .collect();
    if counts.is_empty() {
        return Err(AnalysisError::NoUserTurns);
    }
    Ok(counts.iter().sum::<usize>() as f64 / counts.len() as f64)
}

/// Fractions of positive, negative and neutral sentences; they sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentShares {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

/// Collapses labels to three classes and scales the counts to sum to 1.
pub fn sentiment_shares(labels: &[SentimentLabel]) -> Option<SentimentShares> {
    if labels.is_empty() {
        return None;
    }
    let (mut pos, mut neg, mut neu) = (0usize, 0usize, 0usize);
    for label in labels {
        match label.collapse() {
            Polarity::Positive => pos += 1,
            Polarity::Negative => neg += 1,
            Polarity::Neutral => neu += 1,
        }
    }
    let total = labels.len() as f64;
    Some(SentimentShares {
        positive: pos as f64 / total,
        negative: neg as f64 / total,
        neutral: neu as f64 / total,
    })
}

/// Labels every sentence the user spoke and scales the class counts.
pub fn score_sentiments(
    transcript: &[TranscriptTurn],
    scorer: &dyn SentimentScorer,
) -> Result<SentimentShares, AnalysisError> {
    let labels: Vec<SentimentLabel> = user_turns(transcript)
        .flat_map(|t| text::sentences(&t.text))
        .map(|s| scorer.label(&s))
        .collect();
    sentiment_shares(&labels).ok_or(AnalysisError::NoUserSentences)
}

/// Face-scale readings (1 happiest .. 20) around one session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceScore {
    pub session: u32,
    pub before: i32,
    pub after: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDelta {
    pub session: u32,
    /// before - after; positive means mood improved.
    pub delta: i32,
}

pub fn face_deltas(scores: &[FaceScore]) -> Result<Vec<FaceDelta>, AnalysisError> {
    scores
        .iter()
        .map(|s| {
            for v in [s.before, s.after] {
                if !(1..=20).contains(&v) {
                    return Err(AnalysisError::OutOfRange(v));
                }
            }
            Ok(FaceDelta {
                session: s.session,
                delta: s.before - s.after,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub session_number: u32,
    pub avg_token_length: f64,
    pub scaled_sentiments: SentimentShares,
    pub face_delta: Option<i32>,
}

pub fn session_stats(
    session_number: u32,
    transcript: &[TranscriptTurn],
    scorer: &dyn SentimentScorer,
    face_delta: Option<i32>,
) -> Result<SessionStats, AnalysisError> {
    Ok(SessionStats {
        session_number,
        avg_token_length: avg_token_length(transcript)?,
        scaled_sentiments: score_sentiments(transcript, scorer)?,
        face_delta,
    })
}

/// One stored session transcript with its owner.
#[derive(Debug, Clone)]
pub struct SessionTranscript {
    pub user_id: String,
    pub session_number: u32,
    pub session_id: String,
    pub turns: Vec<TranscriptTurn>,
}

/// Reads every stored session, grouped by user and ordered by session
/// number. Repeated runs of one session number are merged in id order.
pub fn collect_transcripts(store: &dyn Store) -> Result<Vec<SessionTranscript>, AnalysisError> {
    let mut grouped: BTreeMap<(String, u32), SessionTranscript> = BTreeMap::new();
    for state in store.list_states()? {
        let turns = match store.load_transcript(&state.session_id) {
            Ok(t) => t,
            Err(StoreError::UnknownSession(_)) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        grouped
            .entry((state.user_id.clone(), state.session_number))
            .and_modify(|s| s.turns.extend(turns.iter().cloned()))
            .or_insert_with(|| SessionTranscript {
                user_id: state.user_id.clone(),
                session_number: state.session_number,
                session_id: state.session_id.clone(),
                turns,
            });
    }
    Ok(grouped.into_values().collect())
}
