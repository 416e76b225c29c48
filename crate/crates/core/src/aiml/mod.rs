//! Extended-AIML document model.
//!
//! The tag set is closed: `aiml`, `category`, `pattern`, `that`, `template`,
//! `star`, `get`, `set`, `srai`, `random`/`li`, and the robot extension
//! `robot`/`options`/`option`/`image`/`video`. Anything else is rejected at
//! parse time.

mod parse;
mod write;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use parse::{parse_aiml, Location, ParseError};
pub use write::to_canonical_xml;

use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternToken {
    Word(String),
    /// `*`: one or more tokens, lowest priority.
    Star,
    /// `_`: one or more tokens, highest priority.
    Underscore,
}

impl PatternToken {
    pub fn is_wildcard(&self) -> bool {
        !matches!(self, PatternToken::Word(_))
    }
}

/// A normalized, non-empty pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternExpr {
    tokens: Vec<PatternToken>,
}

impl PatternExpr {
    /// Normalizes pattern text the same way user input is normalized,
    /// keeping standalone `*` and `_` as wildcards. Returns `None` when
    /// nothing is left.
    pub fn parse(text: &str) -> Option<PatternExpr> {
        let mut tokens = Vec::new();
        let spaced = text.replace('*', " * ").replace('_', " _ ");
        for raw in spaced.split_whitespace() {
            match raw {
                "*" => tokens.push(PatternToken::Star),
                "_" => tokens.push(PatternToken::Underscore),
                other => tokens.extend(
                    text::normalize_words(other)
                        .into_iter()
                        .map(PatternToken::Word),
                ),
            }
        }
        PatternExpr::from_tokens(tokens)
    }

    pub fn from_tokens(tokens: Vec<PatternToken>) -> Option<PatternExpr> {
        if tokens.is_empty() {
            None
        } else {
            Some(PatternExpr { tokens })
        }
    }

    pub fn tokens(&self) -> &[PatternToken] {
        &self.tokens
    }

    pub fn wildcard_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_wildcard()).count()
    }

    /// True when the pattern is exactly these words with no wildcards.
    pub fn is_literal(&self, words: &[String]) -> bool {
        self.tokens.len() == words.len()
            && self
                .tokens
                .iter()
                .zip(words)
                .all(|(t, w)| matches!(t, PatternToken::Word(x) if x == w))
    }
}

impl fmt::Display for PatternExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match t {
                PatternToken::Word(w) => f.write_str(w)?,
                PatternToken::Star => f.write_str("*")?,
                PatternToken::Underscore => f.write_str("_")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    Text(String),
    /// 1-based wildcard capture from the owning category's pattern.
    Star(usize),
    Get(String),
    Set { name: String, value: Vec<Segment> },
    Srai(Vec<Segment>),
    Random(Vec<Vec<Segment>>),
}

/// Multimedia and answer-option payload carried alongside a response.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotDirective {
    pub options: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video: Option<String>,
}

impl RobotDirective {
    pub fn is_empty(&self) -> bool {
        self.options.is_empty() && self.image.is_none() && self.video.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub segments: Vec<Segment>,
    pub robot: Option<RobotDirective>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub pattern: PatternExpr,
    pub that: Option<PatternExpr>,
    pub template: Template,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AimlDocument {
    pub source_name: String,
    pub categories: Vec<Category>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediaCounts {
    pub images: usize,
    pub videos: usize,
    pub music: usize,
}

impl MediaCounts {
    pub fn total(&self) -> usize {
        self.images + self.videos + self.music
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub category_count: usize,
    pub robot_tag_count: usize,
    pub media: MediaCounts,
}

const AUDIO_EXTENSIONS: &[&str] = &["mp3", "wav", "ogg", "m4a", "flac", "aac"];

fn is_audio(reference: &str) -> bool {
    Path::new(reference)
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| AUDIO_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Structural counts over parsed documents. Media references with an audio
/// file extension count as music whichever tag carries them.
pub fn corpus_stats(docs: &[AimlDocument]) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for cat in docs.iter().flat_map(|d| &d.categories) {
        stats.category_count += 1;
        let Some(robot) = &cat.template.robot else {
            continue;
        };
        stats.robot_tag_count += 1;
        if let Some(image) = &robot.image {
            if is_audio(image) {
                stats.media.music += 1;
            } else {
                stats.media.images += 1;
            }
        }
        if let Some(video) = &robot.video {
            if is_audio(video) {
                stats.media.music += 1;
            } else {
                stats.media.videos += 1;
            }
        }
    }
    stats
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Loads every `session<N>.aiml` file in `dir`, ordered by session number.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<AimlDocument>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(n) = session_file_number(&name) {
            files.push((n, name, entry.path()));
        }
    }
    files.sort();
    files
        .into_iter()
        .map(|(_, name, path)| {
            let xml = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok(parse_aiml(&xml, &name)?)
        })
        .collect()
}

fn session_file_number(name: &str) -> Option<u32> {
    name.strip_prefix("session")?
        .strip_suffix(".aiml")?
        .parse()
        .ok()
}
