//! Dialogue engine for scripted, robot-initiative therapy sessions written in
//! extended AIML.
//!
//! * [`aiml`] parses the corpus (including the `robot` multimedia extension);
//! * [`matcher`] indexes categories in a graphmaster trie;
//! * [`brain`] runs sessions: context, slot filling, reprompts, operator
//!   takeover;
//! * [`persistence`] stores transcripts, session states and user profiles;
//! * [`analysis`] computes transcript statistics for evaluation.

pub mod aiml;
pub mod analysis;
pub mod brain;
pub mod matcher;
#[cfg(feature = "oracles")]
pub mod oracle;
pub mod persistence;
pub mod session;
pub mod text;

pub use aiml::{parse_aiml, AimlDocument, Category, CorpusStats, PatternExpr, PatternToken, RobotDirective};
pub use brain::{Brain, BrainConfig, BrainError, EngineConfig, Reply};
pub use matcher::{build_graph, CategoryId, MatchGraph, MatchResult};
pub use persistence::{FileStore, Speaker, Store, StoreError, TranscriptTurn};
pub use session::{RobotTurn, SessionState, SessionStatus, UserProfile};
