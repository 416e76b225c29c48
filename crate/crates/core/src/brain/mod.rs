//! Session control: robot-initiative dialogue over the match graph with
//! context tracking, slot filling, reprompts and operator (WOZ) escalation.
//!
//! Reserved inputs the engine injects into the matcher:
//!
//! * `SESSION <n> START` opens session `n`;
//! * `REPROMPT <last question>` asks the open question again after a miss;
//! * a template that redirects to `SESSION <n> END` completes the session.

mod clock;
mod config;
mod postprocess;
mod template;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard, PoisonError};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use clock::{Clock, SteppingClock, SystemClock};
pub use config::{BrainConfig, ConfigError, EngineConfig};
pub use postprocess::postprocess;

use crate::aiml::{load_corpus_dir, CorpusError, RobotDirective};
use crate::matcher::MatchGraph;
use crate::persistence::{validate_id, FileStore, Speaker, Store, StoreError, TranscriptTurn};
use crate::session::{RobotTurn, SessionState, SessionStatus, UserProfile};
use crate::text;
use template::Expander;

#[derive(Debug, thiserror::Error)]
pub enum BrainError {
    #[error("input has no words")]
    EmptyInput,
    #[error("user {0} already has an open session")]
    SessionAlreadyActive(String),
    #[error("no entry category for session {0}")]
    NoEntryCategory(u32),
    #[error("session {0} is not active")]
    SessionNotActive(String),
    #[error("an operator controls session {0}")]
    WozHasControl(String),
    #[error("no operator controls session {0}")]
    WozNotActive(String),
    #[error("user {0} has no suspended session")]
    NothingToResume(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("invalid identifier {0:?}")]
    InvalidId(String),
    #[error("srai recursion too deep")]
    SraiDepthExceeded,
    #[error(transparent)]
    Store(StoreError),
}

impl From<StoreError> for BrainError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownSession(s) => BrainError::UnknownSession(s),
            StoreError::InvalidId(s) => BrainError::InvalidId(s),
            other => BrainError::Store(other),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OpenError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Brain(#[from] BrainError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Splits raw user text into normalized sentences.
pub fn preprocess(raw: &str) -> Result<Vec<Vec<String>>, BrainError> {
    let sentences = text::sentences(raw);
    if sentences.is_empty() {
        Err(BrainError::EmptyInput)
    } else {
        Ok(sentences)
    }
}

/// A robot turn together with where it landed in the transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub session_id: String,
    pub turn_index: u64,
    pub turn: RobotTurn,
    /// Matched category ids, one per matched sentence.
    pub category_ids: Vec<String>,
}

struct Slot {
    state: SessionState,
    profile: UserProfile,
    next_turn: u64,
}

#[derive(Default)]
struct Registry {
    sessions: HashMap<String, Arc<Mutex<Slot>>>,
    by_user: HashMap<String, Vec<String>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}

fn last_sentence(text: &str) -> Option<Vec<String>> {
    text::sentences(text).pop()
}

/// Result of running the automaton over one user input, before persistence.
struct Outcome {
    turn: RobotTurn,
    category_ids: Vec<String>,
    /// New that-context; `None` leaves it unchanged.
    that: Option<Vec<String>>,
    matched: bool,
    profile_changed: bool,
}

pub struct Brain {
    graph: Arc<MatchGraph>,
    store: Arc<dyn Store>,
    config: BrainConfig,
    clock: Arc<dyn Clock>,
    registry: Mutex<Registry>,
}

impl Brain {
    /// Builds a brain over existing storage. Sessions that were active when
    /// the previous process stopped come back suspended.
    pub fn new(
        graph: Arc<MatchGraph>,
        store: Arc<dyn Store>,
        config: BrainConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<Brain, BrainError> {
        let mut registry = Registry::default();
        for mut state in store.list_states()? {
            if state.status == SessionStatus::Active {
                state.status = SessionStatus::Suspended;
                state.woz_active = false;
                store.save_state(&state)?;
            }
            let next_turn = match store.load_transcript(&state.session_id) {
                Ok(turns) => turns.len() as u64,
                Err(StoreError::UnknownSession(_)) => 0,
                Err(e) => return Err(e.into()),
            };
            registry
                .by_user
                .entry(state.user_id.clone())
                .or_default()
                .push(state.session_id.clone());
            let profile = UserProfile::new(state.user_id.clone());
            registry.sessions.insert(
                state.session_id.clone(),
                Arc::new(Mutex::new(Slot {
                    state,
                    profile,
                    next_turn,
                })),
            );
        }
        Ok(Brain {
            graph,
            store,
            config,
            clock,
            registry: Mutex::new(registry),
        })
    }

    /// Loads the corpus and file store named by a config file.
    pub fn open(config: &EngineConfig) -> Result<Brain, OpenError> {
        Self::open_with(config, &config.storage_path, Arc::new(SystemClock))
    }

    pub fn open_with(config: &EngineConfig, data_dir: &Path, clock: Arc<dyn Clock>) -> Result<Brain, OpenError> {
        let docs = load_corpus_dir(&config.corpus_dir)?;
        let graph = Arc::new(MatchGraph::build(&docs));
        let store: Arc<dyn Store> = Arc::new(FileStore::open(data_dir)?);
        Ok(Brain::new(graph, store, config.brain_config(), clock)?)
    }

    pub fn config(&self) -> &BrainConfig {
        &self.config
    }

    pub fn graph(&self) -> &MatchGraph {
        &self.graph
    }

    pub fn store(&self) -> &dyn Store {
        self.store.as_ref()
    }

    fn slot(&self, session_id: &str) -> Result<Arc<Mutex<Slot>>, BrainError> {
        lock(&self.registry)
            .sessions
            .get(session_id)
            .cloned()
            .ok_or_else(|| BrainError::UnknownSession(session_id.to_string()))
    }

    fn rng_for(&self, session_id: &str, turn_index: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.config.rng_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&turn_index.to_le_bytes());
        seed[16..20].copy_from_slice(&crc32fast::hash(session_id.as_bytes()).to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }

    fn append(&self, slot: &mut Slot, speaker: Speaker, text: &str, woz: bool, ids: &[String]) -> Result<u64, BrainError> {
        let index = slot.next_turn;
        self.store.append_turn(&TranscriptTurn {
            session_id: slot.state.session_id.clone(),
            turn_index: index,
            speaker,
            text: text.to_string(),
            woz,
            matched_category_id: (!ids.is_empty()).then(|| ids.join(",")),
            timestamp: self.clock.now_millis(),
        })?;
        slot.next_turn += 1;
        Ok(index)
    }

    fn persist_profile(&self, slot: &mut Slot) -> Result<(), BrainError> {
        slot.profile.version = self.store.save_profile(&slot.profile)?;
        Ok(())
    }

    pub fn state(&self, session_id: &str) -> Result<SessionState, BrainError> {
        let slot = self.slot(session_id)?;
        let state = lock(&slot).state.clone();
        Ok(state)
    }

    pub fn sessions(&self) -> Vec<SessionState> {
        let slots: Vec<_> = lock(&self.registry).sessions.values().cloned().collect();
        let mut states: Vec<_> = slots.iter().map(|s| lock(s).state.clone()).collect();
        states.sort_by(|a, b| a.session_id.cmp(&b.session_id));
        states
    }

    /// Transcript turns from index `from` onward.
    pub fn transcript(&self, session_id: &str, from: u64) -> Result<Vec<TranscriptTurn>, BrainError> {
        self.slot(session_id)?;
        let turns = match self.store.load_transcript(session_id) {
            Ok(t) => t,
            Err(StoreError::UnknownSession(_)) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(turns.into_iter().filter(|t| t.turn_index >= from).collect())
    }

    pub fn profile(&self, user_id: &str) -> Result<Option<UserProfile>, BrainError> {
        Ok(self.store.load_profile(user_id)?)
    }

    /// Opens session `session_number` for a user and returns the robot's
    /// opening turn.
    pub fn start_session(&self, user_id: &str, session_number: u32) -> Result<(SessionState, Reply), BrainError> {
        validate_id(user_id)?;
        let entry: Vec<String> = vec!["SESSION".into(), session_number.to_string(), "START".into()];
        let found = self
            .graph
            .find(&entry, &[])
            .filter(|m| m.category.pattern.is_literal(&entry))
            .ok_or(BrainError::NoEntryCategory(session_number))?;

        let mut registry = lock(&self.registry);
        let existing = registry.by_user.get(user_id).cloned().unwrap_or_default();
        for id in &existing {
            let status = lock(&registry.sessions[id]).state.status;
            if status != SessionStatus::Completed {
                return Err(BrainError::SessionAlreadyActive(user_id.to_string()));
            }
        }
        let base = format!("{user_id}-s{session_number}");
        let mut session_id = base.clone();
        let mut attempt = 1;
        while registry.sessions.contains_key(&session_id) {
            attempt += 1;
            session_id = format!("{base}-{attempt}");
        }
        validate_id(&session_id)?;

        let profile = self
            .store
            .load_profile(user_id)?
            .unwrap_or_else(|| UserProfile::new(user_id));
        let mut slot = Slot {
            state: SessionState {
                session_id: session_id.clone(),
                user_id: user_id.to_string(),
                session_number,
                last_that: Vec::new(),
                reprompt_count: 0,
                woz_active: false,
                status: SessionStatus::Active,
                escalation_pending: false,
                last_robot_turn: None,
            },
            profile,
            next_turn: 0,
        };

        let mut rng = self.rng_for(&session_id, 0);
        let mut expander = Expander {
            graph: &self.graph,
            profile: &mut slot.profile,
            implicit: &self.config.implicit_predicates,
            rng: &mut rng,
            that: &[],
            robot: None,
            completed: false,
            profile_changed: false,
        };
        let text = postprocess(&expander.expand_template(&found.category.template, &found.stars)?);
        let (robot, completed, changed) = (expander.robot, expander.completed, expander.profile_changed);
        let turn = RobotTurn {
            text,
            robot,
            escalate_to_woz: false,
            session_complete: completed,
        };
        let ids = vec![found.id.0.clone()];
        let index = self.append(&mut slot, Speaker::Robot, &turn.text, false, &ids)?;
        if changed {
            self.persist_profile(&mut slot)?;
        }
        slot.state.last_that = last_sentence(&turn.text).unwrap_or_default();
        slot.state.last_robot_turn = Some(turn.clone());
        if completed {
            slot.state.status = SessionStatus::Completed;
        }
        self.store.save_state(&slot.state)?;

        let state = slot.state.clone();
        registry.by_user.entry(user_id.to_string()).or_default().push(session_id.clone());
        registry.sessions.insert(session_id.clone(), Arc::new(Mutex::new(slot)));
        Ok((
            state,
            Reply {
                session_id,
                turn_index: index,
                turn,
                category_ids: ids,
            },
        ))
    }

    /// Feeds one user utterance through the automaton.
    pub fn respond(&self, session_id: &str, raw_user_text: &str) -> Result<Reply, BrainError> {
        let slot = self.slot(session_id)?;
        let mut slot = lock(&slot);
        if slot.state.status != SessionStatus::Active {
            return Err(BrainError::SessionNotActive(session_id.to_string()));
        }
        if slot.state.woz_active {
            return Err(BrainError::WozHasControl(session_id.to_string()));
        }
        let input = self.option_hit(&slot.state, raw_user_text).unwrap_or(raw_user_text);
        let sentences = preprocess(input)?;

        let robot_index = slot.next_turn + 1;
        let mut profile = slot.profile.clone();
        let outcome = self.run_automaton(&slot.state, &mut profile, &sentences, robot_index)?;

        self.append(&mut slot, Speaker::User, raw_user_text.trim(), false, &[])?;
        let index = self.append(&mut slot, Speaker::Robot, &outcome.turn.text, false, &outcome.category_ids)?;
        if outcome.profile_changed {
            slot.profile = profile;
            self.persist_profile(&mut slot)?;
        }
        let state = &mut slot.state;
        if let Some(that) = outcome.that {
            state.last_that = that;
        }
        if outcome.matched {
            state.reprompt_count = 0;
            state.escalation_pending = false;
        }
        if outcome.turn.escalate_to_woz {
            state.escalation_pending = true;
        } else {
            state.last_robot_turn = Some(outcome.turn.clone());
        }
        if outcome.turn.session_complete {
            state.status = SessionStatus::Completed;
        }
        if !outcome.matched && !outcome.turn.escalate_to_woz {
            state.reprompt_count += 1;
        }
        self.store.save_state(&slot.state)?;
        Ok(Reply {
            session_id: session_id.to_string(),
            turn_index: index,
            turn: outcome.turn,
            category_ids: outcome.category_ids,
        })
    }

    /// Returns the option text when the input is one of the previous turn's
    /// answer options, compared case-insensitively without end punctuation.
    fn option_hit<'a>(&self, state: &'a SessionState, raw: &str) -> Option<&'a str> {
        let clean = |s: &str| {
            s.trim()
                .trim_end_matches(['.', '!', '?', ','])
                .trim()
                .to_lowercase()
        };
        let said = clean(raw);
        state
            .last_robot_turn
            .as_ref()?
            .options()
            .iter()
            .find(|o| clean(o) == said)
            .map(String::as_str)
    }

    fn run_automaton(
        &self,
        state: &SessionState,
        profile: &mut UserProfile,
        sentences: &[Vec<String>],
        robot_index: u64,
    ) -> Result<Outcome, BrainError> {
        let mut rng = self.rng_for(&state.session_id, robot_index);
        let mut that = state.last_that.clone();
        let mut pieces = Vec::new();
        let mut ids = Vec::new();
        let mut robot = None;
        let mut completed = false;
        let mut changed = false;

        for sentence in sentences {
            let Some(m) = self.graph.find(sentence, &that) else {
                continue;
            };
            let mut expander = Expander {
                graph: &self.graph,
                profile: &mut *profile,
                implicit: &self.config.implicit_predicates,
                rng: &mut rng,
                that: &that,
                robot: None,
                completed: false,
                profile_changed: false,
            };
            let text = postprocess(&expander.expand_template(&m.category.template, &m.stars)?);
            if expander.robot.is_some() {
                robot = expander.robot;
            }
            completed |= expander.completed;
            changed |= expander.profile_changed;
            ids.push(m.id.0.clone());
            if let Some(last) = last_sentence(&text) {
                that = last;
            }
            if !text.is_empty() {
                pieces.push(text);
            }
        }

        if !ids.is_empty() {
            return Ok(Outcome {
                turn: RobotTurn {
                    text: pieces.join(" "),
                    robot,
                    escalate_to_woz: false,
                    session_complete: completed,
                },
                category_ids: ids,
                that: Some(that),
                matched: true,
                profile_changed: changed,
            });
        }

        if state.reprompt_count >= self.config.reprompt_limit {
            return Ok(Outcome {
                turn: RobotTurn {
                    text: self.config.holding_phrase.clone(),
                    robot: None,
                    escalate_to_woz: true,
                    session_complete: false,
                },
                category_ids: Vec::new(),
                that: None,
                matched: false,
                profile_changed: false,
            });
        }
        self.reprompt(state, profile, &mut rng)
    }

    /// Re-asks the open question through its `REPROMPT` variant, or repeats
    /// the last turn when the corpus has none. The that-context is kept so
    /// answers to the original question still match.
    fn reprompt(&self, state: &SessionState, profile: &mut UserProfile, rng: &mut ChaCha8Rng) -> Result<Outcome, BrainError> {
        let previous = state.last_robot_turn.clone().unwrap_or_else(|| RobotTurn::say(""));
        let mut request = vec!["REPROMPT".to_string()];
        request.extend(state.last_that.iter().cloned());
        let found = self.graph.find(&request, &state.last_that);
        let Some(m) = found else {
            return Ok(Outcome {
                turn: RobotTurn {
                    escalate_to_woz: false,
                    session_complete: false,
                    ..previous
                },
                category_ids: Vec::new(),
                that: None,
                matched: false,
                profile_changed: false,
            });
        };
        let mut expander = Expander {
            graph: &self.graph,
            profile,
            implicit: &self.config.implicit_predicates,
            rng,
            that: &state.last_that,
            robot: None,
            completed: false,
            profile_changed: false,
        };
        let text = postprocess(&expander.expand_template(&m.category.template, &m.stars)?);
        let robot: Option<RobotDirective> = expander.robot.or(previous.robot);
        Ok(Outcome {
            turn: RobotTurn {
                text,
                robot,
                escalate_to_woz: false,
                session_complete: false,
            },
            category_ids: vec![m.id.0.clone()],
            that: None,
            matched: false,
            profile_changed: expander.profile_changed,
        })
    }

    /// Hands the session to an operator.
    pub fn woz_take(&self, session_id: &str) -> Result<SessionState, BrainError> {
        let slot = self.slot(session_id)?;
        let mut slot = lock(&slot);
        if slot.state.status != SessionStatus::Active {
            return Err(BrainError::SessionNotActive(session_id.to_string()));
        }
        slot.state.woz_active = true;
        slot.state.escalation_pending = false;
        self.store.save_state(&slot.state)?;
        Ok(slot.state.clone())
    }

    /// Returns control to the automaton at the pre-takeover context.
    pub fn woz_release(&self, session_id: &str) -> Result<SessionState, BrainError> {
        let slot = self.slot(session_id)?;
        let mut slot = lock(&slot);
        if !slot.state.woz_active {
            return Err(BrainError::WozNotActive(session_id.to_string()));
        }
        slot.state.woz_active = false;
        slot.state.reprompt_count = 0;
        self.store.save_state(&slot.state)?;
        Ok(slot.state.clone())
    }

    /// Speaks operator text through the robot. The that-context is left
    /// untouched.
    pub fn woz_override(&self, session_id: &str, operator_text: &str) -> Result<Reply, BrainError> {
        let slot = self.slot(session_id)?;
        let mut slot = lock(&slot);
        if slot.state.status != SessionStatus::Active {
            return Err(BrainError::SessionNotActive(session_id.to_string()));
        }
        if !slot.state.woz_active {
            return Err(BrainError::WozNotActive(session_id.to_string()));
        }
        let text = postprocess(operator_text);
        if text.is_empty() {
            return Err(BrainError::EmptyInput);
        }
        let index = self.append(&mut slot, Speaker::Robot, &text, true, &[])?;
        Ok(Reply {
            session_id: session_id.to_string(),
            turn_index: index,
            turn: RobotTurn::say(text),
            category_ids: Vec::new(),
        })
    }

    /// Marks an active session as interrupted.
    pub fn suspend(&self, session_id: &str) -> Result<SessionState, BrainError> {
        let slot = self.slot(session_id)?;
        let mut slot = lock(&slot);
        if slot.state.status != SessionStatus::Active {
            return Err(BrainError::SessionNotActive(session_id.to_string()));
        }
        slot.state.status = SessionStatus::Suspended;
        slot.state.woz_active = false;
        self.store.save_state(&slot.state)?;
        Ok(slot.state.clone())
    }

    /// Reloads a user's suspended session from storage and re-asks the last
    /// open question.
    pub fn resume_session(&self, user_id: &str) -> Result<(SessionState, Reply), BrainError> {
        validate_id(user_id)?;
        let slot = {
            let registry = lock(&self.registry);
            registry
                .by_user
                .get(user_id)
                .into_iter()
                .flatten()
                .map(|id| registry.sessions[id].clone())
                .find(|s| lock(s).state.status == SessionStatus::Suspended)
                .ok_or_else(|| BrainError::NothingToResume(user_id.to_string()))?
        };
        let mut slot = lock(&slot);
        if slot.state.status != SessionStatus::Suspended {
            return Err(BrainError::NothingToResume(user_id.to_string()));
        }
        let session_id = slot.state.session_id.clone();
        let mut state = self.store.load_state(&session_id)?;
        slot.profile = self
            .store
            .load_profile(user_id)?
            .unwrap_or_else(|| UserProfile::new(user_id));
        let turn = state
            .last_robot_turn
            .clone()
            .ok_or_else(|| BrainError::NothingToResume(user_id.to_string()))?;
        state.status = SessionStatus::Active;
        state.woz_active = false;
        slot.state = state;
        let index = self.append(&mut slot, Speaker::Robot, &turn.text, false, &[])?;
        self.store.save_state(&slot.state)?;
        Ok((
            slot.state.clone(),
            Reply {
                session_id,
                turn_index: index,
                turn,
                category_ids: Vec::new(),
            },
        ))
    }

    /// Session id a user is currently in (active or suspended), if any.
    pub fn open_session_for(&self, user_id: &str) -> Option<String> {
        let registry = lock(&self.registry);
        registry
            .by_user
            .get(user_id)?
            .iter()
            .find(|id| lock(&registry.sessions[*id]).state.status != SessionStatus::Completed)
            .cloned()
    }
}
