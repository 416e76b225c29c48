#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use dialogue_core::aiml::load_corpus_dir;
use dialogue_core::brain::SteppingClock;
use dialogue_core::{Brain, BrainConfig, FileStore, MatchGraph};

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/demo")
}

pub fn demo_graph() -> Arc<MatchGraph> {
    Arc::new(MatchGraph::build(&load_corpus_dir(&demo_dir()).unwrap()))
}

pub fn brain_at(data: &Path, config: BrainConfig) -> Brain {
    brain_with_graph(demo_graph(), data, config)
}

pub fn brain_with_graph(graph: Arc<MatchGraph>, data: &Path, config: BrainConfig) -> Brain {
    Brain::new(
        graph,
        Arc::new(FileStore::open(data).unwrap()),
        config,
        Arc::new(SteppingClock::new(1_700_000_000_000, 250)),
    )
    .unwrap()
}

/// User inputs that walk session 1 of the demo corpus to completion.
pub const SESSION_ONE: [&str; 8] = [
    "My name is Rose",
    "I was born in Lisbon",
    "12",
    "yes",
    "No",
    "Reading",
    "yes!",
    "9",
];
