//! Graphmaster-style trie over category patterns.
//!
//! Each pattern path ends in a leaf that holds a second trie keyed by the
//! categories' `that` patterns, plus the categories without one. Lookup is a
//! depth-first search that tries, at every node, `_` first, then the exact
//! word, then `*`. Wildcards consume one or more tokens, shortest first. The
//! first leaf that yields an eligible category wins:
//!
//! * a category whose `that` pattern matches the that-context beats one with
//!   no `that` pattern;
//! * `that` patterns are searched with the same priority rules;
//! * identical (pattern, that) pairs resolve to the earliest in file order.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aiml::{AimlDocument, Category, PatternToken};

/// `<source_name>#<index>` of a category within its document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CategoryId(pub String);

impl CategoryId {
    pub fn new(source_name: &str, index: usize) -> Self {
        CategoryId(format!("{source_name}#{index}"))
    }
}

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Span = (usize, usize);

#[derive(Debug)]
struct Node<V> {
    words: HashMap<String, Node<V>>,
    underscore: Option<Box<Node<V>>>,
    star: Option<Box<Node<V>>>,
    value: Option<V>,
}

impl<V> Default for Node<V> {
    fn default() -> Self {
        Node {
            words: HashMap::new(),
            underscore: None,
            star: None,
            value: None,
        }
    }
}

impl<V: Default> Node<V> {
    fn slot(&mut self, tokens: &[PatternToken]) -> &mut V {
        let mut node = self;
        for token in tokens {
            node = match token {
                PatternToken::Word(w) => node.words.entry(w.clone()).or_default(),
                PatternToken::Underscore => node.underscore.get_or_insert_with(Default::default),
                PatternToken::Star => node.star.get_or_insert_with(Default::default),
            };
        }
        node.value.get_or_insert_with(V::default)
    }
}

impl<V> Node<V> {
    fn search<'a, R>(
        &'a self,
        input: &[String],
        pos: usize,
        spans: &mut Vec<Span>,
        accept: &mut dyn FnMut(&'a V, &[Span]) -> Option<R>,
    ) -> Option<R> {
        if pos == input.len() {
            return self.value.as_ref().and_then(|v| accept(v, spans));
        }
        if let Some(child) = &self.underscore {
            if let Some(r) = child.search_wildcard(input, pos, spans, accept) {
                return Some(r);
            }
        }
        if let Some(child) = self.words.get(&input[pos]) {
            if let Some(r) = child.search(input, pos + 1, spans, accept) {
                return Some(r);
            }
        }
        if let Some(child) = &self.star {
            if let Some(r) = child.search_wildcard(input, pos, spans, accept) {
                return Some(r);
            }
        }
        None
    }

    fn search_wildcard<'a, R>(
        &'a self,
        input: &[String],
        pos: usize,
        spans: &mut Vec<Span>,
        accept: &mut dyn FnMut(&'a V, &[Span]) -> Option<R>,
    ) -> Option<R> {
        for end in pos + 1..=input.len() {
            spans.push((pos, end));
            let found = self.search(input, end, spans, accept);
            spans.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

#[derive(Debug, Default)]
struct Leaf {
    /// Category indices per that-pattern, in file order.
    with_that: Node<Vec<usize>>,
    without_that: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GraphEntry {
    pub id: CategoryId,
    pub category: Category,
}

/// Immutable match index over every category of a corpus.
#[derive(Debug, Default)]
pub struct MatchGraph {
    root: Node<Leaf>,
    entries: Vec<GraphEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<'g> {
    /// File-order rank of the category across the whole corpus.
    pub rank: usize,
    pub id: &'g CategoryId,
    pub category: &'g Category,
    pub stars: Vec<String>,
    pub that_stars: Vec<String>,
}

fn captures(input: &[String], spans: &[Span]) -> Vec<String> {
    spans.iter().map(|&(s, e)| input[s..e].join(" ")).collect()
}

impl MatchGraph {
    pub fn build(docs: &[AimlDocument]) -> MatchGraph {
        let mut graph = MatchGraph::default();
        for doc in docs {
            for (i, cat) in doc.categories.iter().enumerate() {
                let rank = graph.entries.len();
                let leaf = graph.root.slot(cat.pattern.tokens());
                match &cat.that {
                    Some(that) => leaf.with_that.slot(that.tokens()).push(rank),
                    None => leaf.without_that.push(rank),
                }
                graph.entries.push(GraphEntry {
                    id: CategoryId::new(&doc.source_name, i),
                    category: cat.clone(),
                });
            }
        }
        graph
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[GraphEntry] {
        &self.entries
    }

    /// Finds the best category for `input` given the that-context. An empty
    /// `that` means no robot question has been asked yet, so only categories
    /// without a that-pattern are eligible.
    pub fn find(&self, input: &[String], that: &[String]) -> Option<MatchResult<'_>> {
        if input.is_empty() {
            return None;
        }
        let mut spans = Vec::new();
        let mut accept = |leaf: &Leaf, pattern_spans: &[Span]| -> Option<(usize, Vec<Span>, Vec<Span>)> {
            if !that.is_empty() {
                let mut that_spans = Vec::new();
                let mut first = |ranks: &Vec<usize>, s: &[Span]| ranks.first().map(|&r| (r, s.to_vec()));
                if let Some((rank, ts)) = leaf.with_that.search(that, 0, &mut that_spans, &mut first) {
                    return Some((rank, pattern_spans.to_vec(), ts));
                }
            }
            leaf.without_that
                .first()
                .map(|&rank| (rank, pattern_spans.to_vec(), Vec::new()))
        };
        let (rank, pattern_spans, that_spans) = self.root.search(input, 0, &mut spans, &mut accept)?;
        let entry = &self.entries[rank];
        Some(MatchResult {
            rank,
            id: &entry.id,
            category: &entry.category,
            stars: captures(input, &pattern_spans),
            that_stars: captures(that, &that_spans),
        })
    }
}

/// Builds the match graph for a corpus.
pub fn build_graph(docs: &[AimlDocument]) -> MatchGraph {
    MatchGraph::build(docs)
}
