use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::aiml::{RobotDirective, Segment, Template};
use crate::matcher::MatchGraph;
use crate::session::UserProfile;
use crate::text;

use super::BrainError;

const MAX_SRAI_DEPTH: usize = 32;

/// True for the reserved `SESSION <n> END` redirect that closes a session.
pub(crate) fn is_session_end(tokens: &[String]) -> bool {
    matches!(tokens, [s, n, e] if s == "SESSION" && e == "END" && n.parse::<u32>().is_ok())
}

/// Expands templates for one response sentence.
pub(crate) struct Expander<'a> {
    pub graph: &'a MatchGraph,
    pub profile: &'a mut UserProfile,
    pub implicit: &'a [String],
    pub rng: &'a mut ChaCha8Rng,
    /// That-context used for srai lookups.
    pub that: &'a [String],
    pub robot: Option<RobotDirective>,
    pub completed: bool,
    pub profile_changed: bool,
}

impl Expander<'_> {
    pub fn expand_template(&mut self, template: &Template, stars: &[String]) -> Result<String, BrainError> {
        self.template_at(template, stars, 0)
    }

    fn template_at(&mut self, template: &Template, stars: &[String], depth: usize) -> Result<String, BrainError> {
        let text = self.segments(&template.segments, stars, depth)?;
        // the outer template's directive overrides any picked up through srai
        if let Some(robot) = &template.robot {
            self.robot = Some(robot.clone());
        }
        Ok(text)
    }

    fn segments(&mut self, segments: &[Segment], stars: &[String], depth: usize) -> Result<String, BrainError> {
        let mut out = String::new();
        for segment in segments {
            match segment {
                Segment::Text(t) => out.push_str(t),
                Segment::Star(i) => {
                    if let Some(s) = stars.get(i - 1) {
                        out.push_str(s);
                    }
                }
                Segment::Get(name) => out.push_str(self.profile.get(name).unwrap_or("")),
                Segment::Set { name, value } => {
                    let value = self.segments(value, stars, depth)?;
                    let value = value.split_whitespace().collect::<Vec<_>>().join(" ");
                    let implicit = self.implicit.iter().any(|p| p.eq_ignore_ascii_case(name));
                    if self.profile.get(name) != Some(value.as_str()) {
                        self.profile.set(name, value.clone(), implicit);
                        self.profile_changed = true;
                    }
                    out.push_str(&value);
                }
                Segment::Srai(inner) => {
                    let request = self.segments(inner, stars, depth)?;
                    out.push_str(&self.srai(&request, depth)?);
                }
                Segment::Random(choices) => {
                    let pick = self.rng.random_range(0..choices.len());
                    let text = self.segments(&choices[pick], stars, depth)?;
                    out.push_str(&text);
                }
            }
        }
        Ok(out)
    }

    fn srai(&mut self, request: &str, depth: usize) -> Result<String, BrainError> {
        if depth >= MAX_SRAI_DEPTH {
            return Err(BrainError::SraiDepthExceeded);
        }
        let tokens = text::normalize_words(request);
        if is_session_end(&tokens) {
            self.completed = true;
        }
        let graph = self.graph;
        match graph.find(&tokens, self.that) {
            Some(m) => self.template_at(&m.category.template, &m.stars, depth + 1),
            None => Ok(String::new()),
        }
    }
}
