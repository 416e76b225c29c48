use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::aiml::RobotDirective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Active,
    Suspended,
    Completed,
}

/// What the robot says on one turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotTurn {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot: Option<RobotDirective>,
    pub escalate_to_woz: bool,
    pub session_complete: bool,
}

impl RobotTurn {
    pub fn say(text: impl Into<String>) -> Self {
        RobotTurn {
            text: text.into(),
            robot: None,
            escalate_to_woz: false,
            session_complete: false,
        }
    }

    pub fn options(&self) -> &[String] {
        self.robot.as_ref().map(|r| r.options.as_slice()).unwrap_or(&[])
    }
}

/// Per-session automaton frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub user_id: String,
    pub session_number: u32,
    /// Normalized last sentence of the robot's last automaton turn.
    pub last_that: Vec<String>,
    pub reprompt_count: u32,
    pub woz_active: bool,
    pub status: SessionStatus,
    /// Set by an escalation turn, cleared when an operator takes over or the
    /// automaton matches again.
    #[serde(default)]
    pub escalation_pending: bool,
    /// The turn re-emitted on resume.
    #[serde(default)]
    pub last_robot_turn: Option<RobotTurn>,
}

/// Explicit (name, place of birth) and implicit (mood) facts about a user.
/// Keys are lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    pub version: u64,
    pub explicit: BTreeMap<String, String>,
    pub implicit: BTreeMap<String, String>,
}

impl UserProfile {
    pub fn new(user_id: impl Into<String>) -> Self {
        UserProfile {
            user_id: user_id.into(),
            ..Default::default()
        }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        let key = name.to_lowercase();
        self.explicit
            .get(&key)
            .or_else(|| self.implicit.get(&key))
            .map(String::as_str)
    }

    /// Stores a predicate, moving it between the explicit and implicit maps
    /// if needed so each name lives in exactly one.
    pub fn set(&mut self, name: &str, value: impl Into<String>, implicit: bool) {
        let key = name.to_lowercase();
        let (into, other) = if implicit {
            (&mut self.implicit, &mut self.explicit)
        } else {
            (&mut self.explicit, &mut self.implicit)
        };
        other.remove(&key);
        into.insert(key, value.into());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_names_are_case_insensitive() {
        let mut p = UserProfile::new("u");
        p.set("Name", "ROSE", false);
        assert_eq!(p.get("NAME"), Some("ROSE"));
        p.set("name", "ANNA", true);
        assert_eq!(p.get("name"), Some("ANNA"));
        assert!(p.explicit.is_empty());
        assert_eq!(p.implicit.len(), 1);
    }
}
