use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Runtime policy knobs for the brain.
#[derive(Debug, Clone, PartialEq)]
pub struct BrainConfig {
    /// Rephrased re-asks allowed before handing the session to an operator.
    pub reprompt_limit: u32,
    /// What the robot says while it waits for an operator.
    pub holding_phrase: String,
    pub rng_seed: u64,
    /// Predicate names recorded as implicit user information.
    pub implicit_predicates: Vec<String>,
}

impl Default for BrainConfig {
    fn default() -> Self {
        BrainConfig {
            reprompt_limit: 2,
            holding_phrase: "Let me think about that for a moment.".to_string(),
            rng_seed: 0,
            implicit_predicates: vec!["mood".to_string()],
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing config {path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: toml::de::Error,
    },
}

/// Config file contents. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub reprompt_limit: u32,
    pub holding_phrase: String,
    pub rng_seed: u64,
    pub corpus_dir: PathBuf,
    pub storage_path: PathBuf,
    pub implicit_predicates: Vec<String>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let brain = BrainConfig::default();
        EngineConfig {
            reprompt_limit: brain.reprompt_limit,
            holding_phrase: brain.holding_phrase,
            rng_seed: brain.rng_seed,
            corpus_dir: PathBuf::from("corpus/demo"),
            storage_path: PathBuf::from("data"),
            implicit_predicates: brain.implicit_predicates,
        }
    }
}

impl EngineConfig {
    pub fn from_toml(text: &str, base_dir: &Path, path_label: &str) -> Result<Self, ConfigError> {
        let mut config: EngineConfig = toml::from_str(text).map_err(|source| ConfigError::Toml {
            path: path_label.to_string(),
            source,
        })?;
        config.corpus_dir = base_dir.join(&config.corpus_dir);
        config.storage_path = base_dir.join(&config.storage_path);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: label.clone(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base, &label)
    }

    pub fn brain_config(&self) -> BrainConfig {
        BrainConfig {
            reprompt_limit: self.reprompt_limit,
            holding_phrase: self.holding_phrase.clone(),
            rng_seed: self.rng_seed,
            implicit_predicates: self.implicit_predicates.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_resolves_paths() {
        let cfg = EngineConfig::from_toml(
            "reprompt_limit = 3\nholding_phrase = \"One moment.\"\nrng_seed = 7\n\
             corpus_dir = \"corpus\"\nstorage_path = \"/var/data\"\n",
            Path::new("/etc/dlg"),
            "t",
        )
        .unwrap();
        assert_eq!(cfg.reprompt_limit, 3);
        assert_eq!(cfg.holding_phrase, "One moment.");
        assert_eq!(cfg.rng_seed, 7);
        assert_eq!(cfg.corpus_dir, PathBuf::from("/etc/dlg/corpus"));
        assert_eq!(cfg.storage_path, PathBuf::from("/var/data"));
        assert_eq!(cfg.implicit_predicates, vec!["mood"]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(EngineConfig::from_toml("reprompt = 1", Path::new("."), "t").is_err());
    }
}
