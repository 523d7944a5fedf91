//! Service configuration: one TOML file plus `POSTEDIT_*` environment
//! overrides.
//!
//! ```toml
//! bind = "127.0.0.1:8080"
//! data_dir = "data"
//! seed = 0
//! timeout_ms = 10000
//!
//! [suggest]
//! m = 5
//! beam = 5
//! normalize = false     # rank by mean log-probability per token
//!
//! [providers]            # unset slots fall back to the built-in stubs
//! mt = "http://localhost:9001"
//! qe = "http://localhost:9001"
//! scorer = "http://localhost:9001"
//! aligner = "http://localhost:9001"
//! segmenter = "http://localhost:9001"
//!
//! [stubs]                # data for the built-in stubs; bundled fixtures by default
//! lexicon = "lexicon.tsv"
//! corpus = "corpus.tsv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value {value:?} for {var}")]
    Env { var: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    /// Event logs and snapshots; `None` keeps sessions in memory only.
    pub data_dir: Option<PathBuf>,
    pub seed: u64,
    pub timeout_ms: u64,
    pub suggest: SuggestSection,
    pub providers: Providers,
    pub stubs: Stubs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuggestSection {
    pub m: usize,
    pub beam: usize,
    pub normalize: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Providers {
    pub mt: Option<String>,
    pub qe: Option<String>,
    pub scorer: Option<String>,
    pub aligner: Option<String>,
    pub segmenter: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stubs {
    pub lexicon: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            data_dir: None,
            seed: 0,
            timeout_ms: 10_000,
            suggest: SuggestSection::default(),
            providers: Providers::default(),
            stubs: Stubs::default(),
        }
    }
}

impl Default for SuggestSection {
    fn default() -> Self {
        Self { m: 5, beam: 5, normalize: false }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    /// Applies `POSTEDIT_*` overrides read through `var`. Empty provider
    /// values switch that slot back to its stub.
    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(name: &str, value: String) -> Result<T, ConfigError> {
            value.trim().parse().map_err(|_| ConfigError::Env { var: name.into(), value })
        }
        let url = |v: String| if v.trim().is_empty() { None } else { Some(v) };

        if let Some(v) = var("POSTEDIT_BIND") {
            self.bind = v;
        }
        if let Some(v) = var("POSTEDIT_DATA_DIR") {
            self.data_dir = if v.is_empty() { None } else { Some(v.into()) };
        }
        if let Some(v) = var("POSTEDIT_SEED") {
            self.seed = num("POSTEDIT_SEED", v)?;
        }
        if let Some(v) = var("POSTEDIT_TIMEOUT_MS") {
            self.timeout_ms = num("POSTEDIT_TIMEOUT_MS", v)?;
        }
        if let Some(v) = var("POSTEDIT_SUGGEST_M") {
            self.suggest.m = num("POSTEDIT_SUGGEST_M", v)?;
        }
        if let Some(v) = var("POSTEDIT_SUGGEST_BEAM") {
            self.suggest.beam = num("POSTEDIT_SUGGEST_BEAM", v)?;
        }
        let slots = [
            ("POSTEDIT_MT_URL", &mut self.providers.mt),
            ("POSTEDIT_QE_URL", &mut self.providers.qe),
            ("POSTEDIT_SCORER_URL", &mut self.providers.scorer),
            ("POSTEDIT_ALIGNER_URL", &mut self.providers.aligner),
            ("POSTEDIT_SEGMENTER_URL", &mut self.providers.segmenter),
        ];
        for (name, slot) in slots {
            if let Some(v) = var(name) {
                *slot = url(v);
            }
        }
        if let Some(v) = var("POSTEDIT_LEXICON") {
            self.stubs.lexicon = Some(v.into());
        }
        if let Some(v) = var("POSTEDIT_CORPUS") {
            self.stubs.corpus = Some(v.into());
        }
        Ok(())
    }

    /// File (if given) then the process environment.
    pub fn resolve(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn file_then_env() {
        let mut cfg = Config::from_toml(
            "seed = 3\n[suggest]\nbeam = 3\n[providers]\nqe = \"http://qe:1\"\nmt = \"http://mt:1\"\n",
        )
        .unwrap();
        assert_eq!(cfg.suggest, SuggestSection { m: 5, beam: 3, normalize: false });
        let env: HashMap<&str, &str> = [("POSTEDIT_SEED", "9"), ("POSTEDIT_QE_URL", ""), ("POSTEDIT_SCORER_URL", "http://s:2")].into();
        cfg.apply_env(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.providers.qe, None);
        assert_eq!(cfg.providers.mt.as_deref(), Some("http://mt:1"));
        assert_eq!(cfg.providers.scorer.as_deref(), Some("http://s:2"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        assert!(Config::from_toml("sede = 1").is_err());
        let mut cfg = Config::default();
        assert!(cfg.apply_env(|k| (k == "POSTEDIT_SEED").then(|| "x".to_string())).is_err());
    }
}
