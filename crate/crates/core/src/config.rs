//! Pipeline configuration: a TOML file whose sections override per-game
//! defaults, then command-line flags override the file.

use crate::env::{EnvConfig, EnvId};
use crate::invent::InventionConfig;
use crate::policy::{Baseline, Optimizer, TrainConfig};
use crate::search::SearchConfig;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub env: Option<EnvId>,
    pub seed: Option<u64>,
    pub game: GameSection,
    pub buffer: BufferSection,
    pub invention: InventionSection,
    pub search: SearchSection,
    pub train: TrainSection,
    pub eval: EvalSection,
    pub paths: PathsSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameSection {
    pub map_width: Option<f64>,
    pub map_height: Option<f64>,
    pub step_limit: Option<u32>,
    /// Merged into the game's reward schedule.
    pub rewards: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BufferSection {
    pub n_per_action: Option<usize>,
    pub max_episodes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InventionSection {
    pub dist_bins: Option<usize>,
    pub dir_bins: Option<usize>,
    pub min_ness: Option<f64>,
    pub top_k_ness: Option<usize>,
    pub t_s: Option<f64>,
    pub top_k_suff: Option<usize>,
    pub full_pairs: Option<bool>,
    pub agent: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub beam_width: Option<usize>,
    pub max_body_len: Option<usize>,
    pub rules_per_action: Option<usize>,
    pub min_rule_ness: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub episodes: Option<usize>,
    pub max_steps: Option<usize>,
    pub gamma: Option<f64>,
    pub learning_rate: Option<f64>,
    pub baseline_rate: Option<f64>,
    pub smoothing_window: Option<usize>,
    pub log_every: Option<usize>,
    pub optimizer: Option<Optimizer>,
    pub normalize_advantages: Option<bool>,
    pub baseline: Option<Baseline>,
    pub epochs: Option<usize>,
    pub clip: Option<f64>,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub episodes: Option<usize>,
    pub seed: Option<u64>,
}

/// Artifact locations. Relative file paths are joined to `dir`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub dir: Option<PathBuf>,
    pub buffer: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub language: Option<PathBuf>,
    pub policy: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub invented: Option<PathBuf>,
    pub rewards: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSettings {
    pub episodes: usize,
    /// Episode `i` is reset with `seed + i`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Paths {
    pub dir: PathBuf,
    pub buffer: PathBuf,
    pub rules: PathBuf,
    pub language: PathBuf,
    pub policy: PathBuf,
    pub candidates: PathBuf,
    pub trace: PathBuf,
    pub invented: PathBuf,
    pub rewards: PathBuf,
}

impl Paths {
    /// `<env>_<artifact>` names inside `dir`.
    pub fn in_dir(dir: impl Into<PathBuf>, env: EnvId) -> Self {
        let dir = dir.into();
        let f = |name: &str| dir.join(format!("{env}_{name}"));
        Self {
            buffer: f("buffer.jsonl"),
            rules: f("rules.pl"),
            language: f("language.pl"),
            policy: f("policy.pl"),
            candidates: f("candidates.csv"),
            trace: f("trace.jsonl"),
            invented: f("invented.txt"),
            rewards: f("rewards.csv"),
            dir,
        }
    }

    fn apply(&mut self, s: &PathsSection) {
        let dir = self.dir.clone();
        let set = |slot: &mut PathBuf, v: &Option<PathBuf>| {
            if let Some(p) = v {
                *slot = dir.join(p);
            }
        };
        set(&mut self.buffer, &s.buffer);
        set(&mut self.rules, &s.rules);
        set(&mut self.language, &s.language);
        set(&mut self.policy, &s.policy);
        set(&mut self.candidates, &s.candidates);
        set(&mut self.trace, &s.trace);
        set(&mut self.invented, &s.invented);
        set(&mut self.rewards, &s.rewards);
    }
}

/// Fully resolved settings for every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub env: EnvConfig,
    /// Seeds collection, weight initialisation and training.
    pub seed: u64,
    pub n_per_action: usize,
    pub max_collect_episodes: usize,
    pub invention: InventionConfig,
    pub search: SearchConfig,
    pub train: TrainConfig,
    pub temperature: f64,
    pub eval: EvalSettings,
    pub paths: Paths,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub env: Option<EnvId>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub n_per_action: Option<usize>,
    pub eval_episodes: Option<usize>,
    pub train_episodes: Option<usize>,
}

impl PipelineConfig {
    /// Defaults for a game: 800 pairs per action, distance and direction
    /// bins per game, and training settings tuned per game.
    pub fn defaults(env: EnvId) -> Self {
        let mut invention = InventionConfig::default();
        let mut train = TrainConfig {
            episodes: 100_000,
            max_steps: 50_000,
            gamma: 0.95,
            learning_rate: 0.01,
            epochs: 4,
            ..TrainConfig::default()
        };
        match env {
            EnvId::Getout => train.learning_rate = 0.03,
            EnvId::Loot | EnvId::Threefish => {
                invention.dist_bins = 0;
                invention.dir_bins = if env == EnvId::Loot { 8 } else { 10 };
            }
        }
        let search = SearchConfig {
            rules_per_action: 25,
            ..SearchConfig::default()
        };
        Self {
            env: EnvConfig::new(env),
            seed: 0,
            n_per_action: 800,
            max_collect_episodes: 20_000,
            invention,
            search,
            train,
            temperature: 1.0,
            eval: EvalSettings {
                episodes: 100,
                seed: 1_000_000,
            },
            paths: Paths::in_dir(".", env),
        }
    }

    /// Game defaults, then the file, then the flags.
    pub fn resolve(file: &ConfigFile, flags: &Overrides) -> Result<Self, ConfigError> {
        let env = flags.env.or(file.env).unwrap_or(EnvId::Getout);
        let mut c = Self::defaults(env);

        let g = &file.game;
        set(&mut c.env.map_width, g.map_width);
        set(&mut c.env.map_height, g.map_height);
        set(&mut c.env.step_limit, g.step_limit);
        c.env.rewards.extend(g.rewards.iter().map(|(k, v)| (k.clone(), *v)));

        set(&mut c.n_per_action, file.buffer.n_per_action);
        set(&mut c.max_collect_episodes, file.buffer.max_episodes);

        let i = &file.invention;
        set(&mut c.invention.dist_bins, i.dist_bins);
        set(&mut c.invention.dir_bins, i.dir_bins);
        set(&mut c.invention.min_ness, i.min_ness);
        set(&mut c.invention.top_k_ness, i.top_k_ness);
        set(&mut c.invention.t_s, i.t_s);
        set(&mut c.invention.top_k_suff, i.top_k_suff);
        set(&mut c.invention.full_pairs, i.full_pairs);
        set(&mut c.invention.agent, i.agent.clone());

        let s = &file.search;
        set(&mut c.search.beam_width, s.beam_width);
        set(&mut c.search.max_body_len, s.max_body_len);
        set(&mut c.search.rules_per_action, s.rules_per_action);
        set(&mut c.search.min_rule_ness, s.min_rule_ness);

        let t = &file.train;
        set(&mut c.train.episodes, t.episodes);
        set(&mut c.train.max_steps, t.max_steps);
        set(&mut c.train.gamma, t.gamma);
        set(&mut c.train.learning_rate, t.learning_rate);
        set(&mut c.train.baseline_rate, t.baseline_rate);
        set(&mut c.train.smoothing_window, t.smoothing_window);
        set(&mut c.train.log_every, t.log_every);
        set(&mut c.train.optimizer, t.optimizer);
        set(&mut c.train.normalize_advantages, t.normalize_advantages);
        set(&mut c.train.baseline, t.baseline);
        set(&mut c.train.epochs, t.epochs);
        set(&mut c.train.clip, t.clip);
        set(&mut c.temperature, t.temperature);

        set(&mut c.eval.episodes, file.eval.episodes);
        set(&mut c.eval.seed, file.eval.seed);

        let dir = flags
            .out
            .clone()
            .or_else(|| file.paths.dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        c.paths = Paths::in_dir(dir, env);
        c.paths.apply(&file.paths);

        c.set_seed(flags.seed.or(file.seed).unwrap_or(0));
        set(&mut c.n_per_action, flags.n_per_action);
        set(&mut c.eval.episodes, flags.eval_episodes);
        set(&mut c.train.episodes, flags.train_episodes);
        c.validate()?;
        Ok(c)
    }

    pub fn env_id(&self) -> EnvId {
        self.env.env_id
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.env.seed = seed;
        self.train.seed = seed;
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.env.map_width > 0.0 && self.env.map_height > 0.0) {
            return bad("map size must be positive");
        }
        if self.n_per_action == 0 {
            return bad("n_per_action must be positive");
        }
        if self.invention.dist_bins == 0 && self.invention.dir_bins == 0 {
            return bad("at least one of dist_bins and dir_bins must be positive");
        }
        if !(0.0..=1.0).contains(&self.invention.min_ness) || !(0.0..=1.0).contains(&self.invention.t_s) {
            return bad("min_ness and t_s must lie in [0, 1]");
        }
        if self.search.beam_width == 0 || self.search.rules_per_action == 0 {
            return bad("beam_width and rules_per_action must be positive");
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be positive");
        }
        if !(0.0..=1.0).contains(&self.train.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(self.train.learning_rate >= 0.0 && self.train.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if self.train.epochs == 0 {
            return bad("epochs must be positive");
        }
        Ok(())
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
