//! Object-centric game environments and their scripted teachers.
//!
//! Each environment is a single-owner state machine. The logical state seen
//! by rules holds only existence flags and positions; hidden dynamics (jump
//! phase, patrol direction, carried keys) live in the game struct and are
//! reseeded on every reset, so `(seed, actions)` determines a trajectory.

mod getout;
mod loot;
mod render;
mod threefish;

pub use render::render_ascii;

use crate::state::{LogicalState, MapExtent, Roster};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("action `{action}` is not in the action space of {env}")]
    UnknownAction { env: EnvId, action: String },
    #[error("action index {0} is out of range")]
    ActionIndex(usize),
    #[error("episode is over; reset before stepping")]
    EpisodeOver,
    #[error("unknown environment `{0}`")]
    UnknownEnv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvId {
    Getout,
    Loot,
    Threefish,
}

impl EnvId {
    pub const ALL: [EnvId; 3] = [EnvId::Getout, EnvId::Loot, EnvId::Threefish];

    pub fn as_str(&self) -> &'static str {
        match self {
            EnvId::Getout => "getout",
            EnvId::Loot => "loot",
            EnvId::Threefish => "threefish",
        }
    }

    pub fn action_space(&self) -> ActionSpace {
        let names: &[&str] = match self {
            EnvId::Getout => &["left", "right", "jump"],
            EnvId::Loot => &["left", "right", "up", "down"],
            EnvId::Threefish => &["left", "right", "up", "down", "noop"],
        };
        ActionSpace::new(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn roster(&self) -> Roster {
        match self {
            EnvId::Getout => getout::roster(),
            EnvId::Loot => loot::roster(),
            EnvId::Threefish => threefish::roster(),
        }
    }
}

impl fmt::Display for EnvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnvId {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EnvId::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| EnvError::UnknownEnv(s.to_string()))
    }
}

/// The part of a game that training and evaluation drive.
pub trait Episodic {
    fn reset_seeded(&mut self, seed: u64) -> LogicalState;
    fn step(&mut self, action: usize) -> Result<Transition, EnvError>;
}

impl Episodic for Env {
    fn reset_seeded(&mut self, seed: u64) -> LogicalState {
        Env::reset_seeded(self, seed)
    }

    fn step(&mut self, action: usize) -> Result<Transition, EnvError> {
        Env::step(self, action)
    }
}

/// Ordered action names; rule heads and buffer records use the index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpace {
    actions: Vec<String>,
}

impl ActionSpace {
    pub fn new(actions: Vec<String>) -> Self {
        Self { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.actions
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.actions.get(index).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub env_id: EnvId,
    pub map_width: f64,
    pub map_height: f64,
    pub seed: u64,
    pub step_limit: u32,
    /// Event name to reward. Missing events pay nothing.
    pub rewards: BTreeMap<String, f64>,
}

impl EnvConfig {
    /// Default map size, reward schedule and step limit for a game.
    pub fn new(env_id: EnvId) -> Self {
        let (w, h, rewards): (f64, f64, &[(&str, f64)]) = match env_id {
            EnvId::Getout => (
                40.0,
                8.0,
                &[("key", 5.0), ("door", 15.0), ("death", -20.0), ("step", -0.02)],
            ),
            EnvId::Loot => (10.0, 10.0, &[("lock", 3.0), ("step", -0.02)]),
            EnvId::Threefish => (10.0, 10.0, &[("eat", 1.0), ("eaten", -1.0), ("step", -0.01)]),
        };
        Self {
            env_id,
            map_width: w,
            map_height: h,
            seed: 0,
            step_limit: 300,
            rewards: rewards.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn reward(&self, event: &str) -> f64 {
        self.rewards.get(event).copied().unwrap_or(0.0)
    }

    pub fn map(&self) -> MapExtent {
        MapExtent::new(self.map_width, self.map_height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: LogicalState,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Clone)]
enum Game {
    Getout(getout::Getout),
    Loot(loot::Loot),
    Threefish(threefish::Threefish),
}

#[derive(Debug, Clone)]
pub struct Env {
    config: EnvConfig,
    actions: ActionSpace,
    game: Game,
    rng: ChaCha8Rng,
    state: LogicalState,
    done: bool,
}

impl Env {
    /// Creates the environment and resets it with `config.seed`.
    pub fn new(config: EnvConfig) -> Self {
        let game = match config.env_id {
            EnvId::Getout => Game::Getout(getout::Getout::default()),
            EnvId::Loot => Game::Loot(loot::Loot),
            EnvId::Threefish => Game::Threefish(threefish::Threefish::default()),
        };
        let mut env = Self {
            actions: config.env_id.action_space(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            state: LogicalState::new(Vec::new(), config.map()),
            config,
            game,
            done: false,
        };
        env.reset();
        env
    }

    pub fn id(&self) -> EnvId {
        self.config.env_id
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn roster(&self) -> Roster {
        self.config.env_id.roster()
    }

    pub fn state(&self) -> &LogicalState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Starts an episode from `config.seed`.
    pub fn reset(&mut self) -> LogicalState {
        self.reset_seeded(self.config.seed)
    }

    /// Starts an episode whose layout and dynamics are fixed by `seed`.
    pub fn reset_seeded(&mut self, seed: u64) -> LogicalState {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        let map = self.config.map();
        self.state = match &mut self.game {
            Game::Getout(g) => g.reset(map, &mut self.rng),
            Game::Loot(g) => g.reset(map, &mut self.rng),
            Game::Threefish(g) => g.reset(map, &mut self.rng),
        };
        self.done = false;
        self.state.clone()
    }

    pub fn step(&mut self, action: usize) -> Result<Transition, EnvError> {
        if action >= self.actions.len() {
            return Err(EnvError::ActionIndex(action));
        }
        if self.done {
            return Err(EnvError::EpisodeOver);
        }
        let (reward, mut done) = match &mut self.game {
            Game::Getout(g) => g.step(&mut self.state, action, &mut self.rng, &self.config),
            Game::Loot(g) => g.step(&mut self.state, action, &mut self.rng, &self.config),
            Game::Threefish(g) => g.step(&mut self.state, action, &mut self.rng, &self.config),
        };
        self.state.step_index += 1;
        if self.state.step_index >= self.config.step_limit {
            done = true;
        }
        self.done = done;
        Ok(Transition {
            state: self.state.clone(),
            reward,
            done,
        })
    }

    pub fn step_named(&mut self, action: &str) -> Result<Transition, EnvError> {
        let index = self
            .actions
            .index_of(action)
            .ok_or_else(|| EnvError::UnknownAction {
                env: self.id(),
                action: action.to_string(),
            })?;
        self.step(index)
    }
}

/// Scripted teacher: a deterministic near-optimal action for `state`.
///
/// * Getout: walk toward the key, then the door; jump when the enemy is
///   ahead within a close band.
/// * Loot: go for the lowest-numbered key still on the map, then its lock.
/// * Threefish: flee the predator when it is close, wait when it blocks the
///   way to the prey, otherwise chase the prey.
pub fn oracle_policy(env_id: EnvId, state: &LogicalState) -> usize {
    match env_id {
        EnvId::Getout => getout::oracle(state),
        EnvId::Loot => loot::oracle(state),
        EnvId::Threefish => threefish::oracle(state),
    }
}

/// Index of the move action toward `angle` for four-way games, by 90-degree
/// sectors centred on the axes: right, up, left, down.
fn sector_action(angle: f64) -> usize {
    const LEFT: usize = 0;
    const RIGHT: usize = 1;
    const UP: usize = 2;
    const DOWN: usize = 3;
    if !(45.0..315.0).contains(&angle) {
        RIGHT
    } else if angle < 135.0 {
        UP
    } else if angle < 225.0 {
        LEFT
    } else {
        DOWN
    }
}

fn direction_deg(from: (f64, f64), to: (f64, f64)) -> f64 {
    let deg = (to.1 - from.1).atan2(to.0 - from.0).to_degrees();
    let deg = if deg < 0.0 { deg + 360.0 } else { deg };
    if deg >= 360.0 {
        0.0
    } else {
        deg
    }
}
