//! Teacher rollouts as state-action pairs, split per action into positive
//! and negative states.
//!
//! On disk a buffer is line-delimited JSON. The first line is a header:
//!
//! ```text
//! {"format":"nesy-buffer","version":1,"env":"getout","map":[40.0,8.0],"roster":[...],"actions":[...],"pairs":2400}
//! ```
//!
//! followed by exactly `pairs` records with a fixed field order: `action`
//! (index into `actions`), `step`, then `<name>.exists`, `<name>.x`,
//! `<name>.y` for every roster object in roster order.

use crate::env::{ActionSpace, Env, EnvId};
use crate::state::{LogicalState, MapExtent, ObjectRef, ObjectState, Roster};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use std::path::Path;
use thiserror::Error;

const FORMAT: &str = "nesy-buffer";
const VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum BufferError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("teacher never chose action `{0}`")]
    Collection(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

/// Options for teacher rollouts.
#[derive(Debug, Clone)]
pub struct CollectOptions {
    pub n_per_action: usize,
    /// Episode `i` is reset with `seed + i`; subsampling also uses `seed`.
    pub seed: u64,
    /// Rollouts stop once every action has `n_per_action` pairs or after
    /// this many episodes.
    pub max_episodes: usize,
}

impl CollectOptions {
    pub fn new(n_per_action: usize, seed: u64) -> Self {
        Self {
            n_per_action,
            seed,
            max_episodes: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameBuffer {
    env_id: EnvId,
    roster: Roster,
    actions: ActionSpace,
    map: MapExtent,
    pairs: Vec<(LogicalState, usize)>,
    positives: Vec<Vec<usize>>,
}

impl GameBuffer {
    pub fn new(
        env_id: EnvId,
        roster: Roster,
        actions: ActionSpace,
        map: MapExtent,
        pairs: Vec<(LogicalState, usize)>,
    ) -> Result<Self, BufferError> {
        let mut positives = vec![Vec::new(); actions.len()];
        for (i, (_, a)) in pairs.iter().enumerate() {
            positives
                .get_mut(*a)
                .ok_or_else(|| BufferError::UnknownAction(a.to_string()))?
                .push(i);
        }
        Ok(Self {
            env_id,
            roster,
            actions,
            map,
            pairs,
            positives,
        })
    }

    pub fn env_id(&self) -> EnvId {
        self.env_id
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn map(&self) -> MapExtent {
        self.map
    }

    pub fn pairs(&self) -> &[(LogicalState, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn count(&self, action: usize) -> usize {
        self.positives.get(action).map_or(0, Vec::len)
    }

    /// Pair indices whose action is `action` (S+) and the rest (S-).
    pub fn split_indices(&self, action: &str) -> Result<(Vec<usize>, Vec<usize>), BufferError> {
        let a = self
            .actions
            .index_of(action)
            .ok_or_else(|| BufferError::UnknownAction(action.to_string()))?;
        let plus = self.positives[a].clone();
        let minus = (0..self.pairs.len()).filter(|i| self.pairs[*i].1 != a).collect();
        Ok((plus, minus))
    }

    /// Positive and negative states of `action`.
    pub fn split(&self, action: &str) -> Result<(Vec<&LogicalState>, Vec<&LogicalState>), BufferError> {
        let (plus, minus) = self.split_indices(action)?;
        let pick = |ix: Vec<usize>| ix.into_iter().map(|i| &self.pairs[i].0).collect();
        Ok((pick(plus), pick(minus)))
    }

    pub fn to_jsonl(&self) -> String {
        let header = json!({
            "format": FORMAT,
            "version": VERSION,
            "env": self.env_id.as_str(),
            "map": [self.map.width, self.map.height],
            "roster": self.roster.objects().iter().map(|o| json!([o.name, o.kind])).collect::<Vec<_>>(),
            "actions": self.actions.names(),
            "pairs": self.pairs.len(),
        });
        let mut out = header.to_string();
        out.push('\n');
        for (state, action) in &self.pairs {
            let mut rec = Map::new();
            rec.insert("action".into(), json!(action));
            rec.insert("step".into(), json!(state.step_index));
            for (o, s) in self.roster.objects().iter().zip(&state.objects) {
                rec.insert(format!("{}.exists", o.name), json!(s.exists));
                rec.insert(format!("{}.x", o.name), json!(s.x));
                rec.insert(format!("{}.y", o.name), json!(s.y));
            }
            out.push_str(&Value::Object(rec).to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, BufferError> {
        let err = |line: usize, msg: String| BufferError::Parse { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let header: Value = serde_json::from_str(first).map_err(|e| err(1, e.to_string()))?;
        if header["format"] != FORMAT || header["version"] != VERSION {
            return Err(err(1, "not a nesy buffer file".into()));
        }
        let env_id: EnvId = header["env"]
            .as_str()
            .ok_or_else(|| err(1, "missing env".into()))?
            .parse()
            .map_err(|e: crate::env::EnvError| err(1, e.to_string()))?;
        let map = match header["map"].as_array().map(|m| (m.first().and_then(Value::as_f64), m.get(1).and_then(Value::as_f64))) {
            Some((Some(w), Some(h))) => MapExtent::new(w, h),
            _ => return Err(err(1, "bad map extent".into())),
        };
        let roster: Vec<ObjectRef> = header["roster"]
            .as_array()
            .ok_or_else(|| err(1, "missing roster".into()))?
            .iter()
            .map(|o| match (o[0].as_str(), o[1].as_str()) {
                (Some(n), Some(k)) => Ok(ObjectRef::new(n, k)),
                _ => Err(err(1, "bad roster entry".into())),
            })
            .collect::<Result<_, _>>()?;
        let actions: Vec<String> = header["actions"]
            .as_array()
            .ok_or_else(|| err(1, "missing actions".into()))?
            .iter()
            .map(|a| a.as_str().map(str::to_string).ok_or_else(|| err(1, "bad action".into())))
            .collect::<Result<_, _>>()?;
        let expected = header["pairs"]
            .as_u64()
            .ok_or_else(|| err(1, "missing pair count".into()))? as usize;

        let mut pairs = Vec::with_capacity(expected);
        let mut last_line = 1;
        for (n, line) in lines {
            last_line = n;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Map<String, Value> = serde_json::from_str(line).map_err(|e| err(n, e.to_string()))?;
            let field = |k: &str| rec.get(k).ok_or_else(|| err(n, format!("missing field `{k}`")));
            let action = field("action")?
                .as_u64()
                .filter(|a| (*a as usize) < actions.len())
                .ok_or_else(|| err(n, "bad action index".into()))? as usize;
            let step = field("step")?.as_u64().ok_or_else(|| err(n, "bad step".into()))? as u32;
            let mut objects = Vec::with_capacity(roster.len());
            for o in &roster {
                let exists = field(&format!("{}.exists", o.name))?
                    .as_bool()
                    .ok_or_else(|| err(n, format!("bad {}.exists", o.name)))?;
                let coord = |axis: &str| {
                    field(&format!("{}.{axis}", o.name))?
                        .as_f64()
                        .ok_or_else(|| err(n, format!("bad {}.{axis}", o.name)))
                };
                objects.push(ObjectState {
                    exists,
                    x: coord("x")?,
                    y: coord("y")?,
                });
            }
            let mut state = LogicalState::new(objects, map);
            state.step_index = step;
            pairs.push((state, action));
        }
        if pairs.len() != expected {
            return Err(err(
                last_line + 1,
                format!("truncated: header announces {expected} pairs, found {}", pairs.len()),
            ));
        }
        Self::new(env_id, Roster::new(roster), ActionSpace::new(actions), map, pairs)
    }

    pub fn save(&self, path: &Path) -> Result<(), BufferError> {
        std::fs::write(path, self.to_jsonl()).map_err(|source| BufferError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, BufferError> {
        let text = std::fs::read_to_string(path).map_err(|source| BufferError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_jsonl(&text)
    }
}

/// Rolls out `teacher` and keeps a seeded uniform subsample of
/// `n_per_action` pairs per action, in rollout order.
pub fn collect(
    env: &mut Env,
    teacher: impl Fn(&LogicalState) -> usize,
    options: &CollectOptions,
) -> Result<GameBuffer, BufferError> {
    assert!(options.n_per_action >= 1, "n_per_action must be positive");
    let actions = env.actions().clone();
    let mut pool: Vec<(LogicalState, usize)> = Vec::new();
    let mut per_action: Vec<Vec<usize>> = vec![Vec::new(); actions.len()];

    for episode in 0..options.max_episodes {
        if per_action.iter().all(|p| p.len() >= options.n_per_action) {
            break;
        }
        let mut state = env.reset_seeded(options.seed.wrapping_add(episode as u64));
        loop {
            let action = teacher(&state);
            per_action
                .get_mut(action)
                .ok_or_else(|| BufferError::UnknownAction(action.to_string()))?
                .push(pool.len());
            pool.push((state, action));
            let t = env
                .step(action)
                .expect("teacher actions are in range and episodes are reset");
            state = t.state;
            if t.done {
                break;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut keep: Vec<usize> = Vec::new();
    for (a, idx) in per_action.iter().enumerate() {
        let name = actions.name(a).unwrap_or_default();
        if idx.is_empty() {
            return Err(BufferError::Collection(name.to_string()));
        }
        if idx.len() < options.n_per_action {
            log::warn!(
                "teacher produced only {} pairs for `{name}` (wanted {})",
                idx.len(),
                options.n_per_action
            );
            keep.extend(idx);
        } else {
            keep.extend(sample(&mut rng, idx.len(), options.n_per_action).into_iter().map(|i| idx[i]));
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<(LogicalState, usize)>> = pool.into_iter().map(Some).collect();
    let pairs = keep.into_iter().filter_map(|i| slots[i].take()).collect();
    GameBuffer::new(env.id(), env.roster(), actions, env.config().map(), pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{oracle_policy, EnvConfig};

    fn tiny() -> GameBuffer {
        let map = MapExtent::new(10.0, 10.0);
        let s = |x: f64| LogicalState::new(vec![ObjectState::at(x, 1.0), ObjectState::absent(), ObjectState::at(2.0, 3.5)], map);
        GameBuffer::new(
            EnvId::Threefish,
            EnvId::Threefish.roster(),
            EnvId::Threefish.action_space(),
            map,
            vec![(s(1.0), 0), (s(2.0), 1), (s(3.0), 0)],
        )
        .unwrap()
    }

    #[test]
    fn split_partitions_pairs() {
        let b = tiny();
        let (plus, minus) = b.split("left").unwrap();
        assert_eq!(plus.iter().map(|s| s.objects[0].x).collect::<Vec<_>>(), vec![1.0, 3.0]);
        assert_eq!(minus.iter().map(|s| s.objects[0].x).collect::<Vec<_>>(), vec![2.0]);
        let total: usize = b.actions().names().iter().map(|a| b.split(a).unwrap().0.len()).sum();
        assert_eq!(total, b.len());
        assert!(matches!(b.split("fly"), Err(BufferError::UnknownAction(_))));
    }

    #[test]
    fn jsonl_round_trip() {
        let b = tiny();
        let text = b.to_jsonl();
        assert_eq!(GameBuffer::from_jsonl(&text).unwrap(), b);
        assert!(text.lines().nth(1).unwrap().starts_with(r#"{"action":0,"step":0,"player.exists":true,"player.x":1.0"#));
    }

    #[test]
    fn truncated_file_is_an_error() {
        let text = tiny().to_jsonl();
        let cut: Vec<&str> = text.lines().take(3).collect();
        match GameBuffer::from_jsonl(&cut.join("\n")) {
            Err(BufferError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let half = &text[..text.len() - 20];
        assert!(matches!(GameBuffer::from_jsonl(half), Err(BufferError::Parse { line: 4, .. })));
    }

    #[test]
    fn empty_buffer_round_trips() {
        let b = GameBuffer::new(
            EnvId::Loot,
            EnvId::Loot.roster(),
            EnvId::Loot.action_space(),
            MapExtent::new(10.0, 10.0),
            Vec::new(),
        )
        .unwrap();
        let text = b.to_jsonl();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(GameBuffer::from_jsonl(&text).unwrap(), b);
    }

    #[test]
    fn collect_takes_n_per_action() {
        let mut env = Env::new(EnvConfig::new(EnvId::Loot));
        let b = collect(&mut env, |s| oracle_policy(EnvId::Loot, s), &CollectOptions::new(1, 0)).unwrap();
        assert_eq!(b.len(), 4);
        for a in 0..4 {
            assert_eq!(b.count(a), 1);
        }
        let b = collect(&mut env, |s| oracle_policy(EnvId::Loot, s), &CollectOptions::new(50, 3)).unwrap();
        assert_eq!(b.len(), 200);
    }

    #[test]
    fn collect_fails_on_unused_action() {
        let mut env = Env::new(EnvConfig::new(EnvId::Getout));
        let mut opts = CollectOptions::new(5, 0);
        opts.max_episodes = 3;
        match collect(&mut env, |_| 1, &opts) {
            Err(BufferError::Collection(a)) => assert_eq!(a, "left"),
            other => panic!("{other:?}"),
        }
    }
}
