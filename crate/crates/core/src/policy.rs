//! Weighted rule policies: action scores are weighted sums of rule
//! activations, probabilities a tempered softmax over the scores. Weights are
//! learned with REINFORCE against a per-timestep running baseline.

use crate::env::{EnvError, Episodic};
use crate::fol::{eval_body, parse_rule_file, write_rule_file, Clause, FolError, Language, Predicate};
use crate::state::LogicalState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("weight {index} became non-finite after episode {episode}")]
    Divergence { index: usize, episode: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("policy file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sample,
    Greedy,
}

/// Softmax of `scores / temperature`, shifted by the maximum for stability.
pub fn softmax(scores: &[f64], temperature: f64) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| ((s - max) / temperature).exp()).collect();
    let z: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / z).collect()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPolicy {
    language: Language,
    rules: Vec<Clause>,
    weights: Vec<f64>,
    temperature: f64,
}

impl WeightedPolicy {
    /// Adds `Action(X):-.` for every action without a rule and draws
    /// weights uniformly from `[-0.1, 0.1)`.
    pub fn new(language: Language, mut rules: Vec<Clause>, seed: u64) -> Result<Self, FolError> {
        for action in language.actions() {
            if !rules.iter().any(|r| r.action() == action) {
                rules.push(Clause::init(language.action_atom(action)?)?);
            }
        }
        rules.sort_by_key(|r| r.action_index());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = rules.iter().map(|_| rng.gen_range(-0.1..0.1)).collect();
        Ok(Self {
            language,
            rules,
            weights,
            temperature: 1.0,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), self.rules.len(), "one weight per rule");
        self.weights = weights;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        assert!(temperature > 0.0, "temperature must be positive");
        self.temperature = temperature;
        self
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn rules(&self) -> &[Clause] {
        &self.rules
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn n_actions(&self) -> usize {
        self.language.actions().len()
    }

    /// Body valuation of every rule.
    pub fn activations(&self, state: &LogicalState) -> Result<Vec<f64>, FolError> {
        self.rules.iter().map(|r| eval_body(r.body(), state)).collect()
    }

    fn scores_from(&self, acts: &[f64]) -> Vec<f64> {
        let mut scores = vec![0.0; self.n_actions()];
        for ((r, w), a) in self.rules.iter().zip(&self.weights).zip(acts) {
            scores[r.action_index()] += w * a;
        }
        scores
    }

    pub fn action_scores(&self, state: &LogicalState) -> Result<Vec<f64>, FolError> {
        Ok(self.scores_from(&self.activations(state)?))
    }

    pub fn probabilities(&self, state: &LogicalState) -> Result<Vec<f64>, FolError> {
        Ok(softmax(&self.action_scores(state)?, self.temperature))
    }

    pub fn select_action(
        &self,
        state: &LogicalState,
        mode: Mode,
        rng: &mut impl Rng,
    ) -> Result<(usize, Vec<f64>), FolError> {
        let probs = self.probabilities(state)?;
        let action = match mode {
            Mode::Greedy => argmax(&self.action_scores(state)?),
            Mode::Sample => sample(&probs, rng),
        };
        Ok((action, probs))
    }

    /// Gradient of `log pi(action | s)` with respect to every weight.
    pub fn grad_log_prob(&self, acts: &[f64], action: usize) -> Vec<f64> {
        let probs = softmax(&self.scores_from(acts), self.temperature);
        self.rules
            .iter()
            .zip(acts)
            .map(|(r, a)| {
                let head = r.action_index();
                let indicator = if head == action { 1.0 } else { 0.0 };
                a * (indicator - probs[head]) / self.temperature
            })
            .collect()
    }

    pub fn log_prob(&self, acts: &[f64], action: usize) -> f64 {
        softmax(&self.scores_from(acts), self.temperature)[action].ln()
    }

    /// Rule file with the weights and temperature appended as facts.
    pub fn to_text(&self) -> String {
        let header = vec![format!("policy over {} rules", self.rules.len())];
        let mut out = write_rule_file(&header, self.language.invented_atoms(), &self.rules);
        out.push_str("% weights\n");
        for (i, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "weight({i}, {w:?}).");
        }
        let _ = writeln!(out, "temperature({:?}).", self.temperature);
        out
    }

    pub fn from_text(text: &str, base: &Language) -> Result<Self, PolicyError> {
        let file = parse_rule_file(text, base)?;
        let n = file.rules.len();
        let mut weights = vec![None; n];
        let mut temperature = 1.0;
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| PolicyError::Format(format!("bad number `{s}`")))
        };
        for f in &file.facts {
            match (f.name.as_str(), f.args.as_slice()) {
                ("weight", [i, w]) => {
                    let i: usize = i.parse().map_err(|_| PolicyError::Format(format!("bad rule index `{i}`")))?;
                    let slot = weights
                        .get_mut(i)
                        .ok_or_else(|| PolicyError::Format(format!("weight for missing rule {i}")))?;
                    *slot = Some(num(w)?);
                }
                ("temperature", [t]) => temperature = num(t)?,
                (name, _) => return Err(PolicyError::Format(format!("unexpected fact `{name}`"))),
            }
        }
        let weights = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| PolicyError::Format(format!("no weight for rule {i}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if temperature.is_nan() || temperature <= 0.0 {
            return Err(PolicyError::Format("temperature must be positive".into()));
        }
        for a in base.actions() {
            if !file.rules.iter().any(|r| r.action() == a) {
                return Err(PolicyError::Format(format!("no rule for action `{a}`")));
            }
        }
        let rules = file.rules;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| rules[i].action_index());
        if order.iter().enumerate().any(|(k, &i)| k != i) {
            return Err(PolicyError::Format("rules must be grouped by action".into()));
        }
        Ok(Self {
            language: file.language,
            rules,
            weights,
            temperature,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), PolicyError> {
        std::fs::write(path, self.to_text()).map_err(|source| PolicyError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path, base: &Language) -> Result<Self, PolicyError> {
        let text = std::fs::read_to_string(path).map_err(|source| PolicyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_text(&text, base)
    }

    /// Invented predicates used by at least one rule.
    pub fn used_invented(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .rules
            .iter()
            .flat_map(|r| r.body().iter())
            .filter(|a| matches!(&*a.predicate, Predicate::Invented { .. }))
            .map(|a| a.predicate.name())
            .collect();
        names.sort();
        names.dedup();
        names
    }
}

fn sample(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// One step of experience for the policy-gradient objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub activations: Vec<f64>,
    pub action: usize,
    pub advantage: f64,
}

/// `mean_i A_i log pi(a_i | s_i)`.
pub fn batch_objective(policy: &WeightedPolicy, batch: &[Sample]) -> f64 {
    batch
        .iter()
        .map(|s| s.advantage * policy.log_prob(&s.activations, s.action))
        .sum::<f64>()
        / batch.len() as f64
}

/// Analytic gradient of [`batch_objective`].
pub fn batch_gradient(policy: &WeightedPolicy, batch: &[Sample]) -> Vec<f64> {
    let mut grad = vec![0.0; policy.weights.len()];
    for s in batch {
        for (g, d) in grad.iter_mut().zip(policy.grad_log_prob(&s.activations, s.action)) {
            *g += s.advantage * d;
        }
    }
    for g in &mut grad {
        *g /= batch.len() as f64;
    }
    grad
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub episodes: usize,
    /// Training stops once this many environment steps have been taken.
    pub max_steps: usize,
    pub gamma: f64,
    pub learning_rate: f64,
    /// Step size of the running baseline.
    pub baseline_rate: f64,
    pub seed: u64,
    /// Episodes averaged by the smoothed column of the reward trace.
    pub smoothing_window: usize,
    /// Log progress every this many episodes; 0 disables.
    pub log_every: usize,
    pub optimizer: Optimizer,
    /// Scale each episode's advantages to unit standard deviation.
    pub normalize_advantages: bool,
    pub baseline: Baseline,
    /// Gradient passes over each episode. Passes after the first weight
    /// samples by the probability ratio to the acting policy and skip those
    /// whose ratio left `[1 - clip, 1 + clip]` in the advantage's direction.
    pub epochs: usize,
    pub clip: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// Running mean of the return at each timestep.
    Timestep,
    /// Linear value estimate over the rule activations plus a bias.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam,
}

/// Per-weight first and second moment estimates.
#[derive(Debug, Clone)]
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, grad: &[f64]) -> Vec<f64> {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        grad.iter()
            .enumerate()
            .map(|(i, g)| {
                self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * g;
                self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * g * g;
                (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS)
            })
            .collect()
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 1000,
            max_steps: 50_000,
            gamma: 0.99,
            learning_rate: 0.05,
            baseline_rate: 0.05,
            seed: 0,
            smoothing_window: 40,
            log_every: 100,
            optimizer: Optimizer::Adam,
            normalize_advantages: false,
            baseline: Baseline::Timestep,
            epochs: 1,
            clip: 0.2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RewardTrace {
    /// Undiscounted return of each training episode.
    pub returns: Vec<f64>,
    pub steps: usize,
}

impl RewardTrace {
    /// Mean over the trailing `window` episodes, per episode.
    pub fn smoothed(&self, window: usize) -> Vec<f64> {
        let w = window.max(1);
        (0..self.returns.len())
            .map(|i| {
                let lo = (i + 1).saturating_sub(w);
                let s = &self.returns[lo..=i];
                s.iter().sum::<f64>() / s.len() as f64
            })
            .collect()
    }

    /// `episode,return,smoothed`
    pub fn to_csv(&self, window: usize) -> String {
        let mut out = String::from("episode,return,smoothed\n");
        for (i, (r, s)) in self.returns.iter().zip(self.smoothed(window)).enumerate() {
            let _ = writeln!(out, "{},{r},{s}", i + 1);
        }
        out
    }
}

/// Discounted returns `G_t = r_t + gamma G_{t+1}`.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut g = 0.0;
    for t in (0..rewards.len()).rev() {
        g = rewards[t] + gamma * g;
        out[t] = g;
    }
    out
}

/// REINFORCE on the rule weights. Episode `i` resets the environment with
/// `seed + i`; actions are sampled from a generator seeded with `seed`.
pub fn learn(
    env: &mut impl Episodic,
    mut policy: WeightedPolicy,
    config: &TrainConfig,
) -> Result<(WeightedPolicy, RewardTrace), PolicyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut baseline: Vec<f64> = Vec::new();
    let mut trace = RewardTrace::default();
    let mut adam = Adam::new(policy.weights.len());
    let mut value = vec![0.0; policy.weights.len() + 1];
    for episode in 0..config.episodes {
        if trace.steps >= config.max_steps {
            break;
        }
        let mut state = env.reset_seeded(config.seed.wrapping_add(episode as u64));
        let mut samples = Vec::new();
        let mut rewards = Vec::new();
        loop {
            let acts = policy.activations(&state)?;
            let (action, _) = policy.select_action(&state, Mode::Sample, &mut rng)?;
            let t = env.step(action)?;
            samples.push(Sample {
                activations: acts,
                action,
                advantage: 0.0,
            });
            rewards.push(t.reward);
            trace.steps += 1;
            state = t.state;
            if t.done || trace.steps >= config.max_steps {
                break;
            }
        }
        let returns = discounted_returns(&rewards, config.gamma);
        if baseline.len() < returns.len() {
            baseline.resize(returns.len(), 0.0);
        }
        match config.baseline {
            Baseline::Timestep => {
                for (t, (s, g)) in samples.iter_mut().zip(&returns).enumerate() {
                    s.advantage = g - baseline[t];
                    baseline[t] += config.baseline_rate * (g - baseline[t]);
                }
            }
            Baseline::Linear => {
                for (s, g) in samples.iter_mut().zip(&returns) {
                    let n = s.activations.len();
                    let v = value[n] + s.activations.iter().zip(&value).map(|(a, w)| a * w).sum::<f64>();
                    s.advantage = g - v;
                    let norm = 1.0 + s.activations.iter().map(|a| a * a).sum::<f64>();
                    let step = config.baseline_rate * s.advantage / norm;
                    for (w, a) in value.iter_mut().zip(&s.activations) {
                        *w += step * a;
                    }
                    value[n] += step;
                }
            }
        }
        if config.normalize_advantages && samples.len() > 1 {
            let (_, sd) = mean_std(&samples.iter().map(|s| s.advantage).collect::<Vec<_>>());
            if sd > 0.0 {
                for s in &mut samples {
                    s.advantage /= sd;
                }
            }
        }
        let old_logp: Vec<f64> = samples.iter().map(|s| policy.log_prob(&s.activations, s.action)).collect();
        for _ in 0..config.epochs.max(1) {
            let mut grad = vec![0.0; policy.weights.len()];
            for (s, old) in samples.iter().zip(&old_logp) {
                let ratio = (policy.log_prob(&s.activations, s.action) - old).exp();
                let clipped = (s.advantage > 0.0 && ratio > 1.0 + config.clip)
                    || (s.advantage < 0.0 && ratio < 1.0 - config.clip);
                if clipped {
                    continue;
                }
                for (g, d) in grad.iter_mut().zip(policy.grad_log_prob(&s.activations, s.action)) {
                    *g += ratio * s.advantage * d;
                }
            }
            let step = match config.optimizer {
                Optimizer::Sgd => grad,
                Optimizer::Adam => adam.step(&grad),
            };
            for (i, (w, g)) in policy.weights.iter_mut().zip(&step).enumerate() {
                *w += config.learning_rate * g;
                if !w.is_finite() {
                    return Err(PolicyError::Divergence { index: i, episode });
                }
            }
        }
        trace.returns.push(rewards.iter().sum());
        if config.log_every > 0 && (episode + 1) % config.log_every == 0 {
            let sm = trace.smoothed(config.smoothing_window);
            log::info!(
                "episode {} steps {} smoothed return {:.3}",
                episode + 1,
                trace.steps,
                sm.last().copied().unwrap_or(0.0)
            );
        }
    }
    Ok((policy, trace))
}

/// Returns of `episodes` episodes, episode `i` reset with `seed + i`.
/// `act` gets the state and a generator seeded per episode.
pub fn evaluate(
    env: &mut impl Episodic,
    episodes: usize,
    seed: u64,
    mut act: impl FnMut(&LogicalState, &mut ChaCha8Rng) -> Result<usize, PolicyError>,
) -> Result<Vec<f64>, PolicyError> {
    let mut out = Vec::with_capacity(episodes);
    for i in 0..episodes {
        let s = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5eed);
        let mut state = env.reset_seeded(s);
        let mut total = 0.0;
        loop {
            let t = env.step(act(&state, &mut rng)?)?;
            total += t.reward;
            state = t.state;
            if t.done {
                break;
            }
        }
        out.push(total);
    }
    Ok(out)
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub action: String,
    pub rule: String,
    pub activation: f64,
    pub weight: f64,
    pub contribution: f64,
}

/// Firing rules by contribution, with the greedy action's strongest rule
/// first. Empty when no rule fires.
pub fn explain(policy: &WeightedPolicy, state: &LogicalState) -> Result<Vec<Explanation>, FolError> {
    let acts = policy.activations(state)?;
    let chosen = argmax(&policy.scores_from(&acts));
    let mut out: Vec<Explanation> = policy
        .rules
        .iter()
        .zip(&policy.weights)
        .zip(&acts)
        .filter(|(_, a)| **a > 0.0)
        .map(|((r, w), a)| Explanation {
            action: r.action().to_string(),
            rule: r.to_string(),
            activation: *a,
            weight: *w,
            contribution: w * a,
        })
        .collect();
    out.sort_by(|a, b| b.contribution.total_cmp(&a.contribution));
    let chosen = &policy.language.actions()[chosen];
    if let Some(i) = out.iter().position(|e| &e.action == chosen) {
        let top = out.remove(i);
        out.insert(0, top);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvId;
    use crate::fol::parse_clause;
    use crate::search::base_language;
    use crate::state::{MapExtent, ObjectState};

    fn policy(rules: &[&str], weights: Vec<f64>) -> WeightedPolicy {
        let l = base_language(EnvId::Getout);
        let rules = rules.iter().map(|r| parse_clause(r, &l).unwrap()).collect();
        WeightedPolicy::new(l, rules, 0).unwrap().with_weights(weights)
    }

    fn state(key: bool) -> LogicalState {
        let mut objs = vec![
            ObjectState::at(10.0, 0.0),
            ObjectState::at(5.0, 0.0),
            ObjectState::at(30.0, 0.0),
            ObjectState::at(12.0, 0.0),
        ];
        objs[1].exists = key;
        LogicalState::new(objs, MapExtent::new(40.0, 8.0))
    }

    #[test]
    fn fallback_rules_are_injected() {
        let p = policy(&["Jump(X):-NotExist(key,X)."], vec![0.0; 3]);
        let text: Vec<String> = p.rules().iter().map(|r| r.to_string()).collect();
        assert_eq!(text, vec!["Left(X):-.", "Right(X):-.", "Jump(X):-NotExist(key,X)."]);
    }

    #[test]
    fn scores_are_weighted_sums() {
        let p = policy(
            &["Left(X):-.", "Left(X):-Dir_[0,4)(enemy,player,X).", "Left(X):-NotExist(key,X)."],
            vec![1.0, -1.0, 0.5, 0.0, 0.0],
        );
        assert_eq!(p.action_scores(&state(true)).unwrap(), vec![0.0, 0.0, 0.0]);
        let p = policy(&["Jump(X):-Dir_[0,4)(enemy,player,X)."], vec![0.0, 0.0, 2.0]);
        assert_eq!(p.action_scores(&state(true)).unwrap(), vec![0.0, 0.0, 2.0]);
    }

    #[test]
    fn softmax_basics() {
        let p = softmax(&[0.0, 0.0, 0.0], 1.0);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(argmax(&[10.0, 0.0, 0.0]), 0);
        assert_eq!(argmax(&[1.0, 1.0]), 0);
        assert_eq!(softmax(&[1e308, -1e308], 1.0), vec![1.0, 0.0]);
    }

    #[test]
    fn policy_file_round_trip() {
        let p = policy(
            &["Left(X):-NotExist(key,X).", "Jump(X):-Dist_[0.04,0.05)(enemy,player,X)."],
            vec![0.1, -2.5e-7, 1.0 / 3.0],
        )
        .with_temperature(0.5);
        let text = p.to_text();
        let q = WeightedPolicy::from_text(&text, &base_language(EnvId::Getout)).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.to_text(), text);
    }

    #[test]
    fn policy_file_errors() {
        let l = base_language(EnvId::Getout);
        let bad = "Left(X):-.\nRight(X):-.\nJump(X):-.\nweight(0, 1.0).\nweight(1, 1.0).\n";
        assert!(WeightedPolicy::from_text(bad, &l).is_err());
        let bad = "Left(X):-.\nRight(X):-.\nweight(0, 1.0).\nweight(1, 1.0).\n";
        assert!(WeightedPolicy::from_text(bad, &l).is_err());
    }

    #[test]
    fn discounting() {
        assert_eq!(discounted_returns(&[1.0, 0.0, 2.0], 0.5), vec![1.5, 1.0, 2.0]);
    }

    #[test]
    fn explanation_orders_contributions() {
        let p = policy(
            &[
                "Left(X):-NotExist(key,X).",
                "Right(X):-Dir_[0,4)(enemy,player,X).",
                "Jump(X):-Dir_[0,4)(enemy,player,X).",
            ],
            vec![3.0, 0.5, 1.5],
        );
        let e = explain(&p, &state(true)).unwrap();
        assert_eq!(e.len(), 2, "{e:?}");
        assert_eq!(e[0].action, "jump");
        assert_eq!(e[0].contribution, 1.5);
        assert_eq!(e[1].action, "right");
        let none = policy(
            &["Left(X):-NotExist(key,X).", "Right(X):-NotExist(door,X).", "Jump(X):-NotExist(enemy,X)."],
            vec![1.0, 1.0, 1.0],
        );
        assert!(explain(&none, &state(true)).unwrap().is_empty());
    }
}
