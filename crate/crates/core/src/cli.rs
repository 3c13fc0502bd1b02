//! Command-line stages: collect, invent, learn, eval, explain and play.

use crate::buffer::{collect, BufferError, CollectOptions, GameBuffer};
use crate::config::{ConfigError, ConfigFile, Overrides, PipelineConfig};
use crate::env::{oracle_policy, render_ascii, Env, EnvId};
use crate::fol::{parse_rule_file, write_rule_file, FolError};
use crate::invent::candidates_csv;
use crate::policy::{argmax, evaluate, explain, learn, mean_std, Mode, PolicyError, RewardTrace, WeightedPolicy};
use crate::search::{base_language, run_invention, InventionOutcome, SearchError};
use clap::{Args, Parser, Subcommand};
use log::info;
use rand::Rng;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("missing artifact {0}; run the upstream stage first")]
    Missing(PathBuf),
    #[error("training diverged: {0}")]
    Divergence(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Missing(_) => 3,
            CliError::Divergence(_) => 4,
            CliError::Run(_) => 1,
        }
    }
}

impl From<BufferError> for CliError {
    fn from(e: BufferError) -> Self {
        match e {
            BufferError::Io { path, source } => CliError::Io {
                path,
                msg: source.to_string(),
            },
            BufferError::Parse { .. } => CliError::Io {
                path: "buffer".into(),
                msg: e.to_string(),
            },
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        match e {
            PolicyError::Divergence { .. } => CliError::Divergence(e.to_string()),
            PolicyError::Io { path, source } => CliError::Io {
                path,
                msg: source.to_string(),
            },
            PolicyError::Format(_) => CliError::Io {
                path: "policy".into(),
                msg: e.to_string(),
            },
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<FolError> for CliError {
    fn from(e: FolError) -> Self {
        CliError::Run(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "nesy", version, about = "Invent predicates, learn logic rules and train rule weights on small games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// TOML pipeline config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Artifact directory; must exist.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// getout, loot or threefish.
    #[arg(long, global = true)]
    pub env: Option<EnvId>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Record oracle play into a buffer file.
    Collect {
        #[command(flatten)]
        common: Common,
        /// Pairs per action.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Invent predicates and search rules from the buffer.
    Invent {
        #[command(flatten)]
        common: Common,
    },
    /// Train rule weights by interacting with the game.
    Learn {
        #[command(flatten)]
        common: Common,
        /// Upper bound on training episodes.
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Compare the trained policy with random and oracle play.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        episodes: Option<usize>,
        /// Take the most probable action instead of sampling.
        #[arg(long)]
        greedy: bool,
    },
    /// Show the rules behind each action of a greedy rollout or buffer state.
    Explain {
        #[command(flatten)]
        common: Common,
        /// Explain this buffer state instead of a rollout.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Greedy rollout drawn as ASCII frames.
    Play {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 300)]
        steps: usize,
    },
}

pub fn config_for(common: &Common, mut flags: Overrides) -> Result<PipelineConfig, CliError> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    flags.env = common.env;
    flags.seed = common.seed;
    flags.out = common.out.clone();
    Ok(PipelineConfig::resolve(&file, &flags)?)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Collect { common, n } => {
            let cfg = config_for(
                &common,
                Overrides {
                    n_per_action: n,
                    ..Overrides::default()
                },
            )?;
            let buffer = cmd_collect(&cfg)?;
            println!("wrote {} ({} pairs)", cfg.paths.buffer.display(), buffer.len());
            for (i, a) in buffer.actions().names().iter().enumerate() {
                println!("{a:>8} {}", buffer.count(i));
            }
        }
        Command::Invent { common } => {
            let cfg = config_for(&common, Overrides::default())?;
            let outcome = cmd_invent(&cfg)?;
            println!(
                "wrote {} ({} rules, {} invented predicates)",
                cfg.paths.rules.display(),
                outcome.rules().len(),
                outcome.language.invented_atoms().len()
            );
        }
        Command::Learn { common, episodes } => {
            let cfg = config_for(
                &common,
                Overrides {
                    train_episodes: episodes,
                    ..Overrides::default()
                },
            )?;
            let (_, trace) = cmd_learn(&cfg)?;
            let last = trace.smoothed(cfg.train.smoothing_window).last().copied().unwrap_or(0.0);
            println!(
                "wrote {} after {} episodes, {} steps; smoothed return {last:.3}",
                cfg.paths.policy.display(),
                trace.returns.len(),
                trace.steps
            );
        }
        Command::Eval {
            common,
            episodes,
            greedy,
        } => {
            let cfg = config_for(
                &common,
                Overrides {
                    eval_episodes: episodes,
                    ..Overrides::default()
                },
            )?;
            let report = cmd_eval(&cfg, greedy)?;
            print!("{}", report.table());
        }
        Command::Explain { common, index, steps } => {
            let cfg = config_for(&common, Overrides::default())?;
            print!("{}", cmd_explain(&cfg, index, steps)?);
        }
        Command::Play { common, steps } => {
            let cfg = config_for(&common, Overrides::default())?;
            print!("{}", cmd_play(&cfg, steps)?);
        }
    }
    Ok(())
}

fn require(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Missing(path.to_path_buf()))
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    require(path)?;
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn check_dir(cfg: &PipelineConfig) -> Result<(), CliError> {
    let dir = &cfg.paths.dir;
    if dir.as_os_str().is_empty() || dir.is_dir() {
        Ok(())
    } else {
        Err(CliError::Io {
            path: dir.display().to_string(),
            msg: "output directory does not exist".into(),
        })
    }
}

pub fn cmd_collect(cfg: &PipelineConfig) -> Result<GameBuffer, CliError> {
    check_dir(cfg)?;
    let mut env = Env::new(cfg.env.clone());
    let id = cfg.env_id();
    let opts = CollectOptions {
        max_episodes: cfg.max_collect_episodes,
        ..CollectOptions::new(cfg.n_per_action, cfg.seed)
    };
    let buffer = collect(&mut env, |s| oracle_policy(id, s), &opts)?;
    buffer.save(&cfg.paths.buffer)?;
    Ok(buffer)
}

fn load_buffer(cfg: &PipelineConfig) -> Result<GameBuffer, CliError> {
    require(&cfg.paths.buffer)?;
    let buffer = GameBuffer::load(&cfg.paths.buffer)?;
    if buffer.env_id() != cfg.env_id() {
        return Err(CliError::Run(format!(
            "{} holds {} data, not {}",
            cfg.paths.buffer.display(),
            buffer.env_id(),
            cfg.env_id()
        )));
    }
    Ok(buffer)
}

/// Writes the rule file, the invented predicates alone, the necessity
/// candidate scores, the beam trace and a readable invention report.
pub fn cmd_invent(cfg: &PipelineConfig) -> Result<InventionOutcome, CliError> {
    check_dir(cfg)?;
    let buffer = load_buffer(cfg)?;
    let outcome = run_invention(&base_language(cfg.env_id()), &buffer, &cfg.invention, &cfg.search)?;
    let invented = outcome.language.invented_atoms();
    let header = vec![format!("env {}", cfg.env_id()), format!("seed {}", cfg.seed)];
    write(&cfg.paths.rules, &write_rule_file(&header, invented, &outcome.rules()))?;
    write(&cfg.paths.language, &write_rule_file(&header, invented, &[]))?;
    let rows: Vec<_> = outcome
        .actions
        .iter()
        .map(|a| (a.action.clone(), a.necessity.all.clone()))
        .collect();
    write(&cfg.paths.candidates, &candidates_csv(&rows))?;
    write(&cfg.paths.trace, &outcome.trace_jsonl())?;
    write(&cfg.paths.invented, &outcome.invented_report())?;
    Ok(outcome)
}

/// Fresh policy over the rule file, weights drawn from the seed.
pub fn initial_policy(cfg: &PipelineConfig) -> Result<WeightedPolicy, CliError> {
    let text = read(&cfg.paths.rules)?;
    let file = parse_rule_file(&text, &base_language(cfg.env_id()))?;
    Ok(WeightedPolicy::new(file.language, file.rules, cfg.seed)?.with_temperature(cfg.temperature))
}

pub fn cmd_learn(cfg: &PipelineConfig) -> Result<(WeightedPolicy, RewardTrace), CliError> {
    check_dir(cfg)?;
    let policy = initial_policy(cfg)?;
    let mut env = Env::new(cfg.env.clone());
    let (policy, trace) = learn(&mut env, policy, &cfg.train)?;
    info!("trained on {} steps", trace.steps);
    policy.save(&cfg.paths.policy)?;
    write(&cfg.paths.rewards, &trace.to_csv(cfg.train.smoothing_window))?;
    Ok((policy, trace))
}

pub fn load_policy(cfg: &PipelineConfig) -> Result<WeightedPolicy, CliError> {
    require(&cfg.paths.policy)?;
    Ok(WeightedPolicy::load(&cfg.paths.policy, &base_language(cfg.env_id()))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub seed: u64,
    pub greedy: bool,
    pub policy: Vec<f64>,
    pub random: Vec<f64>,
    pub oracle: Vec<f64>,
}

impl EvalReport {
    /// Share of the oracle-minus-random gap the policy closes.
    pub fn gap_fraction(&self) -> f64 {
        let (p, r, o) = (mean_std(&self.policy).0, mean_std(&self.random).0, mean_std(&self.oracle).0);
        (p - r) / (o - r)
    }

    pub fn table(&self) -> String {
        let n = self.policy.len();
        let mut out = format!(
            "episodes {n}, seeds {}..{}, {}\n{:<8} {:>10} {:>10}\n",
            self.seed,
            self.seed + n as u64,
            if self.greedy { "greedy" } else { "sampled" },
            "policy",
            "mean",
            "std"
        );
        for (name, v) in [("rules", &self.policy), ("random", &self.random), ("oracle", &self.oracle)] {
            let (m, s) = mean_std(v);
            out.push_str(&format!("{name:<8} {m:>10.3} {s:>10.3}\n"));
        }
        out.push_str(&format!("gap closed {:.3}\n", self.gap_fraction()));
        out
    }
}

/// Seeded returns of the trained policy, uniform random play and the oracle
/// on the same episodes.
pub fn cmd_eval(cfg: &PipelineConfig, greedy: bool) -> Result<EvalReport, CliError> {
    let policy = load_policy(cfg)?;
    let mut env = Env::new(cfg.env.clone());
    let (n, seed) = (cfg.eval.episodes, cfg.eval.seed);
    let mode = if greedy { Mode::Greedy } else { Mode::Sample };
    let returns = evaluate(&mut env, n, seed, |s, rng| Ok(policy.select_action(s, mode, rng)?.0))?;
    let k = env.actions().len();
    let random = evaluate(&mut env, n, seed, |_, rng| Ok(rng.gen_range(0..k)))?;
    let id = cfg.env_id();
    let oracle = evaluate(&mut env, n, seed, |s, _| Ok(oracle_policy(id, s)))?;
    Ok(EvalReport {
        seed,
        greedy,
        policy: returns,
        random,
        oracle,
    })
}

fn explanation_block(policy: &WeightedPolicy, state: &crate::state::LogicalState) -> Result<String, CliError> {
    let probs = policy.probabilities(state)?;
    let chosen = argmax(&probs);
    let mut out = format!("action {} (p = {:.3})\n", policy.language().actions()[chosen], probs[chosen]);
    let rows = explain(policy, state)?;
    if rows.is_empty() {
        out.push_str("  no rule fires\n");
    }
    for r in rows {
        out.push_str(&format!(
            "  {:+.3} = {:.3} x {:.3}  {}\n",
            r.contribution, r.weight, r.activation, r.rule
        ));
    }
    Ok(out)
}

pub fn cmd_explain(cfg: &PipelineConfig, index: Option<usize>, steps: usize) -> Result<String, CliError> {
    let policy = load_policy(cfg)?;
    if let Some(i) = index {
        let buffer = load_buffer(cfg)?;
        let (state, action) = buffer
            .pairs()
            .get(i)
            .ok_or_else(|| CliError::Run(format!("buffer has {} states, no index {i}", buffer.len())))?;
        let mut out = format!("buffer state {i}, teacher chose {}\n", buffer.actions().names()[*action]);
        out.push_str(&render_ascii(cfg.env_id(), state));
        out.push_str(&explanation_block(&policy, state)?);
        return Ok(out);
    }
    let mut env = Env::new(cfg.env.clone());
    let mut state = env.reset_seeded(cfg.eval.seed);
    let mut out = String::new();
    for t in 0..steps {
        out.push_str(&format!("step {t}\n"));
        out.push_str(&explanation_block(&policy, &state)?);
        let action = argmax(&policy.probabilities(&state)?);
        let tr = env.step(action)?;
        state = tr.state;
        if tr.done {
            break;
        }
    }
    Ok(out)
}

pub fn cmd_play(cfg: &PipelineConfig, steps: usize) -> Result<String, CliError> {
    let policy = load_policy(cfg)?;
    let mut env = Env::new(cfg.env.clone());
    let mut state = env.reset_seeded(cfg.eval.seed);
    let mut total = 0.0;
    let mut out = String::new();
    for t in 0..steps {
        let action = argmax(&policy.probabilities(&state)?);
        out.push_str(&format!("step {t} return {total:.2}\n"));
        out.push_str(&render_ascii(cfg.env_id(), &state));
        out.push_str(&format!("-> {}\n\n", policy.language().actions()[action]));
        let tr = env.step(action)?;
        total += tr.reward;
        state = tr.state;
        if tr.done {
            out.push_str(&format!("done after {} steps, return {total:.2}\n", t + 1));
            out.push_str(&render_ascii(cfg.env_id(), &state));
            break;
        }
    }
    Ok(out)
}

impl From<crate::env::EnvError> for CliError {
    fn from(e: crate::env::EnvError) -> Self {
        CliError::Run(e.to_string())
    }
}
