//! The agent loop: sense, decide, act, step, learn.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decision::decide;
use crate::error::Result;
use crate::harness::config::RunConfig;
use crate::harness::metrics::MetricsRow;
use crate::memory::{EpisodeLog, HistoryWindow, TransitionRecord};
use crate::model::{LearningParams, TransitionModel};
use crate::need::reinforcement;
use crate::pingpong::{Environment, Event, PingPong};
use crate::snapshot::MemorySnapshot;

/// Number of most recent hit/miss events behind the rolling hit rate.
pub const ROLLING_EVENTS: usize = 100;

/// Offset between the environment seed and the decision seed.
const DECISION_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub log: EpisodeLog<f64>,
    pub model: TransitionModel<f64>,
    pub params: LearningParams<f64>,
    pub metrics: Vec<MetricsRow>,
    /// Hits and misses whose feedback was still queued when the run ended.
    pub undelivered: usize,
    /// Board render after every tick, when requested.
    pub frames: Vec<String>,
    /// Whether garbage collection removed anything during the run.
    pub collected: usize,
}

impl RunOutput {
    pub fn final_hit_rate(&self) -> f64 {
        self.metrics.last().map_or(0.0, |m| m.hit_rate)
    }

    pub fn snapshot(&self) -> MemorySnapshot<f64> {
        MemorySnapshot::new(
            crate::pingpong::pingpong_schema(&self.config.board),
            self.log.clone(),
            self.model.to_tables(&self.params),
            self.config.fingerprint(),
        )
    }
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    run_with(config, false)
}

/// Like [`run`], additionally keeping a text frame of the board per tick.
pub fn run_with(config: &RunConfig, frames: bool) -> Result<RunOutput> {
    config.validate()?;
    let mut env = PingPong::<f64>::new(config.board)?;
    let params = config.learning_params()?;
    let policy = config.decision_policy()?;
    let settings = config.model_settings();
    let mut model = TransitionModel::new(settings);
    let mut log = EpisodeLog::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ DECISION_SEED_SALT);

    let first = env.reset(config.seed);
    let mut state = env.sense(&first, 0, &model, None)?;
    let mut window = HistoryWindow::new(settings.window_size)?;
    window.push(state.clone());

    let mut metrics = Vec::with_capacity(config.ticks as usize);
    let mut recent: VecDeque<bool> = VecDeque::with_capacity(ROLLING_EVENTS);
    let (mut hits, mut misses) = (0u64, 0u64);
    let mut rendered = Vec::new();
    let mut collected = 0;

    for t in 0..config.ticks {
        let decision = decide(&model, &window, env.constraints(), &policy, &mut rng)?;
        let obs = env.step(&decision.chosen_action)?;
        let next = env.sense(&obs, t + 1, &model, decision.expected_state.as_ref())?;
        let r = reinforcement(&params.priority, state.needs(), next.needs())?;

        log.record(TransitionRecord {
            tick: t,
            state: state.clone(),
            chosen_action: decision.chosen_action.clone(),
            predicted_next: decision.expected_state.clone(),
            next_state: next.clone(),
            reinforcement: r,
            feedback: obs.feedback,
            energy: obs.energy,
            explored: decision.explored,
        })?;
        model.observe(log.records(), &params)?;
        if let Some(gc) = &config.gc {
            if (t + 1) % gc.every == 0 {
                collected += log.garbage_collect(Some(gc.horizon), Some(gc.min_trust), &model)?;
            }
        }

        match obs.event {
            Event::Hit => hits += 1,
            Event::Miss => misses += 1,
            Event::None => {}
        }
        if obs.event != Event::None {
            if recent.len() == ROLLING_EVENTS {
                recent.pop_front();
            }
            recent.push_back(obs.event == Event::Hit);
        }
        let y = next.needs();
        metrics.push(MetricsRow {
            tick: t,
            happy: y[0],
            sad: y[1],
            novelty: y[2],
            expectedness: y[3],
            feedback: obs.feedback,
            hits,
            misses,
            hit_rate: if recent.is_empty() {
                0.0
            } else {
                recent.iter().filter(|&&h| h).count() as f64 / recent.len() as f64
            },
            explored: decision.explored,
            energy: obs.energy,
        });
        if frames {
            rendered.push(env.render());
        }

        window.push(next.clone());
        state = next;
    }

    Ok(RunOutput {
        config: config.clone(),
        undelivered: env.pending_feedback(),
        log,
        model,
        params,
        metrics,
        frames: rendered,
        collected,
    })
}
