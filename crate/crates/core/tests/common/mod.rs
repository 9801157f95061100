#![allow(dead_code)]

use std::collections::BTreeMap;

use needspace::model::{EdgeEntry, ModelTables};
use needspace::{
    ConstraintMatrices, FeelingVar, HistoryWindow, LearningParams, ModelSettings, PolicyMode,
    PriorityProfile, StateKey, StateSchema, StateVector, Strategy, SuccessorKeying, TransitionModel,
};
use rand::Rng;

pub const CARDS: [u32; 2] = [5, 4];
pub const N_ACTIONS: usize = 3;

pub fn schema() -> StateSchema {
    StateSchema::new(
        CARDS
            .iter()
            .enumerate()
            .map(|(i, &c)| FeelingVar {
                name: format!("f{i}"),
                cardinality: c,
            })
            .collect(),
        (0..N_ACTIONS).map(|i| format!("a{i}")).collect(),
        vec!["need".into()],
    )
    .unwrap()
}

pub fn random_state(rng: &mut impl Rng, tick: u64) -> StateVector<f64> {
    let feelings = CARDS.iter().map(|&c| rng.gen_range(0..c)).collect();
    let actions = (0..N_ACTIONS).map(|_| rng.gen_bool(0.5)).collect();
    schema().state(tick, feelings, actions, vec![rng.gen()]).unwrap()
}

/// Plain pair lists; the oracle reads these rather than the matrices.
#[derive(Debug, Clone, Default)]
pub struct Pairs {
    pub exclude: Vec<(usize, usize)>,
    pub require: Vec<(usize, usize)>,
}

impl Pairs {
    pub fn random(rng: &mut impl Rng, n_pairs: usize) -> Self {
        let size = CARDS.len() + N_ACTIONS;
        let mut p = Pairs::default();
        for _ in 0..n_pairs {
            let i = rng.gen_range(0..size);
            let j = rng.gen_range(0..size);
            if i == j
                || p.exclude
                    .iter()
                    .chain(&p.require)
                    .any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))
            {
                continue;
            }
            if rng.gen_bool(0.5) {
                p.exclude.push((i, j));
            } else {
                p.require.push((i, j));
            }
        }
        p
    }

    pub fn matrices(&self) -> ConstraintMatrices {
        let mut c = ConstraintMatrices::empty(schema().len());
        for &(i, j) in &self.exclude {
            c.exclude(i, j).unwrap();
        }
        for &(i, j) in &self.require {
            c.require(i, j).unwrap();
        }
        c
    }

    pub fn allows(&self, feelings: &[u32], actions: &[bool]) -> bool {
        let active = |i: usize| {
            if i < feelings.len() {
                feelings[i] != 0
            } else {
                actions[i - feelings.len()]
            }
        };
        self.exclude.iter().all(|&(i, j)| !(active(i) && active(j)))
            && self.require.iter().all(|&(i, j)| !active(i) || active(j))
    }
}

pub fn settings() -> ModelSettings {
    ModelSettings {
        strategy: Strategy::TransitionMap,
        window_size: 1,
        keying: SuccessorKeying::State,
    }
}

pub fn params() -> LearningParams<f64> {
    LearningParams::new(PriorityProfile::new(vec![1.0], 0.0).unwrap(), 0.0, 0.5).unwrap()
}

/// Utilities come from `utility` so callers can force ties.
pub struct RandomModel {
    pub histories: Vec<StateVector<f64>>,
    /// history index -> successor key -> (successor, utility, evidence)
    pub edges: Vec<BTreeMap<StateKey, (StateVector<f64>, f64, u64)>>,
}

impl RandomModel {
    pub fn generate(
        rng: &mut impl Rng,
        n_histories: usize,
        max_successors: usize,
        mut utility: impl FnMut(&mut dyn rand::RngCore) -> f64,
        max_evidence: u64,
    ) -> Self {
        let mut histories: Vec<StateVector<f64>> = Vec::new();
        while histories.len() < n_histories {
            let s = random_state(rng, 0);
            if !histories.iter().any(|h| StateKey::of(h) == StateKey::of(&s)) {
                histories.push(s);
            }
        }
        let edges = histories
            .iter()
            .map(|_| {
                let mut m = BTreeMap::new();
                for _ in 0..rng.gen_range(1..=max_successors) {
                    let s = random_state(rng, 1);
                    let u = utility(rng);
                    m.insert(StateKey::of(&s), (s, u, rng.gen_range(1..=max_evidence)));
                }
                m
            })
            .collect();
        RandomModel { histories, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.iter().map(BTreeMap::len).sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        RandomModel {
            histories: self.histories.clone(),
            edges: self
                .edges
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|(key, (s, u, c))| (key.clone(), (s.clone(), u * k, *c)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn model(&self) -> TransitionModel<f64> {
        let mut entries = Vec::new();
        for (h, m) in self.histories.iter().zip(&self.edges) {
            let hk = window(h).key().unwrap();
            for (k, (s, u, c)) in m {
                entries.push(EdgeEntry {
                    history: hk.clone(),
                    successor_key: k.clone(),
                    successor: s.clone(),
                    utility: *u,
                    evidence: *c,
                });
            }
        }
        TransitionModel::from_tables(&ModelTables {
            settings: settings(),
            learning: params(),
            edges: entries,
            visits: Vec::new(),
        })
        .unwrap()
    }
}

pub fn window(s: &StateVector<f64>) -> HistoryWindow<f64> {
    HistoryWindow::from_states(1, [s.clone()]).unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    NoAction,
    Fallback,
    Pick {
        actions: Vec<bool>,
        key: StateKey,
        ties: usize,
    },
}

/// Brute-force argmax straight from the definitions.
pub fn oracle(model: &RandomModel, h: usize, pairs: &Pairs, mode: PolicyMode) -> Expected {
    let current = &model.histories[h];
    let admissible: Vec<Vec<bool>> = (0..1u32 << N_ACTIONS)
        .map(|bits| (0..N_ACTIONS).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|a| pairs.allows(current.feelings(), a))
        .collect();
    if admissible.is_empty() {
        return Expected::NoAction;
    }
    let edges = &model.edges[h];
    let total: u64 = edges.values().map(|e| e.2).sum();
    let mut best: Option<(f64, f64, &StateKey, &StateVector<f64>)> = None;
    let mut ties = 0;
    for (k, (s, u, c)) in edges {
        if !admissible.iter().any(|a| a.as_slice() == s.actions()) {
            continue;
        }
        let p = *c as f64 / total as f64;
        let (primary, secondary) = match mode {
            PolicyMode::Prospected => (u * p, 0.0),
            PolicyMode::UtilityOnly => (*u, 0.0),
            PolicyMode::Lexicographic => (*u, p),
        };
        let better = match best {
            None => true,
            Some((bp, bs, bk, _)) => {
                if primary == bp && secondary == bs {
                    ties += 1;
                }
                primary > bp
                    || (primary == bp && secondary > bs)
                    || (primary == bp && secondary == bs && k.codes() < bk.codes())
            }
        };
        if better {
            best = Some((primary, secondary, k, s));
        }
    }
    match best {
        None => Expected::Fallback,
        Some((_, _, k, s)) => Expected::Pick {
            actions: s.actions().to_vec(),
            key: k.clone(),
            ties,
        },
    }
}
