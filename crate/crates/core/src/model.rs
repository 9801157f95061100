//! Symbolic world model: a transition graph from history keys to successor
//! states carrying learned utility `U` and evidence counts `C`, from which
//! transition probabilities `P` are derived.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{trailing_segment, window_at, EpisodeLog, HistoryWindow, Segment, TransitionRecord};
use crate::need::{reinforcement, state_distance, HistoryKey, PriorityProfile, StateKey, StateVector};
use crate::scalar::Scalar;

/// How episodic experience is turned into utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Only whole segments are learned, each transition credited with the
    /// segment's terminal reinforcement.
    Segment,
    /// Every transition is learned as it happens with its immediate
    /// reinforcement; segments are credited on top when they close.
    TransitionMap,
}

/// What identifies a successor in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessorKeying {
    /// The full discrete successor state, `U(s, s')`.
    #[default]
    State,
    /// Only the committed action, the degenerate `U(s, a')` form.
    Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub strategy: Strategy,
    pub window_size: usize,
    #[serde(default)]
    pub keying: SuccessorKeying,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LearningParams<S: Scalar> {
    pub priority: PriorityProfile<S>,
    pub predictability_weight: S,
    /// Blend factor for new evidence, `U <- U + step * (L - U)`.
    pub utility_step: S,
}

impl<S: Scalar> LearningParams<S> {
    pub fn new(priority: PriorityProfile<S>, predictability_weight: S, utility_step: S) -> Result<Self> {
        let p = LearningParams {
            priority,
            predictability_weight,
            utility_step,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.utility_step > S::zero() && self.utility_step <= S::one()) {
            return Err(Error::config("utility_step", "must lie in (0, 1]"));
        }
        if self.predictability_weight < S::zero() || !self.predictability_weight.is_finite() {
            return Err(Error::config("predictability_weight", "must be finite and >= 0"));
        }
        PriorityProfile::new(self.priority.weights().to_vec(), self.priority.energy_weight())?;
        Ok(())
    }

    pub fn energy_weight(&self) -> S {
        self.priority.energy_weight()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Edge<S: Scalar> {
    utility: S,
    evidence: u64,
    /// First observed successor state for this key.
    successor: StateVector<S>,
}

/// One recorded successor of a history, as seen by the decision engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<S: Scalar> {
    pub key: StateKey,
    pub state: StateVector<S>,
    pub utility: S,
    pub probability: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel<S: Scalar> {
    settings: ModelSettings,
    edges: BTreeMap<HistoryKey, BTreeMap<StateKey, Edge<S>>>,
    visits: BTreeMap<StateKey, u64>,
}

/// `1 - state_distance`, or zero when nothing was predicted.
pub fn expectedness<S: Scalar>(predicted: Option<&StateVector<S>>, actual: &StateVector<S>) -> S {
    match predicted {
        Some(p) => state_distance(p, actual).map_or(S::zero(), |d| S::one() - d),
        None => S::zero(),
    }
}

impl<S: Scalar> TransitionModel<S> {
    pub fn new(settings: ModelSettings) -> Self {
        TransitionModel {
            settings,
            edges: BTreeMap::new(),
            visits: BTreeMap::new(),
        }
    }

    pub fn settings(&self) -> &ModelSettings {
        &self.settings
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.visits.is_empty()
    }

    /// Number of (history, successor) entries.
    pub fn len(&self) -> usize {
        self.edges.values().map(BTreeMap::len).sum()
    }

    pub fn histories(&self) -> impl Iterator<Item = &HistoryKey> {
        self.edges.keys()
    }

    pub fn successor_key(&self, s: &StateVector<S>) -> StateKey {
        match self.settings.keying {
            SuccessorKeying::State => StateKey::of(s),
            SuccessorKeying::Action => StateKey::of_actions(s),
        }
    }

    pub fn evidence(&self, history: &HistoryKey, successor: &StateKey) -> u64 {
        self.edge(history, successor).map_or(0, |e| e.evidence)
    }

    pub fn utility(&self, history: &HistoryKey, successor: &StateKey) -> S {
        self.edge(history, successor).map_or(S::zero(), |e| e.utility)
    }

    fn edge(&self, history: &HistoryKey, successor: &StateKey) -> Option<&Edge<S>> {
        self.edges.get(history)?.get(successor)
    }

    fn total_evidence(&self, history: &HistoryKey) -> u64 {
        self.edges
            .get(history)
            .map_or(0, |m| m.values().map(|e| e.evidence).sum())
    }

    /// `C(h, s') / sum C(h, .)`; zero for unknown histories.
    pub fn probability(&self, history: &HistoryKey, successor: &StateKey) -> S {
        let total = self.total_evidence(history);
        if total == 0 {
            return S::zero();
        }
        S::lit(self.evidence(history, successor) as f64) / S::lit(total as f64)
    }

    fn edge_mut(&mut self, history: HistoryKey, next: &StateVector<S>) -> &mut Edge<S> {
        let key = self.successor_key(next);
        self.edges
            .entry(history)
            .or_default()
            .entry(key)
            .or_insert_with(|| Edge {
                utility: S::zero(),
                evidence: 0,
                successor: next.clone(),
            })
    }

    fn count(&mut self, history: HistoryKey, next: &StateVector<S>) -> &mut Edge<S> {
        *self.visits.entry(StateKey::of(next)).or_insert(0) += 1;
        let edge = self.edge_mut(history, next);
        edge.evidence += 1;
        edge
    }

    #[cfg(test)]
    pub(crate) fn count_only(&mut self, history: &HistoryWindow<S>, next: &StateVector<S>) -> Result<()> {
        self.count(history.key()?, next);
        Ok(())
    }

    // `U + step * (L - U)` rearranged so that a step of 1 lands on `L` exactly
    fn blend(edge: &mut Edge<S>, value: S, step: S) {
        edge.utility = (S::one() - step) * edge.utility + step * value;
    }

    /// The value of the learning function for one observed transition:
    /// explicit reinforcement, plus weighted predictability when a prediction
    /// was made, minus weighted energy.
    pub fn learning_value(
        history: &HistoryWindow<S>,
        next: &StateVector<S>,
        predicted: Option<&StateVector<S>>,
        energy: S,
        params: &LearningParams<S>,
    ) -> Result<S> {
        let last = history
            .latest()
            .ok_or_else(|| Error::usage("learning from an empty history"))?;
        let explicit = reinforcement(&params.priority, last.needs(), next.needs())?;
        let predictability = match predicted {
            Some(p) => params.predictability_weight * (S::one() - state_distance(p, next)?),
            None => S::zero(),
        };
        Ok(explicit + predictability - params.energy_weight() * energy)
    }

    pub fn learn_transition(
        &mut self,
        history: &HistoryWindow<S>,
        next: &StateVector<S>,
        predicted: Option<&StateVector<S>>,
        energy: S,
        params: &LearningParams<S>,
    ) -> Result<()> {
        let value = Self::learning_value(history, next, predicted, energy, params)?;
        let edge = self.count(history.key()?, next);
        Self::blend(edge, value, params.utility_step);
        Ok(())
    }

    /// Credits every transition of a closed segment with its terminal
    /// reinforcement, counting each transition once.
    pub fn apply_global_feedback(&mut self, segment: &Segment<S>, params: &LearningParams<S>) -> Result<()> {
        self.credit_segment(segment, params, true)
    }

    /// Like [`apply_global_feedback`](Self::apply_global_feedback) but for
    /// transitions whose evidence was already counted when they were
    /// learned one by one.
    pub fn reinforce_segment(&mut self, segment: &Segment<S>, params: &LearningParams<S>) -> Result<()> {
        self.credit_segment(segment, params, false)
    }

    fn credit_segment(
        &mut self,
        segment: &Segment<S>,
        params: &LearningParams<S>,
        counted: bool,
    ) -> Result<()> {
        let r = segment
            .terminal_reinforcement
            .ok_or_else(|| Error::usage("global feedback on an open segment"))?;
        for (window, rec) in segment.transitions(self.settings.window_size)? {
            let key = window.key()?;
            let edge = if counted || self.evidence(&key, &self.successor_key(&rec.next_state)) == 0 {
                self.count(key, &rec.next_state)
            } else {
                self.edge_mut(key, &rec.next_state)
            };
            Self::blend(edge, r, params.utility_step);
        }
        Ok(())
    }

    /// Learns from the newest record of `records` (a log prefix) according
    /// to the strategy. Live runs and rebuilds both go through here.
    pub fn observe(&mut self, records: &[TransitionRecord<S>], params: &LearningParams<S>) -> Result<()> {
        let Some(last) = records.last() else {
            return Ok(());
        };
        let t = self.settings.window_size;
        if self.settings.strategy == Strategy::TransitionMap {
            let w = window_at(records, records.len() - 1, t)?;
            self.learn_transition(
                &w,
                &last.next_state,
                last.predicted_next.as_ref(),
                last.energy,
                params,
            )?;
        }
        if last.closes_segment() {
            let seg = trailing_segment(records, t);
            match self.settings.strategy {
                Strategy::Segment => self.apply_global_feedback(&seg, params)?,
                Strategy::TransitionMap => self.reinforce_segment(&seg, params)?,
            }
        }
        Ok(())
    }

    pub fn rebuild_from_log(
        log: &EpisodeLog<S>,
        settings: ModelSettings,
        params: &LearningParams<S>,
    ) -> Result<Self> {
        let n = params.priority.weights().len();
        if let Some(r) = log.records().iter().find(|r| r.state.needs().len() != n) {
            return Err(Error::schema(format!(
                "log record at tick {} has {} needs, priority profile has {n}",
                r.tick,
                r.state.needs().len()
            )));
        }
        let mut model = Self::new(settings);
        for i in 1..=log.len() {
            model.observe(&log.records()[..i], params)?;
        }
        Ok(model)
    }

    /// Recorded successors of `history`, best prospect first: descending
    /// `U * P`, ties by ascending successor key.
    pub fn predict_successors(&self, history: &HistoryWindow<S>) -> Vec<Prediction<S>> {
        let Ok(key) = history.key() else {
            return Vec::new();
        };
        let Some(succ) = self.edges.get(&key) else {
            return Vec::new();
        };
        let total = S::lit(succ.values().map(|e| e.evidence).sum::<u64>() as f64);
        let mut out: Vec<Prediction<S>> = succ
            .iter()
            .map(|(k, e)| Prediction {
                key: k.clone(),
                state: e.successor.clone(),
                utility: e.utility,
                probability: S::lit(e.evidence as f64) / total,
            })
            .collect();
        out.sort_by(|a, b| {
            (b.utility * b.probability)
                .partial_cmp(&(a.utility * a.probability))
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.key.cmp(&b.key))
        });
        out
    }

    /// How many times `s` has been reached as a learned successor.
    pub fn visits(&self, s: &StateVector<S>) -> u64 {
        self.visits.get(&StateKey::of(s)).copied().unwrap_or(0)
    }

    /// `1 / (1 + n)` for a state reached `n` times.
    pub fn novelty(&self, s: &StateVector<S>) -> S {
        S::one() / S::lit(1.0 + self.visits(s) as f64)
    }

    /// Sum of `P` over the successors of every history with evidence.
    pub fn probability_sums(&self) -> Vec<(HistoryKey, S)> {
        self.edges
            .keys()
            .filter(|h| self.total_evidence(h) > 0)
            .map(|h| {
                let sum = self.edges[h].keys().map(|s| self.probability(h, s)).sum();
                (h.clone(), sum)
            })
            .collect()
    }

    /// First difference against `other`, if any: key sets and counts must
    /// match exactly, utilities within `tol`.
    pub fn difference(&self, other: &Self, tol: S) -> Option<String> {
        if self.settings != other.settings {
            return Some(format!("settings {:?} vs {:?}", self.settings, other.settings));
        }
        if self.visits != other.visits {
            return Some("visit counts differ".into());
        }
        if !self.edges.keys().eq(other.edges.keys()) {
            return Some("history key sets differ".into());
        }
        for (h, succ) in &self.edges {
            let theirs = &other.edges[h];
            if !succ.keys().eq(theirs.keys()) {
                return Some(format!("successor sets differ for history {h}"));
            }
            for (k, e) in succ {
                let o = &theirs[k];
                if e.evidence != o.evidence {
                    return Some(format!("evidence {} vs {} at ({h}, {k})", e.evidence, o.evidence));
                }
                let gap = (e.utility - o.utility).abs();
                if gap.is_nan() || gap > tol {
                    return Some(format!("utility {} vs {} at ({h}, {k})", e.utility, o.utility));
                }
            }
        }
        None
    }

    /// Evidence counts of every (history, successor) pair, in key order.
    pub fn evidence_counts(&self) -> impl Iterator<Item = (&HistoryKey, &StateKey, u64)> {
        self.edges
            .iter()
            .flat_map(|(h, m)| m.iter().map(move |(k, e)| (h, k, e.evidence)))
    }

    pub fn utilities(&self) -> impl Iterator<Item = (&HistoryKey, &StateKey, S)> {
        self.edges
            .iter()
            .flat_map(|(h, m)| m.iter().map(move |(k, e)| (h, k, e.utility)))
    }

    pub fn to_tables(&self, learning: &LearningParams<S>) -> ModelTables<S> {
        ModelTables {
            settings: self.settings,
            learning: learning.clone(),
            edges: self
                .edges
                .iter()
                .flat_map(|(h, m)| {
                    m.iter().map(move |(k, e)| EdgeEntry {
                        history: h.clone(),
                        successor_key: k.clone(),
                        successor: e.successor.clone(),
                        utility: e.utility,
                        evidence: e.evidence,
                    })
                })
                .collect(),
            visits: self
                .visits
                .iter()
                .map(|(k, &count)| VisitEntry {
                    state: k.clone(),
                    count,
                })
                .collect(),
        }
    }

    pub fn from_tables(tables: &ModelTables<S>) -> Result<Self> {
        let mut model = Self::new(tables.settings);
        for e in &tables.edges {
            if e.evidence == 0 {
                return Err(Error::Load {
                    field: "model.edges.evidence".into(),
                    message: format!("zero evidence at ({}, {})", e.history, e.successor_key),
                });
            }
            let slot = model.edges.entry(e.history.clone()).or_default();
            let dup = slot
                .insert(
                    e.successor_key.clone(),
                    Edge {
                        utility: e.utility,
                        evidence: e.evidence,
                        successor: e.successor.clone(),
                    },
                )
                .is_some();
            if dup {
                return Err(Error::Load {
                    field: "model.edges".into(),
                    message: format!("duplicate entry ({}, {})", e.history, e.successor_key),
                });
            }
        }
        for v in &tables.visits {
            model.visits.insert(v.state.clone(), v.count);
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EdgeEntry<S: Scalar> {
    pub history: HistoryKey,
    pub successor_key: StateKey,
    pub successor: StateVector<S>,
    pub utility: S,
    pub evidence: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitEntry {
    pub state: StateKey,
    pub count: u64,
}

/// Serializable form of a model together with the parameters that built it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModelTables<S: Scalar> {
    pub settings: ModelSettings,
    pub learning: LearningParams<S>,
    pub edges: Vec<EdgeEntry<S>>,
    pub visits: Vec<VisitEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::tests::{log_of, schema, state};
    use crate::need::StateSchema;

    fn params(step: f64) -> LearningParams<f64> {
        LearningParams::new(PriorityProfile::new(vec![1.0], 0.0).unwrap(), 0.0, step).unwrap()
    }

    fn settings(strategy: Strategy) -> ModelSettings {
        ModelSettings {
            strategy,
            window_size: 1,
            keying: SuccessorKeying::State,
        }
    }

    fn need_state(sc: &StateSchema, tick: u64, pos: u32, y: f64) -> StateVector<f64> {
        sc.state(tick, vec![pos], vec![false], vec![y]).unwrap()
    }

    fn window(s: &StateVector<f64>) -> HistoryWindow<f64> {
        HistoryWindow::from_states(1, [s.clone()]).unwrap()
    }

    #[test]
    fn single_observation_normalizes() {
        let sc = schema();
        let mut m = TransitionModel::new(settings(Strategy::TransitionMap));
        let from = need_state(&sc, 0, 0, 1.0);
        let to = need_state(&sc, 1, 1, 0.0);
        m.learn_transition(&window(&from), &to, None, 0.0, &params(1.0))
            .unwrap();
        let (h, k) = (window(&from).key().unwrap(), StateKey::of(&to));
        assert_eq!(m.utility(&h, &k), 1.0);
        assert_eq!(m.evidence(&h, &k), 1);
        assert_eq!(m.probability(&h, &k), 1.0);
    }

    #[test]
    fn probabilities_follow_counts() {
        let mut m = TransitionModel::new(settings(Strategy::TransitionMap));
        let w = window(&state(0, 0));
        let (a, b) = (state(1, 1), state(1, 2));
        m.learn_transition(&w, &a, None, 0.0, &params(1.0)).unwrap();
        m.learn_transition(&w, &b, None, 0.0, &params(1.0)).unwrap();
        let h = w.key().unwrap();
        assert_eq!(m.probability(&h, &StateKey::of(&a)), 0.5);
        assert_eq!(m.probability(&h, &StateKey::of(&b)), 0.5);
        for _ in 0..2 {
            m.learn_transition(&w, &a, None, 0.0, &params(1.0)).unwrap();
        }
        // counts (3, 1)
        assert_eq!(m.probability(&h, &StateKey::of(&a)), 3.0 / 4.0);
        assert_eq!(m.probability(&h, &StateKey::of(&b)), 1.0 / 4.0);
        let unknown = window(&state(0, 9)).key().unwrap();
        assert_eq!(m.probability(&unknown, &StateKey::of(&a)), 0.0);
    }

    #[test]
    fn learning_value_terms() {
        let sc = schema();
        let from = need_state(&sc, 0, 0, 0.5);
        let to = need_state(&sc, 1, 1, 0.25);
        let p = LearningParams::new(PriorityProfile::new(vec![2.0], 0.5).unwrap(), 0.25, 1.0).unwrap();
        // explicit 2 * 0.25 = 0.5, energy 0.5 * 2 = 1, wrong prediction on
        // one of two variables: 0.25 * 0.5
        let wrong = need_state(&sc, 1, 2, 0.0);
        let v = TransitionModel::learning_value(&window(&from), &to, Some(&wrong), 2.0, &p).unwrap();
        assert_eq!(v, 0.5 + 0.125 - 1.0);
        let v = TransitionModel::learning_value(&window(&from), &to, None, 0.0, &p).unwrap();
        assert_eq!(v, 0.5);
        let empty = HistoryWindow::new(1).unwrap();
        assert!(matches!(
            TransitionModel::learning_value(&empty, &to, None, 0.0, &p),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn global_feedback_uniform_credit() {
        for r in [1.0, -1.0] {
            let log = log_of(&[0.0, 0.0, r]);
            let seg = log.close_segment(1);
            let mut m = TransitionModel::new(settings(Strategy::Segment));
            m.apply_global_feedback(&seg, &params(1.0)).unwrap();
            assert_eq!(m.len(), 3);
            assert!(m.utilities().all(|(_, _, u)| u == r));
            assert!(m.evidence_counts().all(|(_, _, c)| c == 1));
        }
    }

    #[test]
    fn global_feedback_blends_exponentially() {
        let seg = log_of(&[0.0, 1.0]).close_segment(1);
        let mut m = TransitionModel::new(settings(Strategy::Segment));
        m.apply_global_feedback(&seg, &params(0.5)).unwrap();
        assert!(m.utilities().all(|(_, _, u)| u == 0.5));
        m.apply_global_feedback(&seg, &params(0.5)).unwrap();
        assert!(m.utilities().all(|(_, _, u)| u == 0.75));
        assert!(m.evidence_counts().all(|(_, _, c)| c == 2));
    }

    #[test]
    fn global_feedback_rejects_open_segment() {
        let seg = log_of(&[0.0, 0.0]).close_segment(1);
        let mut m = TransitionModel::new(settings(Strategy::Segment));
        assert!(matches!(
            m.apply_global_feedback(&seg, &params(1.0)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn reinforce_segment_keeps_counts() {
        let log = log_of(&[0.0, 0.0, 1.0]);
        let mut m = TransitionModel::new(settings(Strategy::TransitionMap));
        for i in 1..=log.len() {
            m.observe(&log.records()[..i], &params(1.0)).unwrap();
        }
        assert!(m.evidence_counts().all(|(_, _, c)| c == 1));
        assert!(m.utilities().all(|(_, _, u)| u == 1.0));
    }

    #[test]
    fn predict_successors_orders_by_prospect() {
        let mut m = TransitionModel::new(settings(Strategy::TransitionMap));
        let w = window(&state(0, 0));
        assert!(m.predict_successors(&w).is_empty());
        let only = state(1, 3);
        m.learn_transition(&w, &only, None, 0.0, &params(1.0)).unwrap();
        let p = m.predict_successors(&w);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].probability, 1.0);

        // (U, P) = (10, 1/3) and (4, 2/3): 3.33 > 2.67
        let mut m = TransitionModel::new(settings(Strategy::TransitionMap));
        let (big, safe) = (state(1, 5), state(1, 2));
        let mut set = |s: &StateVector<f64>, u: f64, n: usize| {
            for _ in 0..n {
                let e = m.count(w.key().unwrap(), s);
                e.utility = u;
            }
        };
        set(&big, 10.0, 1);
        set(&safe, 4.0, 2);
        let p = m.predict_successors(&w);
        assert_eq!(p[0].key, StateKey::of(&big));
        assert_eq!(p[1].key, StateKey::of(&safe));
    }

    #[test]
    fn novelty_decays_with_visits() {
        let mut m = TransitionModel::new(settings(Strategy::TransitionMap));
        let s = state(1, 1);
        assert_eq!(m.novelty(&s), 1.0);
        let w = window(&state(0, 0));
        m.learn_transition(&w, &s, None, 0.0, &params(1.0)).unwrap();
        assert_eq!(m.novelty(&s), 0.5);
        m.learn_transition(&w, &s, None, 0.0, &params(1.0)).unwrap();
        m.learn_transition(&w, &s, None, 0.0, &params(1.0)).unwrap();
        assert_eq!(m.novelty(&s), 0.25);
    }

    #[test]
    fn expectedness_examples() {
        let sc = crate::need::StateSchema::new(
            (0..2)
                .map(|i| crate::need::FeelingVar {
                    name: format!("f{i}"),
                    cardinality: 3,
                })
                .collect(),
            vec!["a".into(), "b".into()],
            vec![],
        )
        .unwrap();
        let s = sc.state::<f64>(0, vec![1, 2], vec![true, false], vec![]).unwrap();
        let half = sc.state::<f64>(0, vec![0, 2], vec![true, true], vec![]).unwrap();
        assert_eq!(expectedness(Some(&s), &s), 1.0);
        assert_eq!(expectedness(None, &s), 0.0);
        assert_eq!(expectedness(Some(&half), &s), 0.5);
    }

    #[test]
    fn action_keying_merges_successors() {
        let mut m = TransitionModel::new(ModelSettings {
            keying: SuccessorKeying::Action,
            ..settings(Strategy::TransitionMap)
        });
        let w = window(&state(0, 0));
        // positions 2 and 4 share the same (false) action
        m.learn_transition(&w, &state(1, 2), None, 0.0, &params(1.0))
            .unwrap();
        m.learn_transition(&w, &state(1, 4), None, 0.0, &params(1.0))
            .unwrap();
        m.learn_transition(&w, &state(1, 3), None, 0.0, &params(1.0))
            .unwrap();
        assert_eq!(m.len(), 2);
        let p = m.predict_successors(&w);
        assert_eq!(p.iter().map(|p| p.probability).sum::<f64>(), 1.0);
    }

    #[test]
    fn rebuild_examples() {
        let empty = EpisodeLog::new();
        let m = TransitionModel::rebuild_from_log(&empty, settings(Strategy::Segment), &params(1.0)).unwrap();
        assert!(m.is_empty());

        let log = log_of(&[0.0, 1.0, 0.0, 0.0, -1.0, 0.0]);
        for strategy in [Strategy::Segment, Strategy::TransitionMap] {
            let mut live = TransitionModel::new(settings(strategy));
            for i in 1..=log.len() {
                live.observe(&log.records()[..i], &params(0.5)).unwrap();
            }
            let rebuilt = TransitionModel::rebuild_from_log(&log, settings(strategy), &params(0.5)).unwrap();
            assert_eq!(live.difference(&rebuilt, 0.0), None);
        }

        let bad = LearningParams::new(PriorityProfile::new(vec![1.0, 1.0], 0.0).unwrap(), 0.0, 1.0).unwrap();
        assert!(matches!(
            TransitionModel::rebuild_from_log(&log, settings(Strategy::Segment), &bad),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn tables_round_trip() {
        let log = log_of(&[0.0, 1.0, 0.0, -1.0]);
        let m =
            TransitionModel::rebuild_from_log(&log, settings(Strategy::TransitionMap), &params(0.5)).unwrap();
        let back = TransitionModel::from_tables(&m.to_tables(&params(0.5))).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn params_validation() {
        let x = PriorityProfile::new(vec![1.0], 0.0).unwrap();
        assert!(LearningParams::new(x.clone(), 0.0, 0.0).is_err());
        assert!(LearningParams::new(x.clone(), 0.0, 1.5).is_err());
        assert!(LearningParams::new(x, -1.0, 0.5).is_err());
    }
}
