//! Prospected-utility decision rule over the recorded successors of the
//! current history, with epsilon exploration over admissible actions.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::HistoryWindow;
use crate::model::{Prediction, TransitionModel};
use crate::need::{check_constraints, ConstraintMatrices, StateKey, StateVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyMode {
    /// argmax `U * P`.
    #[default]
    Prospected,
    /// argmax `U`.
    UtilityOnly,
    /// argmax over `(U, P)` with `U` primary.
    Lexicographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionPolicy {
    pub mode: PolicyMode,
    pub exploration_rate: f64,
}

impl DecisionPolicy {
    pub fn new(mode: PolicyMode, exploration_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&exploration_rate) {
            return Err(Error::config("exploration_rate", "must lie in [0, 1]"));
        }
        Ok(DecisionPolicy {
            mode,
            exploration_rate,
        })
    }

    pub fn greedy(mode: PolicyMode) -> Self {
        DecisionPolicy {
            mode,
            exploration_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision<S: Scalar> {
    pub chosen_action: Vec<bool>,
    pub expected_state: Option<StateVector<S>>,
    pub score: S,
    pub explored: bool,
}

/// Primary score of a candidate. In lexicographic mode `P` only breaks ties
/// and the score is `U`.
pub fn score<S: Scalar>(utility: S, probability: S, mode: PolicyMode) -> S {
    match mode {
        PolicyMode::Prospected => utility * probability,
        PolicyMode::UtilityOnly | PolicyMode::Lexicographic => utility,
    }
}

/// Total preference order: `Greater` means `a` is preferred over `b`.
/// Equal scores fall back to the smaller successor key.
pub fn preference<S: Scalar>(a: (S, S, &StateKey), b: (S, S, &StateKey), mode: PolicyMode) -> Ordering {
    let by = |x: S, y: S| x.partial_cmp(&y).unwrap_or(Ordering::Equal);
    let primary = by(score(a.0, a.1, mode), score(b.0, b.1, mode));
    let secondary = if mode == PolicyMode::Lexicographic {
        by(a.1, b.1)
    } else {
        Ordering::Equal
    };
    primary.then(secondary).then_with(|| b.2.cmp(a.2))
}

fn rank<'a, S: Scalar>(
    candidates: impl Iterator<Item = &'a Prediction<S>>,
    mode: PolicyMode,
) -> Option<&'a Prediction<S>> {
    candidates.max_by(|a, b| {
        preference(
            (a.utility, a.probability, &a.key),
            (b.utility, b.probability, &b.key),
            mode,
        )
    })
}

/// Every action vector that keeps `current` within the constraints, in
/// binary counting order (all-false first).
pub fn admissible_actions<S: Scalar>(
    current: &StateVector<S>,
    constraints: &ConstraintMatrices,
) -> Result<Vec<Vec<bool>>> {
    let n = current.actions().len();
    if n > 16 {
        return Err(Error::schema(format!(
            "{n} action variables is too many to enumerate"
        )));
    }
    Ok((0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| check_constraints(&current.clone().with_actions(a), constraints))
        .collect())
}

pub fn decide<S: Scalar, R: Rng + ?Sized>(
    model: &TransitionModel<S>,
    history: &HistoryWindow<S>,
    constraints: &ConstraintMatrices,
    policy: &DecisionPolicy,
    rng: &mut R,
) -> Result<Decision<S>> {
    let current = history
        .latest()
        .ok_or_else(|| Error::usage("decision on an empty history"))?;
    let admissible = admissible_actions(current, constraints)?;
    if admissible.is_empty() {
        return Err(Error::Decision(format!(
            "no action satisfies the constraints at tick {}",
            current.tick()
        )));
    }
    let candidates: Vec<Prediction<S>> = model
        .predict_successors(history)
        .into_iter()
        .filter(|p| admissible.iter().any(|a| a.as_slice() == p.state.actions()))
        .collect();

    let explore = policy.exploration_rate > 0.0 && rng.gen::<f64>() < policy.exploration_rate;
    if !explore {
        if let Some(best) = rank(candidates.iter(), policy.mode) {
            return Ok(Decision {
                chosen_action: best.state.actions().to_vec(),
                expected_state: Some(best.state.clone()),
                score: score(best.utility, best.probability, policy.mode),
                explored: false,
            });
        }
    }

    let action = admissible[rng.gen_range(0..admissible.len())].clone();
    let expected = rank(
        candidates
            .iter()
            .filter(|p| p.state.actions() == action.as_slice()),
        policy.mode,
    );
    Ok(Decision {
        chosen_action: action,
        score: expected.map_or(S::zero(), |p| score(p.utility, p.probability, policy.mode)),
        expected_state: expected.map(|p| p.state.clone()),
        explored: true,
    })
}
