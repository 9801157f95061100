//! State-space vocabulary: schemas, state vectors, priorities, motivation,
//! reinforcement and the exclusion/dependency constraints over variables.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeelingVar {
    pub name: String,
    pub cardinality: u32,
}

/// Names and ranges of the state variables of one run.
///
/// Variables are indexed feelings first, then actions, then needs. The
/// schema cannot be changed once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSchema {
    feelings: Vec<FeelingVar>,
    actions: Vec<String>,
    needs: Vec<String>,
}

impl StateSchema {
    pub fn new(feelings: Vec<FeelingVar>, actions: Vec<String>, needs: Vec<String>) -> Result<Self> {
        let schema = StateSchema {
            feelings,
            actions,
            needs,
        };
        schema.validate()?;
        Ok(schema)
    }

    /// Checks name uniqueness across partitions and feeling cardinalities.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for name in self.variable_names() {
            if !seen.insert(name) {
                return Err(Error::schema(format!("variable `{name}` declared twice")));
            }
        }
        if let Some(f) = self.feelings.iter().find(|f| f.cardinality == 0) {
            return Err(Error::schema(format!(
                "feeling `{}` has zero cardinality",
                f.name
            )));
        }
        Ok(())
    }

    pub fn feelings(&self) -> &[FeelingVar] {
        &self.feelings
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn needs(&self) -> &[String] {
        &self.needs
    }

    pub fn len(&self) -> usize {
        self.feelings.len() + self.actions.len() + self.needs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn variable_names(&self) -> impl Iterator<Item = &str> {
        self.feelings
            .iter()
            .map(|f| f.name.as_str())
            .chain(self.actions.iter().map(String::as_str))
            .chain(self.needs.iter().map(String::as_str))
    }

    /// Global variable index of `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variable_names().position(|n| n == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|n| n == name)
    }

    pub fn state<S: Scalar>(
        &self,
        tick: u64,
        feelings: Vec<u32>,
        actions: Vec<bool>,
        needs: Vec<S>,
    ) -> Result<StateVector<S>> {
        let s = StateVector {
            tick,
            feelings,
            actions,
            needs,
        };
        self.check(&s)?;
        Ok(s)
    }

    /// Verifies that `s` conforms to this schema.
    pub fn check<S: Scalar>(&self, s: &StateVector<S>) -> Result<()> {
        if s.feelings.len() != self.feelings.len()
            || s.actions.len() != self.actions.len()
            || s.needs.len() != self.needs.len()
        {
            return Err(Error::schema(format!(
                "state shape ({}, {}, {}) does not match schema ({}, {}, {})",
                s.feelings.len(),
                s.actions.len(),
                s.needs.len(),
                self.feelings.len(),
                self.actions.len(),
                self.needs.len()
            )));
        }
        for (var, &code) in self.feelings.iter().zip(&s.feelings) {
            if code >= var.cardinality {
                return Err(Error::schema(format!(
                    "feeling `{}` = {code} outside cardinality {}",
                    var.name, var.cardinality
                )));
            }
        }
        for (name, &v) in self.needs.iter().zip(&s.needs) {
            if !(v >= S::zero() && v <= S::one()) {
                return Err(Error::schema(format!("need `{name}` = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn check_profile<S: Scalar>(&self, x: &PriorityProfile<S>) -> Result<()> {
        if x.weights.len() != self.needs.len() {
            return Err(Error::schema(format!(
                "priority profile has {} weights for {} needs",
                x.weights.len(),
                self.needs.len()
            )));
        }
        Ok(())
    }
}

/// Snapshot of the agent's world at one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct StateVector<S: Scalar> {
    tick: u64,
    feelings: Vec<u32>,
    actions: Vec<bool>,
    needs: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn feelings(&self) -> &[u32] {
        &self.feelings
    }

    pub fn actions(&self) -> &[bool] {
        &self.actions
    }

    pub fn needs(&self) -> &[S] {
        &self.needs
    }

    pub fn with_tick(mut self, tick: u64) -> Self {
        self.tick = tick;
        self
    }

    /// Same state with the action partition replaced. Caller guarantees the
    /// length matches the schema.
    pub fn with_actions(mut self, actions: &[bool]) -> Self {
        debug_assert_eq!(actions.len(), self.actions.len());
        self.actions.clear();
        self.actions.extend_from_slice(actions);
        self
    }

    /// Number of discrete variables (feelings and actions).
    pub fn discrete_len(&self) -> usize {
        self.feelings.len() + self.actions.len()
    }

    fn discrete_codes(&self) -> impl Iterator<Item = u32> + '_ {
        self.feelings
            .iter()
            .copied()
            .chain(self.actions.iter().map(|&a| a as u32))
    }

    /// Whether the variable at global index `i` is active: a non-zero feeling
    /// code, a registered action or a positive need.
    pub fn is_active(&self, i: usize) -> bool {
        let nf = self.feelings.len();
        let na = self.actions.len();
        if i < nf {
            self.feelings[i] > 0
        } else if i < nf + na {
            self.actions[i - nf]
        } else {
            self.needs.get(i - nf - na).is_some_and(|&v| v > S::zero())
        }
    }
}

/// Constant per-need weights (the personality profile) plus the weight of
/// energy spent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PriorityProfile<S: Scalar> {
    weights: Vec<S>,
    energy_weight: S,
}

impl<S: Scalar> PriorityProfile<S> {
    pub fn new(weights: Vec<S>, energy_weight: S) -> Result<Self> {
        let bad = |v: S| v < S::zero() || !v.is_finite();
        if let Some(i) = weights.iter().position(|&w| bad(w)) {
            return Err(Error::schema(format!(
                "priority weight {i} must be finite and >= 0"
            )));
        }
        if bad(energy_weight) {
            return Err(Error::schema("energy weight must be finite and >= 0"));
        }
        Ok(PriorityProfile {
            weights,
            energy_weight,
        })
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn energy_weight(&self) -> S {
        self.energy_weight
    }

    pub fn scaled(&self, k: S) -> Result<Self> {
        Self::new(
            self.weights.iter().map(|&w| w * k).collect(),
            self.energy_weight * k,
        )
    }
}

/// Per-need motivation `z_i = x_i * y_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MotivationVector<S: Scalar>(pub Vec<S>);

impl<S: Scalar> MotivationVector<S> {
    /// Scalar reading of motivation, the plain dot product `x . y`.
    pub fn total(&self) -> S {
        self.0.iter().copied().sum()
    }
}

/// Energy cost of each action variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ActionCost<S: Scalar>(Vec<S>);

impl<S: Scalar> ActionCost<S> {
    pub fn new(costs: Vec<S>) -> Result<Self> {
        if let Some(i) = costs.iter().position(|&c| c < S::zero() || !c.is_finite()) {
            return Err(Error::schema(format!("action cost {i} must be finite and >= 0")));
        }
        Ok(ActionCost(costs))
    }

    pub fn costs(&self) -> &[S] {
        &self.0
    }
}

fn check_dims(what: &str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::schema(format!("{what}: dimension {a} != {b}")));
    }
    Ok(())
}

pub fn motivation<S: Scalar>(x: &PriorityProfile<S>, y: &[S]) -> Result<MotivationVector<S>> {
    check_dims("motivation", x.weights.len(), y.len())?;
    Ok(MotivationVector(
        x.weights.iter().zip(y).map(|(&w, &v)| w * v).collect(),
    ))
}

/// `r = x . (y_prev - y_next)`; positive when needs become more satisfied.
pub fn reinforcement<S: Scalar>(x: &PriorityProfile<S>, y_prev: &[S], y_next: &[S]) -> Result<S> {
    check_dims("reinforcement", x.weights.len(), y_prev.len())?;
    check_dims("reinforcement", y_prev.len(), y_next.len())?;
    Ok(x.weights
        .iter()
        .zip(y_prev.iter().zip(y_next))
        .map(|(&w, (&a, &b))| w * (a - b))
        .sum())
}

pub fn energy_spent<S: Scalar>(actions: &[bool], costs: &ActionCost<S>) -> Result<S> {
    check_dims("energy", actions.len(), costs.0.len())?;
    Ok(actions
        .iter()
        .zip(&costs.0)
        .filter(|(&a, _)| a)
        .map(|(_, &c)| c)
        .sum())
}

/// Normalized Hamming distance over the discrete variables (feelings and
/// actions). Needs are continuous outcome signals and are not compared.
pub fn state_distance<S: Scalar>(predicted: &StateVector<S>, actual: &StateVector<S>) -> Result<S> {
    check_dims(
        "state_distance feelings",
        predicted.feelings.len(),
        actual.feelings.len(),
    )?;
    check_dims(
        "state_distance actions",
        predicted.actions.len(),
        actual.actions.len(),
    )?;
    let n = predicted.discrete_len();
    if n == 0 {
        return Ok(S::zero());
    }
    let differ = predicted
        .discrete_codes()
        .zip(actual.discrete_codes())
        .filter(|(a, b)| a != b)
        .count();
    Ok(S::lit(differ as f64) / S::lit(n as f64))
}

/// Key of a single state over its discrete variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateKey(Vec<u32>);

impl StateKey {
    pub fn of<S: Scalar>(s: &StateVector<S>) -> Self {
        StateKey(s.discrete_codes().collect())
    }

    /// Key over the action partition only.
    pub fn of_actions<S: Scalar>(s: &StateVector<S>) -> Self {
        StateKey(s.actions.iter().map(|&a| a as u32).collect())
    }

    pub fn codes(&self) -> &[u32] {
        &self.0
    }
}

/// Key of an ordered window of states, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HistoryKey(Vec<u32>);

impl HistoryKey {
    pub fn codes(&self) -> &[u32] {
        &self.0
    }
}

fn write_codes(f: &mut fmt::Formatter<'_>, codes: &[u32]) -> fmt::Result {
    for (i, c) in codes.iter().enumerate() {
        if i > 0 {
            f.write_str(".")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_codes(f, &self.0)
    }
}

impl fmt::Display for HistoryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_codes(f, &self.0)
    }
}

/// Encodes a window of states. Within one schema every state contributes
/// the same number of codes, so the concatenation is injective.
pub fn state_key<'a, S: Scalar + 'a>(
    window: impl IntoIterator<Item = &'a StateVector<S>>,
) -> Result<HistoryKey> {
    let mut codes = Vec::new();
    let mut n = 0usize;
    for s in window {
        codes.extend(s.discrete_codes());
        n += 1;
    }
    if n == 0 {
        return Err(Error::usage("state_key of an empty window"));
    }
    // window length is folded in so that schemas without discrete variables
    // still separate windows of different length
    codes.push(n as u32);
    Ok(HistoryKey(codes))
}

/// Mutual exclusion (`Q`) and dependency (`M`) relations over global
/// variable indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintMatrices {
    size: usize,
    exclusion: BTreeSet<(usize, usize)>,
    dependency: BTreeSet<(usize, usize)>,
}

impl ConstraintMatrices {
    pub fn empty(size: usize) -> Self {
        ConstraintMatrices {
            size,
            ..Default::default()
        }
    }

    /// Builds from dense boolean matrices, validating symmetry of the
    /// exclusion matrix, its false diagonal, and disjointness of the two.
    pub fn from_dense(exclusion: &[Vec<bool>], dependency: &[Vec<bool>]) -> Result<Self> {
        let size = exclusion.len();
        if dependency.len() != size || exclusion.iter().chain(dependency).any(|row| row.len() != size) {
            return Err(Error::schema(
                "constraint matrices must both be square and equally sized",
            ));
        }
        let mut c = Self::empty(size);
        for i in 0..size {
            for j in 0..size {
                if exclusion[i][j] != exclusion[j][i] {
                    return Err(Error::schema(format!("exclusion not symmetric at ({i}, {j})")));
                }
                if exclusion[i][j] && j > i {
                    c.exclude(i, j)?;
                }
                if dependency[i][j] {
                    c.require(i, j)?;
                }
            }
            if exclusion[i][i] {
                return Err(Error::schema(format!("exclusion diagonal set at {i}")));
            }
        }
        Ok(c)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.size || j >= self.size {
            return Err(Error::schema(format!(
                "constraint pair ({i}, {j}) out of range for {} variables",
                self.size
            )));
        }
        if i == j {
            return Err(Error::schema(format!("constraint on variable {i} with itself")));
        }
        Ok(())
    }

    /// Marks `i` and `j` as mutually exclusive.
    pub fn exclude(&mut self, i: usize, j: usize) -> Result<&mut Self> {
        self.check_pair(i, j)?;
        if self.dependency.contains(&(i, j)) || self.dependency.contains(&(j, i)) {
            return Err(Error::schema(format!("pair ({i}, {j}) already a dependency")));
        }
        self.exclusion.insert((i.min(j), i.max(j)));
        Ok(self)
    }

    /// Marks that an active `i` requires `j` to be active.
    pub fn require(&mut self, i: usize, j: usize) -> Result<&mut Self> {
        self.check_pair(i, j)?;
        if self.excludes(i, j) {
            return Err(Error::schema(format!("pair ({i}, {j}) already an exclusion")));
        }
        self.dependency.insert((i, j));
        Ok(self)
    }

    pub fn excludes(&self, i: usize, j: usize) -> bool {
        self.exclusion.contains(&(i.min(j), i.max(j)))
    }

    pub fn requires(&self, i: usize, j: usize) -> bool {
        self.dependency.contains(&(i, j))
    }

    pub fn is_empty(&self) -> bool {
        self.exclusion.is_empty() && self.dependency.is_empty()
    }
}

pub fn check_constraints<S: Scalar>(s: &StateVector<S>, c: &ConstraintMatrices) -> bool {
    c.exclusion
        .iter()
        .all(|&(i, j)| !(s.is_active(i) && s.is_active(j)))
        && c.dependency
            .iter()
            .all(|&(i, j)| !s.is_active(i) || s.is_active(j))
}
