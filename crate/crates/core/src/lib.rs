//! Need-driven experiential learning agent.
//!
//! An agent lives in a state space partitioned into feelings, actions and
//! need actualizations. A constant priority profile turns changes in need
//! actualization into reinforcement, which is learned into a transition
//! graph of utilities and evidence counts. Decisions pick the recorded
//! successor with the best prospected utility `U * P`.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the harness and the CLI use.

pub mod decision;
pub mod error;
pub mod harness;
pub mod memory;
pub mod model;
pub mod need;
pub mod pingpong;
pub mod scalar;
pub mod snapshot;

pub use decision::{decide, score, Decision, DecisionPolicy, PolicyMode};
pub use error::{Error, Result};
pub use memory::{EpisodeLog, HistoryWindow, Segment, TransitionRecord};
pub use model::{expectedness, LearningParams, ModelSettings, Strategy, SuccessorKeying, TransitionModel};
pub use need::{
    check_constraints, energy_spent, motivation, reinforcement, state_distance, state_key, ActionCost,
    ConstraintMatrices, FeelingVar, HistoryKey, MotivationVector, PriorityProfile, StateKey, StateSchema,
    StateVector,
};
pub use pingpong::{random_baseline, Board, BoardConfig, Environment, Event, Move, PingPong};
pub use scalar::Scalar;
pub use snapshot::{load_snapshot, save_snapshot, MemorySnapshot, SNAPSHOT_VERSION};

pub type State = StateVector<f64>;
pub type Priority = PriorityProfile<f64>;
pub type Motivation = MotivationVector<f64>;
pub type Record = TransitionRecord<f64>;
pub type Log = EpisodeLog<f64>;
pub type Window = HistoryWindow<f64>;
pub type Model = TransitionModel<f64>;
pub type Params = LearningParams<f64>;
pub type Snapshot = MemorySnapshot<f64>;
pub type Game = PingPong<f64>;
