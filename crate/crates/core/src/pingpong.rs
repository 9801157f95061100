//! Single-player ping-pong against the opposite wall, behind a general
//! environment contract.
//!
//! The board is a `width x height` grid with the wall on row 0 and the
//! racket on the bottom row `height - 1`. The ball moves one cell
//! diagonally per tick and reflects off the side walls and the top wall.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{expectedness, TransitionModel};
use crate::need::{energy_spent, ActionCost, ConstraintMatrices, FeelingVar, StateSchema, StateVector};
use crate::scalar::Scalar;

/// Scored outcome of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Event {
    None,
    Hit,
    Miss,
}

/// What an environment reports after a reset or a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<S: Scalar> {
    pub feelings: Vec<u32>,
    /// Action registered this tick (all false after a reset).
    pub actions: Vec<bool>,
    /// Outcome of this step. Scored before any feedback delay.
    pub event: Event,
    /// Explicit feedback delivered this tick.
    pub feedback: S,
    pub energy: S,
}

/// A world the agent loop can drive.
pub trait Environment<S: Scalar> {
    fn schema(&self) -> &StateSchema;

    fn constraints(&self) -> &ConstraintMatrices;

    fn reset(&mut self, seed: u64) -> Observation<S>;

    fn step(&mut self, action: &[bool]) -> Result<Observation<S>>;

    /// Turns an observation into a full state, filling the need partition
    /// from the environment's own signals and the agent's model.
    fn sense(
        &mut self,
        obs: &Observation<S>,
        tick: u64,
        model: &TransitionModel<S>,
        predicted: Option<&StateVector<S>>,
    ) -> Result<StateVector<S>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoardConfig {
    #[serde(default = "BoardConfig::default_width")]
    pub width: u32,
    #[serde(default = "BoardConfig::default_height")]
    pub height: u32,
    #[serde(default = "BoardConfig::default_racket_width")]
    pub racket_width: u32,
    /// Ticks between a hit or miss and delivery of its feedback.
    #[serde(default)]
    pub delay: u32,
}

impl BoardConfig {
    fn default_width() -> u32 {
        6
    }

    fn default_height() -> u32 {
        5
    }

    fn default_racket_width() -> u32 {
        1
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(Error::config("board.width", "must be at least 2"));
        }
        if self.height < 2 {
            return Err(Error::config("board.height", "must be at least 2"));
        }
        if self.racket_width == 0 || self.racket_width > self.width {
            return Err(Error::config("board.racket_width", "must lie in [1, width]"));
        }
        Ok(())
    }

    fn racket_positions(&self) -> u32 {
        self.width - self.racket_width + 1
    }
}

impl Default for BoardConfig {
    fn default() -> Self {
        BoardConfig {
            width: Self::default_width(),
            height: Self::default_height(),
            racket_width: Self::default_racket_width(),
            delay: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::Left, Move::Right, Move::Stay];

    /// Decodes the `[left, right]` action partition.
    pub fn from_actions(actions: &[bool]) -> Result<Self> {
        match actions {
            [false, false] => Ok(Move::Stay),
            [true, false] => Ok(Move::Left),
            [false, true] => Ok(Move::Right),
            _ => Err(Error::usage(format!("invalid ping-pong action {actions:?}"))),
        }
    }

    pub fn to_actions(self) -> [bool; 2] {
        match self {
            Move::Left => [true, false],
            Move::Right => [false, true],
            Move::Stay => [false, false],
        }
    }

    fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::Stay => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    config: BoardConfig,
    pub ball_col: u32,
    pub ball_row: u32,
    pub dcol: i8,
    pub drow: i8,
    pub racket: u32,
}

impl Board {
    /// Board with the racket centred and a ball served from the top.
    pub fn new<R: Rng + ?Sized>(config: BoardConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let mut board = Board {
            config,
            ball_col: 0,
            ball_row: 0,
            dcol: 1,
            drow: 1,
            racket: (config.width - config.racket_width) / 2,
        };
        board.serve(rng);
        Ok(board)
    }

    /// Board in an explicit position. Velocity components must be +-1.
    pub fn with_ball(config: BoardConfig, ball: (u32, u32), velocity: (i8, i8), racket: u32) -> Result<Self> {
        config.validate()?;
        if ball.0 >= config.width || ball.1 >= config.height {
            return Err(Error::usage(format!("ball {ball:?} outside the board")));
        }
        if velocity.0.abs() != 1 || velocity.1.abs() != 1 {
            return Err(Error::usage(format!(
                "velocity {velocity:?} must be +-1 per axis"
            )));
        }
        if racket >= config.racket_positions() {
            return Err(Error::usage(format!("racket column {racket} outside the board")));
        }
        Ok(Board {
            config,
            ball_col: ball.0,
            ball_row: ball.1,
            dcol: velocity.0,
            drow: velocity.1,
            racket,
        })
    }

    pub fn config(&self) -> &BoardConfig {
        &self.config
    }

    fn serve<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let w = self.config.width;
        self.ball_col = rng.gen_range(0..w);
        self.ball_row = 0;
        self.drow = 1;
        self.dcol = if self.ball_col == 0 {
            1
        } else if self.ball_col == w - 1 {
            -1
        } else if rng.gen_bool(0.5) {
            1
        } else {
            -1
        };
    }

    pub fn covers(&self, col: u32) -> bool {
        col >= self.racket && col < self.racket + self.config.racket_width
    }

    /// Moves the racket, then the ball. Misses re-serve from the top using
    /// `rng`.
    pub fn step<R: Rng + ?Sized>(&mut self, mv: Move, rng: &mut R) -> Event {
        let max_racket = i64::from(self.config.racket_positions() - 1);
        self.racket = (i64::from(self.racket) + mv.delta()).clamp(0, max_racket) as u32;

        let (w, h) = (i64::from(self.config.width), i64::from(self.config.height));
        let col = (i64::from(self.ball_col) + i64::from(self.dcol)).clamp(0, w - 1);
        let row = (i64::from(self.ball_row) + i64::from(self.drow)).clamp(0, h - 1);
        self.ball_col = col as u32;
        self.ball_row = row as u32;
        if col == 0 {
            self.dcol = 1;
        } else if col == w - 1 {
            self.dcol = -1;
        }
        if row == 0 {
            self.drow = 1;
        }
        if row == h - 1 {
            if self.covers(self.ball_col) {
                self.drow = -1;
                return Event::Hit;
            }
            self.serve(rng);
            return Event::Miss;
        }
        Event::None
    }

    /// Quantized view: ball column, ball row, horizontal and vertical
    /// direction (0 = negative, 1 = positive), racket column.
    pub fn feelings(&self) -> Vec<u32> {
        vec![
            self.ball_col,
            self.ball_row,
            u32::from(self.dcol > 0),
            u32::from(self.drow > 0),
            self.racket,
        ]
    }

    /// One character per cell: `o` ball, `=` racket, `.` empty.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in 0..self.config.height {
            for col in 0..self.config.width {
                let c = if (col, row) == (self.ball_col, self.ball_row) {
                    'o'
                } else if row == self.config.height - 1 && self.covers(col) {
                    '='
                } else {
                    '.'
                };
                out.push(c);
            }
            out.push('\n');
        }
        out
    }
}

pub const NEED_NAMES: [&str; 4] = ["happy", "sad", "novelty", "expectedness"];
pub const HAPPY_GROWTH: f64 = 0.1;
pub const SAD_DECAY: f64 = 0.5;

pub fn pingpong_schema(config: &BoardConfig) -> StateSchema {
    let f = |name: &str, cardinality: u32| FeelingVar {
        name: name.into(),
        cardinality,
    };
    StateSchema::new(
        vec![
            f("ball_col", config.width),
            f("ball_row", config.height),
            f("ball_dcol", 2),
            f("ball_drow", 2),
            f("racket_col", config.racket_positions()),
        ],
        vec!["left".into(), "right".into()],
        NEED_NAMES.iter().map(|s| s.to_string()).collect(),
    )
    .expect("static ping-pong schema is valid")
}

/// The ping-pong world with its feedback queue and need channels.
#[derive(Debug, Clone)]
pub struct PingPong<S: Scalar> {
    board: Board,
    schema: StateSchema,
    constraints: ConstraintMatrices,
    costs: ActionCost<S>,
    rng: ChaCha8Rng,
    tick: u64,
    /// (delivery tick, feedback) in delivery order.
    pending: VecDeque<(u64, S)>,
    ticks_since_hit: u32,
    sad: S,
}

impl<S: Scalar> PingPong<S> {
    pub fn new(config: BoardConfig) -> Result<Self> {
        config.validate()?;
        let schema = pingpong_schema(&config);
        let mut constraints = ConstraintMatrices::empty(schema.len());
        let (l, r) = (
            schema.index_of("left").expect("left action"),
            schema.index_of("right").expect("right action"),
        );
        constraints.exclude(l, r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        Ok(PingPong {
            board: Board::new(config, &mut rng)?,
            schema,
            constraints,
            costs: ActionCost::new(vec![S::one(), S::one()])?,
            rng,
            tick: 0,
            pending: VecDeque::new(),
            ticks_since_hit: 0,
            sad: S::zero(),
        })
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn action_costs(&self) -> &ActionCost<S> {
        &self.costs
    }

    /// Feedback scheduled but not yet delivered.
    pub fn pending_feedback(&self) -> usize {
        self.pending.len()
    }

    pub fn render(&self) -> String {
        self.board.render()
    }

    fn happy(&self) -> S {
        S::lit((HAPPY_GROWTH * f64::from(self.ticks_since_hit)).min(1.0))
    }
}

impl<S: Scalar> Environment<S> for PingPong<S> {
    fn schema(&self) -> &StateSchema {
        &self.schema
    }

    fn constraints(&self) -> &ConstraintMatrices {
        &self.constraints
    }

    fn reset(&mut self, seed: u64) -> Observation<S> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.board = Board::new(*self.board.config(), &mut self.rng).expect("validated config");
        self.tick = 0;
        self.pending.clear();
        self.ticks_since_hit = 0;
        self.sad = S::zero();
        Observation {
            feelings: self.board.feelings(),
            actions: vec![false, false],
            event: Event::None,
            feedback: S::zero(),
            energy: S::zero(),
        }
    }

    fn step(&mut self, action: &[bool]) -> Result<Observation<S>> {
        let mv = Move::from_actions(action)?;
        let event = self.board.step(mv, &mut self.rng);
        let due = self.tick + u64::from(self.board.config().delay);
        match event {
            Event::Hit => self.pending.push_back((due, S::one())),
            Event::Miss => self.pending.push_back((due, -S::one())),
            Event::None => {}
        }
        let mut feedback = S::zero();
        while let Some(&(at, f)) = self.pending.front() {
            if at > self.tick {
                break;
            }
            feedback = feedback + f;
            self.pending.pop_front();
        }
        self.tick += 1;
        Ok(Observation {
            feelings: self.board.feelings(),
            actions: action.to_vec(),
            event,
            feedback,
            energy: energy_spent(action, &self.costs)?,
        })
    }

    /// Happy resets to 0 on positive feedback and otherwise grows by 0.1 per
    /// tick up to 1; Sad jumps to 1 on negative feedback and halves every
    /// other tick; Novelty comes from the model; the Expectedness need is
    /// `1 - expectedness` of the prediction.
    fn sense(
        &mut self,
        obs: &Observation<S>,
        tick: u64,
        model: &TransitionModel<S>,
        predicted: Option<&StateVector<S>>,
    ) -> Result<StateVector<S>> {
        if obs.feedback > S::zero() {
            self.ticks_since_hit = 0;
        } else if tick > 0 {
            self.ticks_since_hit = self.ticks_since_hit.saturating_add(1);
        }
        if obs.feedback < S::zero() {
            self.sad = S::one();
        } else {
            self.sad = self.sad * S::lit(SAD_DECAY);
        }
        let zeros = vec![S::zero(); NEED_NAMES.len()];
        let bare = self
            .schema
            .state(tick, obs.feelings.clone(), obs.actions.clone(), zeros)?;
        let novelty = model.novelty(&bare);
        let surprise = S::one() - expectedness(predicted, &bare);
        self.schema.state(
            tick,
            obs.feelings.clone(),
            obs.actions.clone(),
            vec![self.happy(), self.sad, novelty, surprise],
        )
    }
}

/// Hit rate under uniformly random moves, or `None` when the run produced
/// no bottom-row events.
pub fn random_baseline(config: &BoardConfig, seed: u64, n_ticks: u64) -> Result<Option<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut board = Board::new(*config, &mut rng)?;
    let (mut hits, mut events) = (0u64, 0u64);
    for _ in 0..n_ticks {
        let mv = Move::ALL[rng.gen_range(0..Move::ALL.len())];
        match board.step(mv, &mut rng) {
            Event::Hit => {
                hits += 1;
                events += 1;
            }
            Event::Miss => events += 1,
            Event::None => {}
        }
    }
    Ok((events > 0).then(|| hits as f64 / events as f64))
}

/// Renders `frames` boards separated by blank lines.
pub fn render_frames<'a>(frames: impl IntoIterator<Item = &'a Board>) -> String {
    let mut out = String::new();
    for (i, b) in frames.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(out, "{}", b.render());
    }
    out
}
