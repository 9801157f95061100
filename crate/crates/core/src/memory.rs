//! Long-term episodic memory and the short-term history window.
//!
//! The log is append-only apart from garbage collection. Segments are not
//! stored; they are derived from the explicit feedback carried by each
//! record, so closing a segment never rewrites history.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TransitionModel;
use crate::need::{state_key, HistoryKey, StateVector};
use crate::scalar::Scalar;

/// One tick of experience: the state, what was committed and expected, and
/// what came back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TransitionRecord<S: Scalar> {
    pub tick: u64,
    pub state: StateVector<S>,
    pub chosen_action: Vec<bool>,
    pub predicted_next: Option<StateVector<S>>,
    /// The state actually reached at `tick + 1`.
    pub next_state: StateVector<S>,
    /// `x . (y_t - y_{t+1})` for this transition.
    pub reinforcement: S,
    /// Explicit environment feedback delivered on this transition; non-zero
    /// values close a segment.
    pub feedback: S,
    pub energy: S,
    #[serde(default)]
    pub explored: bool,
}

impl<S: Scalar> TransitionRecord<S> {
    pub fn closes_segment(&self) -> bool {
        self.feedback != S::zero()
    }
}

/// The most recent states, oldest first, bounded by the window size `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryWindow<S: Scalar> {
    capacity: usize,
    states: VecDeque<StateVector<S>>,
}

impl<S: Scalar> HistoryWindow<S> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::usage("history window size must be at least 1"));
        }
        Ok(HistoryWindow {
            capacity,
            states: VecDeque::with_capacity(capacity),
        })
    }

    /// Builds a window from the last `capacity` of `states`.
    pub fn from_states<I>(capacity: usize, states: I) -> Result<Self>
    where
        I: IntoIterator<Item = StateVector<S>>,
    {
        let mut w = Self::new(capacity)?;
        for s in states {
            w.push(s);
        }
        Ok(w)
    }

    pub fn push(&mut self, s: StateVector<S>) {
        if self.states.len() == self.capacity {
            self.states.pop_front();
        }
        self.states.push_back(s);
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl DoubleEndedIterator<Item = &StateVector<S>> + ExactSizeIterator {
        self.states.iter()
    }

    pub fn latest(&self) -> Option<&StateVector<S>> {
        self.states.back()
    }

    pub fn key(&self) -> Result<HistoryKey> {
        state_key(self.states.iter())
    }
}

/// A contiguous run of records ending at (and including) a record with
/// explicit feedback, or the open tail of the log.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S: Scalar> {
    pub records: Vec<TransitionRecord<S>>,
    /// States immediately preceding the first record, oldest first, so that
    /// every record's history window can be rebuilt.
    pub lead_in: Vec<StateVector<S>>,
    pub terminal_reinforcement: Option<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn is_closed(&self) -> bool {
        self.terminal_reinforcement.is_some()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Pairs every record with its history window of size `window_size`.
    pub fn transitions(&self, window_size: usize) -> Result<Vec<(HistoryWindow<S>, &TransitionRecord<S>)>> {
        let mut w = HistoryWindow::from_states(window_size, self.lead_in.iter().cloned())?;
        let mut out = Vec::with_capacity(self.records.len());
        let mut prev_tick = self.lead_in.last().map(|s| s.tick());
        for rec in &self.records {
            if prev_tick.is_some_and(|p| p + 1 != rec.tick) {
                w = HistoryWindow::new(window_size)?;
            }
            w.push(rec.state.clone());
            prev_tick = Some(rec.tick);
            out.push((w.clone(), rec));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", transparent)]
pub struct EpisodeLog<S: Scalar> {
    records: Vec<TransitionRecord<S>>,
}

impl<S: Scalar> EpisodeLog<S> {
    pub fn new() -> Self {
        EpisodeLog { records: Vec::new() }
    }

    /// Accepts an existing record list, checking tick order.
    pub fn from_records(records: Vec<TransitionRecord<S>>) -> Result<Self> {
        if let Some(w) = records.windows(2).find(|w| w[0].tick >= w[1].tick) {
            return Err(Error::usage(format!(
                "log ticks not increasing: {} then {}",
                w[0].tick, w[1].tick
            )));
        }
        Ok(EpisodeLog { records })
    }

    pub fn records(&self) -> &[TransitionRecord<S>] {
        &self.records
    }

    pub fn into_records(self) -> Vec<TransitionRecord<S>> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_tick(&self) -> Option<u64> {
        self.records.last().map(|r| r.tick)
    }

    pub fn record(&mut self, rec: TransitionRecord<S>) -> Result<()> {
        if let Some(last) = self.last_tick() {
            if rec.tick != last + 1 {
                return Err(Error::usage(format!(
                    "record tick {} does not follow last tick {last}",
                    rec.tick
                )));
            }
        }
        self.records.push(rec);
        Ok(())
    }

    /// The last `min(T, len)` states, stopping early at a tick gap.
    pub fn window(&self, window_size: usize) -> Result<HistoryWindow<S>> {
        match self.records.len() {
            0 => HistoryWindow::new(window_size),
            n => window_at(&self.records, n - 1, window_size),
        }
    }

    /// The trailing segment: closed if the last record carries feedback,
    /// otherwise the open tail (possibly empty).
    pub fn close_segment(&self, window_size: usize) -> Segment<S> {
        trailing_segment(&self.records, window_size)
    }

    /// Index of the first record of the open segment.
    pub fn open_segment_start(&self) -> usize {
        open_start(&self.records)
    }

    /// Every closed segment in order followed by the open tail.
    pub fn segments(&self, window_size: usize) -> Vec<Segment<S>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, rec) in self.records.iter().enumerate() {
            if rec.closes_segment() {
                out.push(build_segment(&self.records, start, i + 1, window_size));
                start = i + 1;
            }
        }
        out.push(build_segment(
            &self.records,
            start,
            self.records.len(),
            window_size,
        ));
        out
    }

    /// Drops records at least `horizon` ticks older than the latest record
    /// whose transition has model evidence below `min_trust`. Records of the
    /// open segment are always kept and the model is left untouched.
    /// `None` stands for an infinite horizon or threshold. Returns the
    /// number of records removed.
    pub fn garbage_collect(
        &mut self,
        horizon: Option<u64>,
        min_trust: Option<u64>,
        model: &TransitionModel<S>,
    ) -> Result<usize> {
        let Some(horizon) = horizon else {
            return Ok(0);
        };
        let Some(latest) = self.last_tick() else {
            return Ok(0);
        };
        let open = self.open_segment_start();
        let t = model.settings().window_size;
        let mut keep = Vec::with_capacity(self.records.len());
        for (i, rec) in self.records.iter().enumerate() {
            let outdated = latest - rec.tick >= horizon;
            let low_trust = || -> Result<bool> {
                let w = window_at(&self.records, i, t)?;
                let c = model.evidence(&w.key()?, &model.successor_key(&rec.next_state));
                Ok(min_trust.is_none_or(|m| c < m))
            };
            keep.push(i >= open || !outdated || !low_trust()?);
        }
        let before = self.records.len();
        let mut flags = keep.into_iter();
        self.records.retain(|_| flags.next().unwrap_or(true));
        Ok(before - self.records.len())
    }
}

pub(crate) fn open_start<S: Scalar>(records: &[TransitionRecord<S>]) -> usize {
    records
        .iter()
        .rposition(TransitionRecord::closes_segment)
        .map_or(0, |i| i + 1)
}

/// History window ending at `records[idx].state`, restricted to
/// consecutive ticks.
pub(crate) fn window_at<S: Scalar>(
    records: &[TransitionRecord<S>],
    idx: usize,
    window_size: usize,
) -> Result<HistoryWindow<S>> {
    let mut start = idx;
    while start > 0 && idx - start + 1 < window_size && records[start - 1].tick + 1 == records[start].tick {
        start -= 1;
    }
    HistoryWindow::from_states(window_size, records[start..=idx].iter().map(|r| r.state.clone()))
}

pub(crate) fn trailing_segment<S: Scalar>(records: &[TransitionRecord<S>], window_size: usize) -> Segment<S> {
    match records.last() {
        Some(last) if last.closes_segment() => {
            let start = open_start(&records[..records.len() - 1]);
            build_segment(records, start, records.len(), window_size)
        }
        _ => build_segment(records, open_start(records), records.len(), window_size),
    }
}

fn build_segment<S: Scalar>(
    records: &[TransitionRecord<S>],
    start: usize,
    end: usize,
    window_size: usize,
) -> Segment<S> {
    let slice = &records[start..end];
    let terminal = slice
        .last()
        .filter(|r| r.closes_segment())
        .map(|r| r.reinforcement);
    let mut lead = start;
    // an empty tail starting past the end continues the last record
    while lead > 0
        && start - lead < window_size.saturating_sub(1)
        && records
            .get(lead)
            .is_none_or(|r| records[lead - 1].tick + 1 == r.tick)
    {
        lead -= 1;
    }
    Segment {
        records: slice.to_vec(),
        lead_in: records[lead..start].iter().map(|r| r.state.clone()).collect(),
        terminal_reinforcement: terminal,
    }
}
