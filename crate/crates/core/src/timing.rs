//! Discrete-event execution of timed, stochastic and fuzzy-gated nets.
//!
//! Time is attached to transitions. When a transition becomes enabled its
//! input tokens are reserved at once and its output tokens are deposited
//! only when its delay has elapsed. Newly enabled transitions first sample
//! their delays and then reserve in order of due time, so among competitors
//! for the same tokens the earliest one wins the race and the others are
//! cancelled. Ties on the due time are settled by a weighted draw over the
//! conflict weights. Each transition has at most one firing in flight.
//!
//! A fuzzy gate is evaluated once per enabling. A failed gate leaves the
//! tokens in place and the transition stays quiet until it has been
//! disabled and enabled again.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{self, FuzzyError, FuzzyLabel, Shape};
use crate::net::{Marking, Net, TransitionId};

/// Generator used for every simulation.
pub type SimRng = ChaCha8Rng;

/// Identifier written into trace headers.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Trace format identifier.
pub const TRACE_FORMAT: &str = "causanet-trace/1";

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimingError {
    #[error("invalid delay: {0}")]
    InvalidDelay(String),
    #[error("conflict resolution needs at least one candidate")]
    NoCandidates,
    #[error("conflict weight {0} is not positive")]
    InvalidWeight(f64),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Delay {
    Immediate,
    Deterministic { delay: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Delay {
    pub fn check(&self) -> Result<(), String> {
        match *self {
            Delay::Immediate => Ok(()),
            Delay::Deterministic { delay } if delay.is_finite() && delay >= 0.0 => Ok(()),
            Delay::Deterministic { delay } => Err(format!("deterministic delay {delay} must be >= 0")),
            Delay::Exponential { rate } if rate.is_finite() && rate > 0.0 => Ok(()),
            Delay::Exponential { rate } => Err(format!("exponential rate {rate} must be > 0")),
            Delay::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi => Ok(()),
            Delay::Uniform { lo, hi } => Err(format!("uniform bounds ({lo}, {hi}) need 0 <= lo <= hi")),
        }
    }
}

/// Timing annotation of one transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSpec {
    pub delay: Delay,
    /// Linguistic probability that gates each enabling.
    pub gate: Option<FuzzyLabel>,
    /// Relative weight among simultaneous competitors.
    pub conflict_weight: f64,
}

impl Default for TimingSpec {
    fn default() -> Self {
        Self::immediate()
    }
}

impl TimingSpec {
    pub fn immediate() -> Self {
        TimingSpec {
            delay: Delay::Immediate,
            gate: None,
            conflict_weight: 1.0,
        }
    }

    pub fn deterministic(delay: f64) -> Self {
        TimingSpec {
            delay: Delay::Deterministic { delay },
            ..Self::immediate()
        }
    }

    pub fn exponential(rate: f64) -> Self {
        TimingSpec {
            delay: Delay::Exponential { rate },
            ..Self::immediate()
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        TimingSpec {
            delay: Delay::Uniform { lo, hi },
            ..Self::immediate()
        }
    }

    pub fn with_gate(mut self, label: FuzzyLabel) -> Self {
        self.gate = Some(label);
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.conflict_weight = weight;
        self
    }

    pub fn check(&self) -> Result<(), String> {
        self.delay.check()?;
        if !(self.conflict_weight.is_finite() && self.conflict_weight > 0.0) {
            return Err(format!("conflict weight {} must be > 0", self.conflict_weight));
        }
        if let Some(label) = &self.gate {
            if !matches!(label.shape, Shape::Crisp(_)) && label.mass() <= 0.0 {
                return Err(format!("gate label `{}` has zero membership mass", label.name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatePolicy {
    /// Pass with probability equal to the label centroid.
    #[default]
    Centroid,
    /// Draw a probability from the label's membership density, then pass with it.
    Sampled,
}

impl GatePolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            GatePolicy::Centroid => "centroid",
            GatePolicy::Sampled => "sampled",
        }
    }
}

impl fmt::Display for GatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GatePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "centroid" => Ok(GatePolicy::Centroid),
            "sampled" => Ok(GatePolicy::Sampled),
            other => Err(format!("unknown policy `{other}` (expected centroid|sampled)")),
        }
    }
}

/// Firing delay for one enabling. Only stochastic delays consume randomness.
pub fn sample_delay<R: Rng + ?Sized>(delay: &Delay, rng: &mut R) -> Result<f64, TimingError> {
    delay.check().map_err(TimingError::InvalidDelay)?;
    Ok(match *delay {
        Delay::Immediate => 0.0,
        Delay::Deterministic { delay } => delay,
        Delay::Exponential { rate } => {
            let exp = Exp::new(rate).map_err(|e| TimingError::InvalidDelay(e.to_string()))?;
            exp.sample(rng)
        }
        Delay::Uniform { lo, hi } if lo == hi => lo,
        Delay::Uniform { lo, hi } => rng.random_range(lo..=hi),
    })
}

/// Picks one candidate with probability proportional to its weight.
pub fn resolve_conflict<T: Clone, R: Rng + ?Sized>(candidates: &[(T, f64)], rng: &mut R) -> Result<T, TimingError> {
    if let Some(&(_, w)) = candidates.iter().find(|(_, w)| !(w.is_finite() && *w > 0.0)) {
        return Err(TimingError::InvalidWeight(w));
    }
    match candidates {
        [] => Err(TimingError::NoCandidates),
        [(only, _)] => Ok(only.clone()),
        _ => {
            let total: f64 = candidates.iter().map(|(_, w)| w).sum();
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            for (c, w) in candidates {
                acc += w;
                if target < acc {
                    return Ok(c.clone());
                }
            }
            Ok(candidates[candidates.len() - 1].0.clone())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOutcome {
    pub passed: bool,
    /// Probability the uniform draw was compared against.
    pub threshold: f64,
    pub u: f64,
}

/// Decides whether a fuzzily-qualified transition attempts to fire.
pub fn resolve_fuzzy_gate<R: Rng + ?Sized>(
    label: &FuzzyLabel,
    rng: &mut R,
    policy: GatePolicy,
) -> Result<GateOutcome, FuzzyError> {
    let threshold = match (policy, label.shape) {
        (_, Shape::Crisp(v)) => v,
        (GatePolicy::Centroid, _) => fuzzy::defuzzify_centroid(label)?,
        (GatePolicy::Sampled, _) => sample_from_membership(label, rng)?,
    };
    let u = rng.random::<f64>();
    Ok(GateOutcome {
        passed: u < threshold,
        threshold,
        u,
    })
}

/// Rejection sampling of the normalised membership function over its support.
fn sample_from_membership<R: Rng + ?Sized>(label: &FuzzyLabel, rng: &mut R) -> Result<f64, FuzzyError> {
    if label.mass() <= 0.0 {
        return Err(FuzzyError::ZeroMass(label.name.clone()));
    }
    let (lo, hi) = label.support();
    loop {
        let x = lo + (hi - lo) * rng.random::<f64>();
        let y = rng.random::<f64>();
        if y < fuzzy::membership(label, x)? {
            return Ok(x);
        }
    }
}

/// Randomness consumed, and reservations dropped, while advancing the net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "draw", rename_all = "snake_case")]
pub enum DrawRecord {
    Gate {
        transition: String,
        threshold: f64,
        u: f64,
        passed: bool,
    },
    Delay {
        transition: String,
        delay: f64,
    },
    Conflict {
        chosen: String,
        among: Vec<String>,
    },
    Cancelled {
        transition: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiringEvent {
    pub time: f64,
    pub transition: String,
    pub pre: Marking,
    pub post: Marking,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub draws: Vec<DrawRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Fired(FiringEvent),
    /// Nothing enabled and nothing in flight.
    Deadlock {
        draws: Vec<DrawRecord>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pending {
    pub transition: TransitionId,
    pub due: f64,
    pub reserved: Vec<(usize, u32)>,
    seq: u64,
}

/// Mutable simulation state: clock, free tokens, firings in flight, rng.
#[derive(Debug, Clone)]
pub struct SimState {
    clock: f64,
    available: Marking,
    pending: Vec<Pending>,
    gate_blocked: Vec<bool>,
    policy: GatePolicy,
    rng: SimRng,
    next_seq: u64,
}

impl SimState {
    pub fn new(net: &Net, seed: u64, policy: GatePolicy) -> Self {
        SimState {
            clock: 0.0,
            available: net.initial_marking().clone(),
            pending: Vec::new(),
            gate_blocked: vec![false; net.transitions().len()],
            policy,
            rng: rng_from_seed(seed),
            next_seq: 0,
        }
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn policy(&self) -> GatePolicy {
        self.policy
    }

    /// Tokens not held by any firing in flight.
    pub fn available(&self) -> &Marking {
        &self.available
    }

    pub fn pending(&self) -> &[Pending] {
        &self.pending
    }

    /// Tokens held by firings in flight, per place.
    pub fn reserved(&self) -> Marking {
        let mut r = Marking::zeros(self.available.len());
        for p in &self.pending {
            for &(place, w) in &p.reserved {
                r.0[place] += w;
            }
        }
        r
    }

    /// Marking of the untimed net: free plus reserved tokens.
    pub fn marking(&self) -> Marking {
        let mut m = self.available.clone();
        for p in &self.pending {
            for &(place, w) in &p.reserved {
                m.0[place] += w;
            }
        }
        m
    }

    fn busy(&self, t: TransitionId) -> bool {
        self.pending.iter().any(|p| p.transition == t)
    }

    fn reserve(&mut self, net: &Net, t: TransitionId, due: f64) {
        let reserved = net.inputs(t).to_vec();
        for &(p, w) in &reserved {
            self.available.0[p] -= w;
        }
        self.pending.push(Pending {
            transition: t,
            due,
            reserved,
            seq: self.next_seq,
        });
        self.next_seq += 1;
    }

    /// Can every transition of `group` reserve at once?
    fn fits_all(&self, net: &Net, group: &[(TransitionId, f64)]) -> bool {
        let mut demand = vec![0u64; self.available.len()];
        for &(t, _) in group {
            for &(p, w) in net.inputs(t) {
                demand[p] += w as u64;
            }
        }
        demand.iter().zip(self.available.counts()).all(|(d, a)| *d <= *a as u64)
    }

    fn schedule(&mut self, net: &Net, draws: &mut Vec<DrawRecord>) -> Result<(), TimingError> {
        let n = net.transitions().len();
        for t in 0..n {
            if self.gate_blocked[t] && !net.is_enabled_unchecked(&self.available, t) {
                self.gate_blocked[t] = false;
            }
        }

        let mut entries: Vec<(TransitionId, f64)> = Vec::new();
        for t in 0..n {
            if self.gate_blocked[t] || self.busy(t) || !net.is_enabled_unchecked(&self.available, t) {
                continue;
            }
            let spec = net.timing(t);
            if let Some(label) = &spec.gate {
                let gate = resolve_fuzzy_gate(label, &mut self.rng, self.policy)?;
                draws.push(DrawRecord::Gate {
                    transition: net.transition_name(t).to_string(),
                    threshold: gate.threshold,
                    u: gate.u,
                    passed: gate.passed,
                });
                if !gate.passed {
                    self.gate_blocked[t] = true;
                    continue;
                }
            }
            let delay = sample_delay(&spec.delay, &mut self.rng)?;
            if matches!(spec.delay, Delay::Exponential { .. } | Delay::Uniform { .. }) {
                draws.push(DrawRecord::Delay {
                    transition: net.transition_name(t).to_string(),
                    delay,
                });
            }
            entries.push((t, self.clock + delay));
        }

        // stable: equal due times keep declaration order
        entries.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut start = 0;
        while start < entries.len() {
            let due = entries[start].1;
            let end = start + entries[start..].iter().take_while(|e| e.1 == due).count();
            let group = &entries[start..end];
            let order = if group.len() > 1 && !self.fits_all(net, group) {
                self.weighted_order(net, group, draws)?
            } else {
                group.iter().map(|&(t, _)| t).collect()
            };
            for t in order {
                if net.is_enabled_unchecked(&self.available, t) {
                    self.reserve(net, t, due);
                } else {
                    draws.push(DrawRecord::Cancelled {
                        transition: net.transition_name(t).to_string(),
                    });
                }
            }
            start = end;
        }
        Ok(())
    }

    /// Orders tied competitors by successive weighted draws without replacement.
    fn weighted_order(
        &mut self,
        net: &Net,
        group: &[(TransitionId, f64)],
        draws: &mut Vec<DrawRecord>,
    ) -> Result<Vec<TransitionId>, TimingError> {
        let mut remaining: Vec<(TransitionId, f64)> =
            group.iter().map(|&(t, _)| (t, net.timing(t).conflict_weight)).collect();
        let mut order = Vec::with_capacity(remaining.len());
        while remaining.len() > 1 {
            let chosen = resolve_conflict(&remaining, &mut self.rng)?;
            draws.push(DrawRecord::Conflict {
                chosen: net.transition_name(chosen).to_string(),
                among: remaining
                    .iter()
                    .map(|&(t, _)| net.transition_name(t).to_string())
                    .collect(),
            });
            order.push(chosen);
            remaining.retain(|&(t, _)| t != chosen);
        }
        order.extend(remaining.into_iter().map(|(t, _)| t));
        Ok(order)
    }
}

/// Advances the simulation by one completed firing.
///
/// Newly enabled transitions are scheduled first, then the earliest firing in
/// flight completes and the clock jumps to its due time.
pub fn step(net: &Net, state: &mut SimState) -> Result<StepOutcome, TimingError> {
    let mut draws = Vec::new();
    state.schedule(net, &mut draws)?;
    let Some(idx) = state
        .pending
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.due.total_cmp(&b.due).then(a.seq.cmp(&b.seq)))
        .map(|(i, _)| i)
    else {
        return Ok(StepOutcome::Deadlock { draws });
    };
    let pre = state.marking();
    let done = state.pending.remove(idx);
    for &(p, w) in net.outputs(done.transition) {
        state.available.0[p] += w;
    }
    state.clock = done.due;
    Ok(StepOutcome::Fired(FiringEvent {
        time: done.due,
        transition: net.transition_name(done.transition).to_string(),
        pre,
        post: state.marking(),
        draws,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Horizon,
    Deadlock,
    StepLimit,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Horizon => "horizon",
            Termination::Deadlock => "deadlock",
            Termination::StepLimit => "step_limit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub horizon: f64,
    pub max_steps: usize,
    pub seed: u64,
    pub policy: GatePolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            horizon: 100.0,
            max_steps: 10_000,
            seed: 0,
            policy: GatePolicy::Centroid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub net: String,
    pub seed: u64,
    pub rng: String,
    pub policy: GatePolicy,
    pub events: Vec<FiringEvent>,
    /// Draws made in the final step that did not lead to a firing.
    pub trailing_draws: Vec<DrawRecord>,
    pub terminated: Termination,
}

impl SimTrace {
    /// Every draw of the run, in order.
    pub fn draws(&self) -> impl Iterator<Item = &DrawRecord> {
        self.events
            .iter()
            .flat_map(|e| e.draws.iter())
            .chain(self.trailing_draws.iter())
    }

    pub fn fired(&self, transition: &str) -> bool {
        self.events.iter().any(|e| e.transition == transition)
    }

    pub fn final_marking<'a>(&'a self, initial: &'a Marking) -> &'a Marking {
        self.events.last().map(|e| &e.post).unwrap_or(initial)
    }
}

/// Steps until the next firing would complete after `horizon`, the step
/// budget is spent, or the net deadlocks.
pub fn run(net: &Net, cfg: &RunConfig) -> Result<SimTrace, TimingError> {
    let mut state = SimState::new(net, cfg.seed, cfg.policy);
    let mut events = Vec::new();
    let mut trailing_draws = Vec::new();
    let terminated = loop {
        if events.len() >= cfg.max_steps {
            break Termination::StepLimit;
        }
        match step(net, &mut state)? {
            StepOutcome::Deadlock { draws } => {
                trailing_draws = draws;
                break Termination::Deadlock;
            }
            StepOutcome::Fired(event) if event.time > cfg.horizon => {
                trailing_draws = event.draws;
                break Termination::Horizon;
            }
            StepOutcome::Fired(event) => events.push(event),
        }
    };
    Ok(SimTrace {
        net: net.name().to_string(),
        seed: cfg.seed,
        rng: RNG_ALGORITHM.to_string(),
        policy: cfg.policy,
        events,
        trailing_draws,
        terminated,
    })
}

/// Runs `runs` independent simulations with seeds `cfg.seed, cfg.seed + 1, ...`
/// in parallel. Results come back in seed order.
pub fn run_batch(net: &Net, cfg: &RunConfig, runs: u64) -> Result<Vec<SimTrace>, TimingError> {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            run(
                net,
                &RunConfig {
                    seed: cfg.seed.wrapping_add(i),
                    ..*cfg
                },
            )
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum TraceRecord {
    Header {
        format: String,
        net: String,
        seed: u64,
        rng: String,
        policy: GatePolicy,
    },
    Event(FiringEvent),
    End {
        reason: Termination,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        draws: Vec<DrawRecord>,
    },
}

#[derive(Debug, Error)]
pub enum TraceFormatError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: unexpected {what}")]
    Structure { line: usize, what: String },
    #[error("trace is missing its {0} record")]
    Missing(&'static str),
}

/// Serialises a trace as JSON lines: one header, one line per event, one end record.
pub fn write_trace(trace: &SimTrace) -> String {
    let mut out = String::new();
    let mut push = |rec: &TraceRecord| {
        out.push_str(&serde_json::to_string(rec).expect("trace records always serialise"));
        out.push('\n');
    };
    push(&TraceRecord::Header {
        format: TRACE_FORMAT.to_string(),
        net: trace.net.clone(),
        seed: trace.seed,
        rng: trace.rng.clone(),
        policy: trace.policy,
    });
    for e in &trace.events {
        push(&TraceRecord::Event(e.clone()));
    }
    push(&TraceRecord::End {
        reason: trace.terminated,
        draws: trace.trailing_draws.clone(),
    });
    out
}

pub fn read_trace(text: &str) -> Result<SimTrace, TraceFormatError> {
    let mut header = None;
    let mut events = Vec::new();
    let mut end = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line_no = i + 1;
        let rec: TraceRecord =
            serde_json::from_str(line).map_err(|source| TraceFormatError::Json { line: line_no, source })?;
        let misplaced = |what: &str| TraceFormatError::Structure {
            line: line_no,
            what: what.to_string(),
        };
        match rec {
            TraceRecord::Header { .. } if header.is_some() => return Err(misplaced("second header")),
            TraceRecord::Header {
                net, seed, rng, policy, ..
            } => header = Some((net, seed, rng, policy)),
            _ if header.is_none() => return Err(misplaced("record before header")),
            _ if end.is_some() => return Err(misplaced("record after end")),
            TraceRecord::Event(e) => events.push(e),
            TraceRecord::End { reason, draws } => end = Some((reason, draws)),
        }
    }
    let (net, seed, rng, policy) = header.ok_or(TraceFormatError::Missing("header"))?;
    let (terminated, trailing_draws) = end.ok_or(TraceFormatError::Missing("end"))?;
    Ok(SimTrace {
        net,
        seed,
        rng,
        policy,
        events,
        trailing_draws,
        terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetDef;

    fn race_net(a: TimingSpec, b: TimingSpec) -> Net {
        Net::new(
            NetDef::new("race")
                .place("token", 1)
                .place("a_won", 0)
                .place("b_won", 0)
                .transition("a", &[("token", 1)], &[("a_won", 1)], a)
                .transition("b", &[("token", 1)], &[("b_won", 1)], b),
        )
        .unwrap()
    }

    #[test]
    fn fixed_delays() {
        let mut rng = rng_from_seed(1);
        assert_eq!(
            sample_delay(&Delay::Deterministic { delay: 4.0 }, &mut rng).unwrap(),
            4.0
        );
        assert_eq!(sample_delay(&Delay::Immediate, &mut rng).unwrap(), 0.0);
        assert_eq!(
            sample_delay(&Delay::Uniform { lo: 2.0, hi: 2.0 }, &mut rng).unwrap(),
            2.0
        );
        assert!(sample_delay(&Delay::Exponential { rate: 0.0 }, &mut rng).is_err());
        assert!(sample_delay(&Delay::Uniform { lo: 3.0, hi: 1.0 }, &mut rng).is_err());
        assert!(sample_delay(&Delay::Deterministic { delay: -1.0 }, &mut rng).is_err());
    }

    #[test]
    fn exponential_sample_mean() {
        let mut rng = rng_from_seed(42);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| sample_delay(&Delay::Exponential { rate: 2.0 }, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn uniform_draws_stay_in_bounds() {
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            let d = sample_delay(&Delay::Uniform { lo: 1.0, hi: 2.5 }, &mut rng).unwrap();
            assert!((1.0..=2.5).contains(&d));
        }
    }

    #[test]
    fn conflict_choice_frequencies() {
        let mut rng = rng_from_seed(9);
        assert_eq!(resolve_conflict(&[("only", 3.0)], &mut rng).unwrap(), "only");
        assert!(matches!(
            resolve_conflict::<&str, _>(&[], &mut rng),
            Err(TimingError::NoCandidates)
        ));
        assert!(matches!(
            resolve_conflict(&[("a", 1.0), ("b", 0.0)], &mut rng),
            Err(TimingError::InvalidWeight(_))
        ));
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| resolve_conflict(&[("a", 0.7), ("b", 0.3)], &mut rng).unwrap() == "a")
            .count();
        assert!((hits as f64 / n as f64 - 0.7).abs() < 0.01);
        let hits = (0..n)
            .filter(|_| resolve_conflict(&[("a", 1.0), ("b", 1.0)], &mut rng).unwrap() == "a")
            .count();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn crisp_gates_are_certain() {
        let mut rng = rng_from_seed(5);
        let yes = FuzzyLabel::crisp("yes", 1.0).unwrap();
        let no = FuzzyLabel::crisp("no", 0.0).unwrap();
        for policy in [GatePolicy::Centroid, GatePolicy::Sampled] {
            for _ in 0..1000 {
                assert!(resolve_fuzzy_gate(&yes, &mut rng, policy).unwrap().passed);
                assert!(!resolve_fuzzy_gate(&no, &mut rng, policy).unwrap().passed);
            }
        }
    }

    #[test]
    fn gate_pass_rates_track_centroid() {
        let label = FuzzyLabel::triangular("hp", 0.6, 0.8, 1.0).unwrap();
        for policy in [GatePolicy::Centroid, GatePolicy::Sampled] {
            let mut rng = rng_from_seed(11);
            let n = 10_000;
            let passes = (0..n)
                .filter(|_| resolve_fuzzy_gate(&label, &mut rng, policy).unwrap().passed)
                .count();
            let rate = passes as f64 / n as f64;
            assert!((rate - 0.8).abs() < 0.03, "{policy}: {rate}");
        }
    }

    #[test]
    fn zero_mass_gate_errors() {
        let label = FuzzyLabel::triangular("z", 0.4, 0.4, 0.4).unwrap();
        let mut rng = rng_from_seed(0);
        for policy in [GatePolicy::Centroid, GatePolicy::Sampled] {
            assert!(resolve_fuzzy_gate(&label, &mut rng, policy).is_err());
        }
    }

    #[test]
    fn earlier_transition_wins_the_race() {
        let net = race_net(TimingSpec::deterministic(1.0), TimingSpec::deterministic(2.0));
        let mut state = SimState::new(&net, 0, GatePolicy::Centroid);
        let StepOutcome::Fired(ev) = step(&net, &mut state).unwrap() else {
            panic!("expected a firing");
        };
        assert_eq!(ev.transition, "a");
        assert_eq!(ev.time, 1.0);
        assert_eq!(ev.draws, vec![DrawRecord::Cancelled { transition: "b".into() }]);
        assert_eq!(ev.post, Marking(vec![0, 1, 0]));
        assert!(matches!(step(&net, &mut state).unwrap(), StepOutcome::Deadlock { .. }));
    }

    #[test]
    fn deadlock_leaves_state_alone() {
        let net = race_net(TimingSpec::immediate(), TimingSpec::immediate());
        let mut state = SimState::new(&net, 0, GatePolicy::Centroid);
        state.available = Marking(vec![0, 0, 0]);
        let before = (state.clock, state.available.clone(), state.pending.len());
        assert_eq!(step(&net, &mut state).unwrap(), StepOutcome::Deadlock { draws: vec![] });
        assert_eq!(before, (state.clock, state.available.clone(), state.pending.len()));
    }

    #[test]
    fn tied_immediate_conflict_uses_weights() {
        let net = race_net(
            TimingSpec::immediate().with_weight(3.0),
            TimingSpec::immediate().with_weight(1.0),
        );
        let traces = run_batch(
            &net,
            &RunConfig {
                seed: 100,
                ..Default::default()
            },
            20_000,
        )
        .unwrap();
        let a = traces.iter().filter(|t| t.fired("a")).count() as f64 / traces.len() as f64;
        assert!((a - 0.75).abs() < 0.015, "{a}");
        assert!(traces.iter().all(|t| t.events.len() == 1));
    }

    #[test]
    fn reservation_holds_tokens_until_completion() {
        let net = Net::new(NetDef::new("hold").place("p", 1).place("q", 0).transition(
            "slow",
            &[("p", 1)],
            &[("q", 1)],
            TimingSpec::deterministic(3.0),
        ))
        .unwrap();
        let mut state = SimState::new(&net, 0, GatePolicy::Centroid);
        let mut draws = Vec::new();
        state.schedule(&net, &mut draws).unwrap();
        assert_eq!(state.available(), &Marking(vec![0, 0]));
        assert_eq!(state.reserved(), Marking(vec![1, 0]));
        assert_eq!(state.marking(), Marking(vec![1, 0]));
        assert_eq!(state.pending()[0].due, 3.0);
    }

    #[test]
    fn failed_gate_waits_for_reenabling() {
        let never = FuzzyLabel::crisp("never", 0.0).unwrap();
        let net = Net::new(NetDef::new("g").place("p", 1).place("q", 0).transition(
            "t",
            &[("p", 1)],
            &[("q", 1)],
            TimingSpec::immediate().with_gate(never),
        ))
        .unwrap();
        let mut state = SimState::new(&net, 0, GatePolicy::Centroid);
        let StepOutcome::Deadlock { draws } = step(&net, &mut state).unwrap() else {
            panic!("gate should block");
        };
        assert!(matches!(draws.as_slice(), [DrawRecord::Gate { passed: false, .. }]));
        // still enabled but blocked: no new gate draw
        assert_eq!(step(&net, &mut state).unwrap(), StepOutcome::Deadlock { draws: vec![] });
    }

    #[test]
    fn horizon_zero_without_immediates_is_empty() {
        let net = race_net(TimingSpec::deterministic(1.0), TimingSpec::deterministic(2.0));
        let trace = run(
            &net,
            &RunConfig {
                horizon: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(trace.events.is_empty());
        assert_eq!(trace.terminated, Termination::Horizon);
    }

    #[test]
    fn step_limit_terminates_source_loops() {
        let net = Net::new(NetDef::new("src").place("p", 0).transition(
            "gen",
            &[],
            &[("p", 1)],
            TimingSpec::immediate(),
        ))
        .unwrap();
        let trace = run(
            &net,
            &RunConfig {
                max_steps: 25,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(trace.events.len(), 25);
        assert_eq!(trace.terminated, Termination::StepLimit);
        assert_eq!(trace.events.last().unwrap().post, Marking(vec![25]));
    }

    #[test]
    fn trace_text_round_trip() {
        let net = race_net(TimingSpec::exponential(2.0), TimingSpec::exponential(1.0));
        let trace = run(
            &net,
            &RunConfig {
                seed: 77,
                ..Default::default()
            },
        )
        .unwrap();
        let text = write_trace(&trace);
        assert!(text.starts_with("{\"record\":\"header\""));
        assert_eq!(read_trace(&text).unwrap(), trace);
        assert!(read_trace("").is_err());
        let headerless: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_trace(&headerless),
            Err(TraceFormatError::Structure { .. })
        ));
    }
}
