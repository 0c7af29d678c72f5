//! Fuzzy cognitive maps with signed weights and integer edge delays.
//!
//! Update rule, for every concept `i` with at least one incoming edge:
//!
//! ```text
//! A_i(k+1) = clamp(A_i(k) + sum_j w_ji * A_j(k - d_ji), -1, 1)
//! ```
//!
//! Concepts without incoming edges keep their activation. Before time 0 every
//! concept is taken to sit at its initial activation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::FormalismError;
use crate::fuzzy::{tconorm, tnorm, NormKind};

/// Max-norm distance under which two consecutive states count as equal.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub name: String,
    pub init: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub delay: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FuzzyCognitiveMap {
    pub name: String,
    pub concepts: Vec<Concept>,
    pub edges: Vec<FcmEdge>,
    /// Combines influences of the same sign.
    pub disjunction: NormKind,
    /// Combines influences that must act jointly.
    pub conjunction: NormKind,
}

impl FuzzyCognitiveMap {
    pub fn new(name: impl Into<String>) -> Self {
        FuzzyCognitiveMap {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn concept(mut self, name: &str, init: f64) -> Self {
        self.concepts.push(Concept {
            name: name.to_string(),
            init,
        });
        self
    }

    pub fn edge(mut self, source: &str, target: &str, weight: f64, delay: u32) -> Self {
        self.edges.push(FcmEdge {
            source: source.to_string(),
            target: target.to_string(),
            weight,
            delay,
        });
        self
    }

    pub fn index(&self, name: &str) -> Result<usize, FormalismError> {
        self.concepts
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| FormalismError::UnknownNode(name.to_string()))
    }

    pub fn check(&self) -> Result<(), FormalismError> {
        for (i, c) in self.concepts.iter().enumerate() {
            if self.concepts[..i].iter().any(|o| o.name == c.name) {
                return Err(FormalismError::DuplicateNode(c.name.clone()));
            }
            if !(-1.0..=1.0).contains(&c.init) {
                return Err(FormalismError::OutOfRange(c.init));
            }
        }
        for e in &self.edges {
            self.index(&e.source)?;
            self.index(&e.target)?;
            if !(-1.0..=1.0).contains(&e.weight) {
                return Err(FormalismError::OutOfRange(e.weight));
            }
        }
        Ok(())
    }

    pub fn max_delay(&self) -> u32 {
        self.edges.iter().map(|e| e.delay).max().unwrap_or(0)
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.concepts.iter().map(|c| c.init).collect()
    }

    fn resolved_edges(&self) -> Result<Vec<(usize, usize, f64, usize)>, FormalismError> {
        self.edges
            .iter()
            .map(|e| {
                Ok((
                    self.index(&e.source)?,
                    self.index(&e.target)?,
                    e.weight,
                    e.delay as usize,
                ))
            })
            .collect()
    }
}

/// Next activation state. `history` runs oldest to newest, the last entry
/// being the current state; it must reach back at least the largest delay.
pub fn fcm_step(map: &FuzzyCognitiveMap, history: &[Vec<f64>]) -> Result<Vec<f64>, FormalismError> {
    map.check()?;
    let needed = map.max_delay() as usize + 1;
    if history.len() < needed {
        return Err(FormalismError::InsufficientHistory {
            needed,
            found: history.len(),
        });
    }
    let n = map.concepts.len();
    if let Some(bad) = history.iter().find(|s| s.len() != n) {
        return Err(FormalismError::StateLength {
            expected: n,
            found: bad.len(),
        });
    }
    let now = history.len() - 1;
    let current = &history[now];
    let mut sum = vec![0.0; n];
    let mut has_input = vec![false; n];
    for (src, dst, w, delay) in map.resolved_edges()? {
        sum[dst] += w * history[now - delay][src];
        has_input[dst] = true;
    }
    Ok((0..n)
        .map(|i| {
            if has_input[i] {
                (current[i] + sum[i]).clamp(-1.0, 1.0)
            } else {
                current[i]
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmRun {
    /// `iterations + 1` states, starting with the initial one.
    pub trajectory: Vec<Vec<f64>>,
    /// Step index at which two consecutive states first coincided.
    pub fixed_point_at: Option<usize>,
}

impl FcmRun {
    pub fn reached_fixed_point(&self) -> bool {
        self.fixed_point_at.is_some()
    }
}

pub fn fcm_run(map: &FuzzyCognitiveMap, initial: &[f64], iterations: usize) -> Result<FcmRun, FormalismError> {
    map.check()?;
    if initial.len() != map.concepts.len() {
        return Err(FormalismError::StateLength {
            expected: map.concepts.len(),
            found: initial.len(),
        });
    }
    let pad = map.max_delay() as usize;
    let mut history: Vec<Vec<f64>> = vec![initial.to_vec(); pad + 1];
    let mut fixed_point_at = None;
    for k in 0..iterations {
        let next = fcm_step(map, &history[history.len() - pad - 1..])?;
        let prev = history.last().expect("history is never empty");
        let dist = next.iter().zip(prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if fixed_point_at.is_none() && dist < FIXED_POINT_TOLERANCE {
            fixed_point_at = Some(k + 1);
        }
        history.push(next);
    }
    Ok(FcmRun {
        trajectory: history.split_off(pad),
        fixed_point_at,
    })
}

/// Qualitative influence on `target`: the majority sign of the incoming
/// contributions `sign(w) * sign(A)`, read as a three-valued logic.
pub fn trivalent_influence(map: &FuzzyCognitiveMap, state: &[f64], target: &str) -> Result<Ordering, FormalismError> {
    let t = map.index(target)?;
    let mut balance = 0i64;
    for (src, dst, w, _) in map.resolved_edges()? {
        if dst != t {
            continue;
        }
        let s = sign(w) * sign(state[src]);
        balance += s as i64;
    }
    Ok(balance.cmp(&0))
}

fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Fuzzy aggregation of the influences arriving at a concept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceSupport {
    /// t-conorm of the positive contributions.
    pub favouring: f64,
    /// t-conorm of the magnitudes of the negative contributions.
    pub inhibiting: f64,
    /// t-norm of the positive contributions: support when all act jointly.
    pub joint: f64,
}

pub fn influence_support(
    map: &FuzzyCognitiveMap,
    state: &[f64],
    target: &str,
) -> Result<InfluenceSupport, FormalismError> {
    let t = map.index(target)?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (src, dst, w, _) in map.resolved_edges()? {
        if dst != t {
            continue;
        }
        let c = (w * state[src]).clamp(-1.0, 1.0);
        if c > 0.0 {
            positive.push(c);
        } else if c < 0.0 {
            negative.push(-c);
        }
    }
    let fold = |xs: &[f64], init: f64, op: &dyn Fn(f64, f64) -> f64| xs.iter().fold(init, |acc, &x| op(acc, x));
    let or = |a, b| tconorm(map.disjunction, a, b).expect("inputs clamped to [0, 1]");
    let and = |a, b| tnorm(map.conjunction, a, b).expect("inputs clamped to [0, 1]");
    Ok(InfluenceSupport {
        favouring: fold(&positive, 0.0, &or),
        inhibiting: fold(&negative, 0.0, &or),
        joint: if positive.is_empty() {
            0.0
        } else {
            fold(&positive, 1.0, &and)
        },
    })
}
