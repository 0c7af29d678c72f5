//! State-space exploration of untimed nets and summary statistics over
//! simulation traces.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{Marking, Net, NetError};
use crate::timing::{DrawRecord, SimTrace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("reachability graph is truncated; boundedness is undecided")]
    Truncated,
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub transition: String,
    pub to: usize,
}

/// Markings reachable from the initial marking, ignoring timing annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachabilityGraph {
    pub places: Vec<String>,
    /// Discovery (breadth-first) order; node 0 is the root.
    pub nodes: Vec<Marking>,
    pub edges: Vec<Edge>,
    /// Per node: all successors were explored.
    pub complete: Vec<bool>,
    pub truncated: bool,
}

impl ReachabilityGraph {
    pub fn root(&self) -> &Marking {
        &self.nodes[0]
    }

    pub fn node_index(&self, m: &Marking) -> Option<usize> {
        self.nodes.iter().position(|n| n == m)
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == node)
    }

    pub fn has_edge(&self, from: &Marking, transition: &str, to: &Marking) -> bool {
        match (self.node_index(from), self.node_index(to)) {
            (Some(f), Some(t)) => self
                .edges
                .iter()
                .any(|e| e.from == f && e.to == t && e.transition == transition),
            _ => false,
        }
    }
}

/// Breadth-first closure of the firing rule. Successors exceeding
/// `max_tokens_per_place` in any place, or arriving after `max_nodes` nodes
/// exist, are dropped and their source node is marked incomplete.
pub fn reachability_graph(net: &Net, max_nodes: usize, max_tokens_per_place: u32) -> ReachabilityGraph {
    let root = net.initial_marking().clone();
    let mut nodes = vec![root.clone()];
    let mut index: HashMap<Marking, usize> = HashMap::from([(root, 0)]);
    let mut complete = vec![true];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        let current = nodes[i].clone();
        for t in 0..net.transitions().len() {
            if !net.is_enabled_unchecked(&current, t) {
                continue;
            }
            let next = net.fire_unchecked(&current, t);
            if next.counts().iter().any(|&c| c > max_tokens_per_place) {
                complete[i] = false;
                continue;
            }
            let to = match index.get(&next) {
                Some(&j) => j,
                None if nodes.len() >= max_nodes => {
                    complete[i] = false;
                    continue;
                }
                None => {
                    let j = nodes.len();
                    nodes.push(next.clone());
                    index.insert(next, j);
                    complete.push(true);
                    queue.push_back(j);
                    j
                }
            };
            edges.push(Edge {
                from: i,
                transition: net.transition_name(t).to_string(),
                to,
            });
        }
    }
    let truncated = complete.iter().any(|c| !c);
    ReachabilityGraph {
        places: net.places().to_vec(),
        nodes,
        edges,
        complete,
        truncated,
    }
}

/// Fully explored markings with no outgoing edge.
pub fn detect_deadlocks(g: &ReachabilityGraph) -> Vec<Marking> {
    let mut has_out = vec![false; g.nodes.len()];
    for e in &g.edges {
        has_out[e.from] = true;
    }
    g.nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| g.complete[i] && !has_out[i])
        .map(|(_, m)| m.clone())
        .collect()
}

pub fn is_k_bounded(g: &ReachabilityGraph, k: u32) -> Result<bool, AnalysisError> {
    if g.truncated {
        return Err(AnalysisError::Truncated);
    }
    Ok(g.nodes.iter().all(|m| m.counts().iter().all(|&c| c <= k)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatsQuery {
    Transition(String),
    Place(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Summary {
            count: values.len(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            stddev: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceStats {
    pub runs: usize,
    /// Traces in which the queried transition fired at least once.
    pub fired_in: usize,
    pub total_firings: usize,
    pub first_firing: Option<Summary>,
    pub gate_attempts: usize,
    pub gate_passes: usize,
    /// Final token count of the queried place.
    pub place_final: BTreeMap<u32, usize>,
    pub final_markings: BTreeMap<Marking, usize>,
}

impl TraceStats {
    pub fn firing_frequency(&self) -> Option<f64> {
        (self.runs > 0).then(|| self.fired_in as f64 / self.runs as f64)
    }

    pub fn gate_pass_rate(&self) -> Option<f64> {
        (self.gate_attempts > 0).then(|| self.gate_passes as f64 / self.gate_attempts as f64)
    }
}

/// Aggregates a batch of traces of `net`. Deterministic in trace order.
pub fn trace_stats(net: &Net, traces: &[SimTrace], query: &StatsQuery) -> Result<TraceStats, AnalysisError> {
    let place = match query {
        StatsQuery::Place(p) => Some(net.place_id(p)?),
        StatsQuery::Transition(t) => {
            net.transition_id(t)?;
            None
        }
    };
    let mut stats = TraceStats {
        runs: traces.len(),
        ..Default::default()
    };
    let mut first_times = Vec::new();
    for trace in traces {
        let fin = trace.final_marking(net.initial_marking()).clone();
        if let Some(p) = place {
            *stats.place_final.entry(fin[p]).or_insert(0) += 1;
        }
        *stats.final_markings.entry(fin).or_insert(0) += 1;
        let StatsQuery::Transition(name) = query else {
            continue;
        };
        let mut firings = trace.events.iter().filter(|e| &e.transition == name);
        if let Some(first) = firings.next() {
            stats.fired_in += 1;
            stats.total_firings += 1 + firings.count();
            first_times.push(first.time);
        }
        for d in trace.draws() {
            if let DrawRecord::Gate { transition, passed, .. } = d {
                if transition == name {
                    stats.gate_attempts += 1;
                    stats.gate_passes += usize::from(*passed);
                }
            }
        }
    }
    stats.first_firing = Summary::of(&first_times);
    Ok(stats)
}
