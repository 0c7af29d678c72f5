//! Named causal scenarios, each a net plus facts that can be checked
//! mechanically. Every scenario also ships as a `.causanet` fixture.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{detect_deadlocks, reachability_graph, trace_stats, AnalysisError, StatsQuery};
use crate::fuzzy::{builtin_label, FuzzyLabel};
use crate::net::{Marking, Net, NetDef, NetError};
use crate::timing::{run, run_batch, DrawRecord, GatePolicy, RunConfig, TimingError, TimingSpec};

/// Exploration limits used for every reachability-based expectation.
pub const MAX_NODES: usize = 10_000;
pub const MAX_TOKENS: u32 = 1_000;

pub const SCENARIOS: &[&str] = &[
    "symmetric_overdetermination",
    "asymmetric_overdetermination",
    "alternative_causes",
    "sales_orders_delay",
    "trumping",
    "fizzling",
    "yale_shooting",
    "job_market",
    "sync_choice",
];

/// Source text of a shipped fixture, by file stem.
pub fn fixture(name: &str) -> Option<&'static str> {
    Some(match name {
        "symmetric_overdetermination" => include_str!("../scenarios/symmetric_overdetermination.causanet"),
        "asymmetric_overdetermination" => include_str!("../scenarios/asymmetric_overdetermination.causanet"),
        "alternative_causes" => include_str!("../scenarios/alternative_causes.causanet"),
        "sales_orders_delay" => include_str!("../scenarios/sales_orders_delay.causanet"),
        "trumping" => include_str!("../scenarios/trumping.causanet"),
        "fizzling" => include_str!("../scenarios/fizzling.causanet"),
        "yale_shooting" => include_str!("../scenarios/yale_shooting.causanet"),
        "job_market" => include_str!("../scenarios/job_market.causanet"),
        "sync_choice" => include_str!("../scenarios/sync_choice.causanet"),
        "graph" => include_str!("../scenarios/graph.causanet"),
        "feedback" => include_str!("../scenarios/feedback.causanet"),
        "neurons" => include_str!("../scenarios/neurons.causanet"),
        "surgery" => include_str!("../scenarios/surgery.causanet"),
        _ => return None,
    })
}

/// Every `.causanet` fixture stem, scenarios first.
pub const FIXTURES: &[&str] = &[
    "symmetric_overdetermination",
    "asymmetric_overdetermination",
    "alternative_causes",
    "sales_orders_delay",
    "trumping",
    "fizzling",
    "yale_shooting",
    "job_market",
    "sync_choice",
    "graph",
    "feedback",
    "neurons",
    "surgery",
];

pub const SURGERY_TRUTH_TABLE: &str = include_str!("../scenarios/surgery.tt");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PuzzleError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid scenario net: {0}")]
    InvalidNet(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// How to simulate for a statistical expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRecipe {
    pub runs: u64,
    pub seed: u64,
    pub horizon: f64,
    pub policy: GatePolicy,
}

impl SimRecipe {
    pub fn new(runs: u64, seed: u64, horizon: f64) -> Self {
        SimRecipe {
            runs,
            seed,
            horizon,
            policy: GatePolicy::Centroid,
        }
    }

    fn config(&self) -> RunConfig {
        RunConfig {
            horizon: self.horizon,
            seed: self.seed,
            policy: self.policy,
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    /// Firing these transitions in order from the initial marking yields
    /// these markings.
    FiringSequence(Vec<(String, Marking)>),
    /// Fraction of runs in which `transition` fires.
    FiringFrequency {
        transition: String,
        expected: f64,
        tolerance: f64,
        recipe: SimRecipe,
    },
    GatePassRate {
        transition: String,
        expected: f64,
        tolerance: f64,
        recipe: SimRecipe,
    },
    /// In every run where `winner`'s gate passes, `winner` fires and
    /// `loser` does not.
    GateWinExcludes {
        winner: String,
        loser: String,
        recipe: SimRecipe,
    },
    /// Over all 0/1 markings of `places` (other places empty, first place
    /// the most significant bit), some transition of `transitions` is
    /// enabled exactly on `on_set`.
    EnabledExactlyWhen {
        transitions: Vec<String>,
        places: Vec<String>,
        on_set: Vec<u32>,
    },
    EnabledCountAt {
        tokens: Vec<(String, u32)>,
        count: usize,
    },
    /// The dead reachable markings are exactly these.
    TerminalMarkings(Vec<Marking>),
    /// Along every reachability edge, only `transition` lowers `place`.
    OnlyTransitionDecreases {
        place: String,
        transition: String,
    },
    /// In one run, `place` reaches zero strictly before the first
    /// completion of `transition`.
    EmptiesBeforeFirstCompletion {
        place: String,
        transition: String,
        recipe: SimRecipe,
    },
    /// Token sum over `places` is `total` in every reachable marking.
    PlaceSumInvariant {
        places: Vec<String>,
        total: u32,
    },
    /// No dead marking leaves tokens in `place`.
    NoDeadlockWhile {
        place: String,
    },
}

fn names(v: &[String]) -> String {
    v.join(",")
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::FiringSequence(steps) => {
                write!(f, "firing sequence")?;
                for (t, m) in steps {
                    write!(f, " -{t}-> {m}")?;
                }
                Ok(())
            }
            Expectation::FiringFrequency {
                transition,
                expected,
                tolerance,
                recipe,
            } => write!(
                f,
                "{transition} fires in {expected} ± {tolerance} of {} runs",
                recipe.runs
            ),
            Expectation::GatePassRate {
                transition,
                expected,
                tolerance,
                recipe,
            } => write!(
                f,
                "gate of {transition} passes at rate {expected} ± {tolerance} over {} runs",
                recipe.runs
            ),
            Expectation::GateWinExcludes { winner, loser, recipe } => write!(
                f,
                "whenever the gate of {winner} passes, {winner} fires and {loser} does not ({} runs)",
                recipe.runs
            ),
            Expectation::EnabledExactlyWhen {
                transitions,
                places,
                on_set,
            } => write!(
                f,
                "{{{}}} enabled exactly on minterms {on_set:?} of ({})",
                names(transitions),
                names(places)
            ),
            Expectation::EnabledCountAt { tokens, count } => {
                let m: Vec<String> = tokens.iter().map(|(p, n)| format!("{p}={n}")).collect();
                write!(f, "{count} transitions enabled at {}", m.join(","))
            }
            Expectation::TerminalMarkings(ms) => {
                let m: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
                write!(f, "dead markings are {{{}}}", m.join(", "))
            }
            Expectation::OnlyTransitionDecreases { place, transition } => {
                write!(f, "only {transition} removes tokens from {place}")
            }
            Expectation::EmptiesBeforeFirstCompletion { place, transition, .. } => {
                write!(f, "{place} empties before {transition} first completes")
            }
            Expectation::PlaceSumInvariant { places, total } => {
                write!(f, "tokens in {{{}}} always sum to {total}", names(places))
            }
            Expectation::NoDeadlockWhile { place } => write!(f, "no deadlock while {place} holds tokens"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub expectation: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub summary: String,
    pub net: NetDef,
    pub expectations: Vec<Expectation>,
}

fn m(v: &[u32]) -> Marking {
    Marking::new(v.to_vec())
}

fn s(v: &str) -> String {
    v.to_string()
}

fn steps(v: &[(&str, &[u32])]) -> Expectation {
    Expectation::FiringSequence(v.iter().map(|(t, mk)| (s(t), m(mk))).collect())
}

fn imm() -> TimingSpec {
    TimingSpec::immediate()
}

fn symmetric_overdetermination() -> Scenario {
    Scenario {
        name: s("symmetric_overdetermination"),
        summary: s("two drugs must be given jointly for the cure"),
        net: NetDef::new("symmetric_overdetermination")
            .place("drug_a", 1)
            .place("drug_b", 1)
            .place("cured", 0)
            .transition("cure", &[("drug_a", 1), ("drug_b", 1)], &[("cured", 1)], imm()),
        expectations: vec![
            Expectation::EnabledExactlyWhen {
                transitions: vec![s("cure")],
                places: vec![s("drug_a"), s("drug_b")],
                on_set: vec![0b11],
            },
            steps(&[("cure", &[0, 0, 1])]),
        ],
    }
}

fn asymmetric_overdetermination() -> Scenario {
    Scenario {
        name: s("asymmetric_overdetermination"),
        summary: s("either medicine alone suffices; the patient place makes them compete"),
        net: NetDef::new("asymmetric_overdetermination")
            .place("med_a", 1)
            .place("med_b", 1)
            .place("patient", 1)
            .place("mitigated", 0)
            .transition("give_a", &[("med_a", 1), ("patient", 1)], &[("mitigated", 1)], imm())
            .transition("give_b", &[("med_b", 1), ("patient", 1)], &[("mitigated", 1)], imm()),
        expectations: vec![
            Expectation::EnabledCountAt {
                tokens: vec![(s("med_a"), 1), (s("med_b"), 1), (s("patient"), 1)],
                count: 2,
            },
            Expectation::TerminalMarkings(vec![m(&[0, 1, 0, 1]), m(&[1, 0, 0, 1])]),
        ],
    }
}

/// Approving votes: `2A + B + C + D >= 3`, first variable most significant.
pub fn surgery_on_set() -> Vec<u32> {
    (0..16u32)
        .filter(|v| 2 * (v >> 3 & 1) + (v >> 2 & 1) + (v >> 1 & 1) + (v & 1) >= 3)
        .collect()
}

fn alternative_causes() -> Scenario {
    let mut net = NetDef::new("alternative_causes");
    for p in ["A", "B", "C", "D"] {
        net = net.place(p, 1);
    }
    net = net
        .place("surgery", 0)
        .transition("tAB", &[("A", 1), ("B", 1)], &[("surgery", 1)], imm())
        .transition("tAC", &[("A", 1), ("C", 1)], &[("surgery", 1)], imm())
        .transition("tAD", &[("A", 1), ("D", 1)], &[("surgery", 1)], imm())
        .transition("tBCD", &[("B", 1), ("C", 1), ("D", 1)], &[("surgery", 1)], imm());
    Scenario {
        name: s("alternative_causes"),
        summary: s("surgery approved by any sufficient cluster of votes"),
        net,
        expectations: vec![
            Expectation::EnabledExactlyWhen {
                transitions: vec![s("tAB"), s("tAC"), s("tAD"), s("tBCD")],
                places: vec![s("A"), s("B"), s("C"), s("D")],
                on_set: surgery_on_set(),
            },
            // the unanimous case enables every cluster at once
            Expectation::EnabledCountAt {
                tokens: vec![(s("A"), 1), (s("B"), 1), (s("C"), 1), (s("D"), 1)],
                count: 4,
            },
        ],
    }
}

/// The sales/orders loop with a given restock delay.
pub fn sales_orders_net(restock_delay: f64) -> NetDef {
    NetDef::new("sales_orders_delay")
        .place("sales", 3)
        .place("orders", 0)
        .transition("t1", &[("sales", 1)], &[("orders", 1)], imm())
        .transition(
            "t2",
            &[("orders", 1)],
            &[("sales", 1)],
            TimingSpec::deterministic(restock_delay),
        )
}

fn sales_orders_delay() -> Scenario {
    Scenario {
        name: s("sales_orders_delay"),
        summary: s("restocking four days after an order leaves the shop without sales"),
        net: sales_orders_net(4.0),
        expectations: vec![Expectation::EmptiesBeforeFirstCompletion {
            place: s("sales"),
            transition: s("t2"),
            recipe: SimRecipe::new(1, 0, 20.0),
        }],
    }
}

fn trumping() -> Scenario {
    Scenario {
        name: s("trumping"),
        summary: s("the morning spell preempts the equally likely afternoon spell"),
        net: NetDef::new("trumping")
            .place("merlin", 1)
            .place("morgana", 1)
            .place("prince", 1)
            .place("frog_by_merlin", 0)
            .place("frog_by_morgana", 0)
            .transition(
                "merlin_casts",
                &[("merlin", 1), ("prince", 1)],
                &[("frog_by_merlin", 1)],
                TimingSpec::deterministic(1.0),
            )
            .transition(
                "morgana_casts",
                &[("morgana", 1), ("prince", 1)],
                &[("frog_by_morgana", 1)],
                TimingSpec::deterministic(2.0),
            ),
        expectations: vec![
            Expectation::FiringFrequency {
                transition: s("merlin_casts"),
                expected: 1.0,
                tolerance: 0.0,
                recipe: SimRecipe::new(1000, 0, 100.0),
            },
            Expectation::FiringFrequency {
                transition: s("morgana_casts"),
                expected: 0.0,
                tolerance: 0.0,
                recipe: SimRecipe::new(1000, 0, 100.0),
            },
        ],
    }
}

/// The rage episode: certainty, as a crisp gate.
pub fn rage_label() -> FuzzyLabel {
    FuzzyLabel::crisp("rage", 1.0).expect("1.0 is a valid probability")
}

fn fizzling() -> Scenario {
    let likely = builtin_label("highly_probable").expect("built-in label");
    Scenario {
        name: s("fizzling"),
        summary: s("the likelier vandal is preempted by the thrower acting in rage"),
        net: NetDef::new("fizzling")
            .place("thrower", 1)
            .place("vandal", 1)
            .place("lamppost", 1)
            .place("broken_by_a", 0)
            .place("broken_by_b", 0)
            .transition(
                "a",
                &[("thrower", 1), ("lamppost", 1)],
                &[("broken_by_a", 1)],
                TimingSpec::deterministic(1.0).with_gate(rage_label()),
            )
            .transition(
                "b",
                &[("vandal", 1), ("lamppost", 1)],
                &[("broken_by_b", 1)],
                TimingSpec::deterministic(2.0).with_gate(likely),
            ),
        expectations: vec![
            Expectation::GateWinExcludes {
                winner: s("a"),
                loser: s("b"),
                recipe: SimRecipe::new(1000, 0, 100.0),
            },
            Expectation::GatePassRate {
                transition: s("b"),
                expected: 0.8,
                tolerance: 0.03,
                recipe: SimRecipe::new(10_000, 0, 100.0),
            },
        ],
    }
}

fn yale_shooting() -> Scenario {
    Scenario {
        name: s("yale_shooting"),
        summary: s("waiting keeps the victim alive; only shooting kills"),
        net: NetDef::new("yale_shooting")
            .place("s0", 1)
            .place("s1", 0)
            .place("s2", 0)
            .place("loaded", 1)
            .place("alive", 1)
            .place("dead", 0)
            .transition("wait", &[("s0", 1)], &[("s1", 1)], imm())
            .transition(
                "shoot",
                &[("s1", 1), ("loaded", 1), ("alive", 1)],
                &[("s2", 1), ("dead", 1)],
                imm(),
            ),
        expectations: vec![
            Expectation::OnlyTransitionDecreases {
                place: s("alive"),
                transition: s("shoot"),
            },
            steps(&[("wait", &[0, 1, 0, 1, 1, 0]), ("shoot", &[0, 0, 1, 0, 0, 1])]),
            Expectation::TerminalMarkings(vec![m(&[0, 0, 1, 0, 0, 1])]),
        ],
    }
}

fn job_market() -> Scenario {
    Scenario {
        name: s("job_market"),
        summary: s("a single permanent offer shared by three applicants"),
        net: NetDef::new("job_market")
            .place("demands", 3)
            .place("offer", 1)
            .place("interview", 0)
            .place("hired", 0)
            .transition("t1", &[("demands", 1), ("offer", 1)], &[("interview", 1)], imm())
            .transition("t2", &[("interview", 1)], &[("offer", 1), ("hired", 1)], imm()),
        expectations: vec![
            steps(&[("t1", &[2, 0, 1, 0]), ("t2", &[2, 1, 0, 1])]),
            Expectation::PlaceSumInvariant {
                places: vec![s("offer"), s("interview")],
                total: 1,
            },
            Expectation::NoDeadlockWhile { place: s("demands") },
            Expectation::TerminalMarkings(vec![m(&[0, 1, 0, 3])]),
        ],
    }
}

fn sync_choice() -> Scenario {
    Scenario {
        name: s("sync_choice"),
        summary: s("weighted synchronisation followed by a free choice"),
        net: NetDef::new("sync_choice")
            .place("p1", 2)
            .place("p2", 2)
            .place("p3", 0)
            .place("p4", 0)
            .place("p5", 0)
            .transition("t1", &[("p1", 2), ("p2", 1)], &[("p3", 1)], imm())
            .transition("t2", &[("p3", 1)], &[("p4", 1)], imm())
            .transition("t3", &[("p3", 1)], &[("p5", 1)], imm()),
        expectations: vec![
            steps(&[("t1", &[0, 1, 1, 0, 0]), ("t2", &[0, 1, 0, 1, 0])]),
            steps(&[("t1", &[0, 1, 1, 0, 0]), ("t3", &[0, 1, 0, 0, 1])]),
            Expectation::TerminalMarkings(vec![m(&[0, 1, 0, 1, 0]), m(&[0, 1, 0, 0, 1])]),
        ],
    }
}

pub fn build(name: &str) -> Result<Scenario, PuzzleError> {
    Ok(match name {
        "symmetric_overdetermination" => symmetric_overdetermination(),
        "asymmetric_overdetermination" => asymmetric_overdetermination(),
        "alternative_causes" => alternative_causes(),
        "sales_orders_delay" => sales_orders_delay(),
        "trumping" => trumping(),
        "fizzling" => fizzling(),
        "yale_shooting" => yale_shooting(),
        "job_market" => job_market(),
        "sync_choice" => sync_choice(),
        other => return Err(PuzzleError::UnknownScenario(other.to_string())),
    })
}

pub fn registry() -> Vec<Scenario> {
    SCENARIOS
        .iter()
        .map(|n| build(n).expect("registered scenario"))
        .collect()
}

fn gate_passed(trace: &crate::timing::SimTrace, transition: &str) -> bool {
    trace
        .draws()
        .any(|d| matches!(d, DrawRecord::Gate { transition: t, passed: true, .. } if t == transition))
}

impl Scenario {
    /// Names every place and transition mentioned by an expectation, so
    /// they can be checked against the net.
    pub fn referenced_names(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut places = BTreeSet::new();
        let mut transitions = BTreeSet::new();
        for e in &self.expectations {
            match e {
                Expectation::FiringSequence(steps) => transitions.extend(steps.iter().map(|(t, _)| t.clone())),
                Expectation::FiringFrequency { transition, .. } | Expectation::GatePassRate { transition, .. } => {
                    transitions.insert(transition.clone());
                }
                Expectation::GateWinExcludes { winner, loser, .. } => {
                    transitions.insert(winner.clone());
                    transitions.insert(loser.clone());
                }
                Expectation::EnabledExactlyWhen {
                    transitions: ts,
                    places: ps,
                    ..
                } => {
                    transitions.extend(ts.iter().cloned());
                    places.extend(ps.iter().cloned());
                }
                Expectation::EnabledCountAt { tokens, .. } => places.extend(tokens.iter().map(|(p, _)| p.clone())),
                Expectation::TerminalMarkings(_) => {}
                Expectation::OnlyTransitionDecreases { place, transition }
                | Expectation::EmptiesBeforeFirstCompletion { place, transition, .. } => {
                    places.insert(place.clone());
                    transitions.insert(transition.clone());
                }
                Expectation::PlaceSumInvariant { places: ps, .. } => places.extend(ps.iter().cloned()),
                Expectation::NoDeadlockWhile { place } => {
                    places.insert(place.clone());
                }
            }
        }
        (places, transitions)
    }

    pub fn check(&self) -> Result<Vec<CheckResult>, PuzzleError> {
        let net = Net::new(self.net.clone()).map_err(|r| PuzzleError::InvalidNet(r.to_string()))?;
        self.expectations
            .iter()
            .map(|e| {
                let (passed, detail) = evaluate(&net, e)?;
                Ok(CheckResult {
                    expectation: e.to_string(),
                    passed,
                    detail,
                })
            })
            .collect()
    }
}

fn evaluate(net: &Net, e: &Expectation) -> Result<(bool, String), PuzzleError> {
    match e {
        Expectation::FiringSequence(steps) => {
            let mut m = net.initial_marking().clone();
            for (t, expected) in steps {
                m = net.fire_named(&m, t)?;
                if &m != expected {
                    return Ok((false, format!("{t} produced {m}, expected {expected}")));
                }
            }
            Ok((true, format!("reached {m}")))
        }
        Expectation::FiringFrequency {
            transition,
            expected,
            tolerance,
            recipe,
        } => {
            let traces = run_batch(net, &recipe.config(), recipe.runs)?;
            let stats = trace_stats(net, &traces, &StatsQuery::Transition(transition.clone()))?;
            let f = stats.firing_frequency().unwrap_or(0.0);
            Ok(((f - expected).abs() <= *tolerance, format!("observed {f:.4}")))
        }
        Expectation::GatePassRate {
            transition,
            expected,
            tolerance,
            recipe,
        } => {
            let traces = run_batch(net, &recipe.config(), recipe.runs)?;
            let stats = trace_stats(net, &traces, &StatsQuery::Transition(transition.clone()))?;
            match stats.gate_pass_rate() {
                Some(r) => Ok((
                    (r - expected).abs() <= *tolerance,
                    format!("observed {r:.4} over {} draws", stats.gate_attempts),
                )),
                None => Ok((false, "gate never evaluated".into())),
            }
        }
        Expectation::GateWinExcludes { winner, loser, recipe } => {
            let traces = run_batch(net, &recipe.config(), recipe.runs)?;
            let mut gated = 0;
            for t in &traces {
                if gate_passed(t, winner) {
                    gated += 1;
                    if !t.fired(winner) || t.fired(loser) {
                        return Ok((false, format!("seed {}: {winner} gate passed but {loser} won", t.seed)));
                    }
                }
            }
            Ok((gated > 0, format!("{gated} of {} runs had the gate pass", traces.len())))
        }
        Expectation::EnabledExactlyWhen {
            transitions,
            places,
            on_set,
        } => {
            let ids = transitions
                .iter()
                .map(|t| net.transition_id(t))
                .collect::<Result<Vec<_>, _>>()?;
            let pids = places.iter().map(|p| net.place_id(p)).collect::<Result<Vec<_>, _>>()?;
            let n = places.len();
            for v in 0..(1u32 << n) {
                let mut m = Marking::zeros(net.places().len());
                for (i, &p) in pids.iter().enumerate() {
                    m.0[p] = v >> (n - 1 - i) & 1;
                }
                let mut enabled = false;
                for &t in &ids {
                    enabled |= net.is_enabled(&m, t)?;
                }
                if enabled != on_set.contains(&v) {
                    return Ok((false, format!("at {m} enabled={enabled}")));
                }
            }
            Ok((true, format!("all {} assignments agree", 1u32 << n)))
        }
        Expectation::EnabledCountAt { tokens, count } => {
            let pairs: Vec<(&str, u32)> = tokens.iter().map(|(p, n)| (p.as_str(), *n)).collect();
            let m = net.marking_of(&pairs)?;
            let enabled = net.enabled_names(&m)?;
            Ok((
                enabled.len() == *count,
                format!("enabled at {m}: {}", enabled.join(",")),
            ))
        }
        Expectation::TerminalMarkings(expected) => {
            let g = reachability_graph(net, MAX_NODES, MAX_TOKENS);
            if g.truncated {
                return Err(AnalysisError::Truncated.into());
            }
            let found: BTreeSet<Marking> = detect_deadlocks(&g).into_iter().collect();
            let want: BTreeSet<Marking> = expected.iter().cloned().collect();
            let shown: Vec<String> = found.iter().map(|m| m.to_string()).collect();
            Ok((found == want, format!("dead markings {{{}}}", shown.join(", "))))
        }
        Expectation::OnlyTransitionDecreases { place, transition } => {
            let p = net.place_id(place)?;
            net.transition_id(transition)?;
            let g = reachability_graph(net, MAX_NODES, MAX_TOKENS);
            if g.truncated {
                return Err(AnalysisError::Truncated.into());
            }
            let mut by_target = 0;
            for e in &g.edges {
                if g.nodes[e.to][p] < g.nodes[e.from][p] {
                    if &e.transition != transition {
                        return Ok((false, format!("{} lowers {place}", e.transition)));
                    }
                    by_target += 1;
                }
            }
            Ok((by_target > 0, format!("{by_target} edges lower {place}")))
        }
        Expectation::EmptiesBeforeFirstCompletion {
            place,
            transition,
            recipe,
        } => {
            let p = net.place_id(place)?;
            net.transition_id(transition)?;
            let trace = run(net, &recipe.config())?;
            let emptied = trace.events.iter().find(|e| e.post[p] == 0).map(|e| e.time);
            let first = trace
                .events
                .iter()
                .find(|e| &e.transition == transition)
                .map(|e| e.time);
            let passed = match (emptied, first) {
                (Some(a), Some(b)) => a < b,
                (Some(_), None) => true,
                _ => false,
            };
            Ok((
                passed,
                format!("{place} empty at {emptied:?}, {transition} first at {first:?}"),
            ))
        }
        Expectation::PlaceSumInvariant { places, total } => {
            let ids = places.iter().map(|p| net.place_id(p)).collect::<Result<Vec<_>, _>>()?;
            let g = reachability_graph(net, MAX_NODES, MAX_TOKENS);
            if g.truncated {
                return Err(AnalysisError::Truncated.into());
            }
            for m in &g.nodes {
                let sum: u32 = ids.iter().map(|&p| m[p]).sum();
                if sum != *total {
                    return Ok((false, format!("sum {sum} at {m}")));
                }
            }
            Ok((true, format!("holds on {} markings", g.nodes.len())))
        }
        Expectation::NoDeadlockWhile { place } => {
            let p = net.place_id(place)?;
            let g = reachability_graph(net, MAX_NODES, MAX_TOKENS);
            if g.truncated {
                return Err(AnalysisError::Truncated.into());
            }
            match detect_deadlocks(&g).into_iter().find(|m| m[p] > 0) {
                Some(m) => Ok((false, format!("dead at {m}"))),
                None => Ok((true, format!("{} reachable markings explored", g.nodes.len()))),
            }
        }
    }
}

/// Checks every registered scenario, in parallel, in registry order.
pub fn check_all() -> Vec<(String, Result<Vec<CheckResult>, PuzzleError>)> {
    SCENARIOS
        .par_iter()
        .map(|n| {
            let result = build(n).and_then(|s| s.check());
            (n.to_string(), result)
        })
        .collect()
}
