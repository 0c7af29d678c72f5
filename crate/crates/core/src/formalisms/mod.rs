//! Causal formalisms that Petri nets are compared against: neuron diagrams,
//! Boolean causal models, adverb-weighted probabilistic chains and fuzzy
//! cognitive maps.

pub mod boolean;
pub mod chain;
pub mod fcm;
pub mod neuron;

use thiserror::Error;

pub use boolean::{bool_evaluate, parse_truth_table, qm_minimize, BooleanCausalModel, Dnf, TruthTable};
pub use chain::{chain_probability, fuse_adverbs, sample_link, AdverbDistribution, ChainGraph, LinkMode};
pub use fcm::{fcm_run, fcm_step, FuzzyCognitiveMap};
pub use neuron::{neuron_evaluate, NeuronDiagram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormalismError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("graph `{0}` contains a cycle")]
    Cyclic(String),
    #[error("`{0}` cannot cause itself")]
    SelfCause(String),
    #[error("edge {cause} -> {effect} would close a causal cycle")]
    CycleClosed { cause: String, effect: String },
    #[error("no edge {cause} -> {effect} on the path")]
    MissingEdge { cause: String, effect: String },
    #[error("a path needs at least two nodes")]
    PathTooShort,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("cannot fuse an empty list of distributions")]
    EmptyDistributionList,
    #[error("variable `{0}` has no value in the assignment")]
    MissingVariable(String),
    #[error("undeclared variable `{0}`")]
    UnknownVariable(String),
    #[error("cluster lists must be non-empty with non-empty clusters")]
    EmptyCluster,
    #[error("minimisation needs at least one variable")]
    NoVariables,
    #[error("{0} variables exceed the supported maximum")]
    TooManyVariables(usize),
    #[error("minterm {minterm} does not fit in {variables} variables")]
    InvalidMinterm { minterm: u32, variables: usize },
    #[error("truth table line {line}: {message}")]
    TruthTable { line: usize, message: String },
    #[error("value {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("history holds {found} states, {needed} needed")]
    InsufficientHistory { needed: usize, found: usize },
    #[error("state has {found} activations, expected {expected}")]
    StateLength { expected: usize, found: usize },
}
