//! Neuron diagrams: acyclic graphs of stimulatory and inhibitory links.
//!
//! A start node (no incoming links) is active iff it is shaded. Any other
//! node is active iff at least one active node stimulates it and no active
//! node inhibits it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::FormalismError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    Stimulatory,
    Inhibitory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuronNode {
    pub name: String,
    /// Only meaningful for start nodes.
    pub shaded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuronLink {
    pub source: String,
    pub target: String,
    pub kind: LinkKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NeuronDiagram {
    pub name: String,
    pub nodes: Vec<NeuronNode>,
    pub links: Vec<NeuronLink>,
}

impl NeuronDiagram {
    pub fn new(name: impl Into<String>) -> Self {
        NeuronDiagram {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn node(mut self, name: &str, shaded: bool) -> Self {
        self.nodes.push(NeuronNode {
            name: name.to_string(),
            shaded,
        });
        self
    }

    pub fn stim(self, source: &str, target: &str) -> Self {
        self.link(source, target, LinkKind::Stimulatory)
    }

    pub fn inhib(self, source: &str, target: &str) -> Self {
        self.link(source, target, LinkKind::Inhibitory)
    }

    fn link(mut self, source: &str, target: &str, kind: LinkKind) -> Self {
        self.links.push(NeuronLink {
            source: source.to_string(),
            target: target.to_string(),
            kind,
        });
        self
    }

    fn index(&self, name: &str) -> Result<usize, FormalismError> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| FormalismError::UnknownNode(name.to_string()))
    }

    /// Kahn topological order of node indices.
    pub fn topological_order(&self) -> Result<Vec<usize>, FormalismError> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for l in &self.links {
            let (s, t) = (self.index(&l.source)?, self.index(&l.target)?);
            indegree[t] += 1;
            succ[s].push(t);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            order.push(i);
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        if order.len() != n {
            return Err(FormalismError::Cyclic(self.name.clone()));
        }
        Ok(order)
    }
}

/// Activation of every node.
pub fn neuron_evaluate(d: &NeuronDiagram) -> Result<BTreeMap<String, bool>, FormalismError> {
    let order = d.topological_order()?;
    let mut active = vec![false; d.nodes.len()];
    let mut incoming: Vec<Vec<(usize, LinkKind)>> = vec![Vec::new(); d.nodes.len()];
    for l in &d.links {
        incoming[d.index(&l.target)?].push((d.index(&l.source)?, l.kind));
    }
    for i in order {
        active[i] = if incoming[i].is_empty() {
            d.nodes[i].shaded
        } else {
            let stimulated = incoming[i]
                .iter()
                .any(|&(s, k)| k == LinkKind::Stimulatory && active[s]);
            let inhibited = incoming[i].iter().any(|&(s, k)| k == LinkKind::Inhibitory && active[s]);
            stimulated && !inhibited
        };
    }
    Ok(d.nodes.iter().zip(active).map(|(n, a)| (n.name.clone(), a)).collect())
}
