//! Probabilistic causal chains whose link strengths come from frequency
//! adverbs, each modelled as a Gaussian over `[0, 1]`.
//!
//! The probability of reaching the end of a path is the product of the link
//! strengths along it; the cause at the head of the path is taken as given.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::FormalismError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdverbDistribution {
    pub adverb: String,
    pub mean: f64,
    pub stddev: f64,
}

impl AdverbDistribution {
    pub fn new(adverb: impl Into<String>, mean: f64, stddev: f64) -> Result<Self, FormalismError> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(FormalismError::InvalidDistribution(format!(
                "mean {mean} outside [0, 1]"
            )));
        }
        if !(stddev.is_finite() && stddev > 0.0) {
            return Err(FormalismError::InvalidDistribution(format!(
                "stddev {stddev} must be > 0"
            )));
        }
        Ok(AdverbDistribution {
            adverb: adverb.into(),
            mean,
            stddev,
        })
    }

    pub fn variance(&self) -> f64 {
        self.stddev * self.stddev
    }
}

/// Normalised product of Gaussian factors: precision-weighted mean and
/// summed precision. The fused mean is clamped into `[0, 1]`.
pub fn fuse_adverbs(distributions: &[AdverbDistribution]) -> Result<AdverbDistribution, FormalismError> {
    match distributions {
        [] => Err(FormalismError::EmptyDistributionList),
        [only] => Ok(only.clone()),
        _ => {
            let precision: f64 = distributions.iter().map(|d| 1.0 / d.variance()).sum();
            let weighted: f64 = distributions.iter().map(|d| d.mean / d.variance()).sum();
            let adverb = distributions
                .iter()
                .map(|d| d.adverb.as_str())
                .collect::<Vec<_>>()
                .join("+");
            Ok(AdverbDistribution {
                adverb,
                mean: (weighted / precision).clamp(0.0, 1.0),
                stddev: (1.0 / precision).sqrt(),
            })
        }
    }
}

/// One draw from the Gaussian truncated to `[0, 1]`, by rejection.
pub fn sample_link<R: Rng + ?Sized>(dist: &AdverbDistribution, rng: &mut R) -> f64 {
    let normal = Normal::new(dist.mean, dist.stddev).expect("validated distribution");
    loop {
        let x = normal.sample(rng);
        if (0.0..=1.0).contains(&x) {
            return x;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEdge {
    pub cause: String,
    pub effect: String,
    pub strengths: Vec<AdverbDistribution>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChainGraph {
    pub name: String,
    /// First-appearance order.
    pub nodes: Vec<String>,
    pub edges: Vec<ChainEdge>,
}

/// How a multi-adverb edge is reduced to one number.
pub enum LinkMode<'a, R: Rng + ?Sized> {
    Fused,
    Sampled(&'a mut R),
}

impl ChainGraph {
    pub fn new(name: impl Into<String>) -> Self {
        ChainGraph {
            name: name.into(),
            ..Default::default()
        }
    }

    fn ensure_node(&mut self, n: &str) {
        if !self.nodes.iter().any(|x| x == n) {
            self.nodes.push(n.to_string());
        }
    }

    /// Whether `to` is reachable from `from` along existing edges.
    pub fn reaches(&self, from: &str, to: &str) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![from];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            for e in self.edges.iter().filter(|e| e.cause == n) {
                if !seen.contains(&e.effect.as_str()) {
                    seen.push(&e.effect);
                    stack.push(&e.effect);
                }
            }
        }
        false
    }

    /// Adds one adverb observation to the edge `cause -> effect`, creating it
    /// if needed. Self-loops and edges closing a directed cycle are refused.
    pub fn add_link(&mut self, cause: &str, effect: &str, dist: AdverbDistribution) -> Result<(), FormalismError> {
        if cause == effect {
            return Err(FormalismError::SelfCause(cause.to_string()));
        }
        if let Some(edge) = self.edges.iter_mut().find(|e| e.cause == cause && e.effect == effect) {
            edge.strengths.push(dist);
            return Ok(());
        }
        if self.reaches(effect, cause) {
            return Err(FormalismError::CycleClosed {
                cause: cause.to_string(),
                effect: effect.to_string(),
            });
        }
        self.ensure_node(cause);
        self.ensure_node(effect);
        self.edges.push(ChainEdge {
            cause: cause.to_string(),
            effect: effect.to_string(),
            strengths: vec![dist],
        });
        Ok(())
    }

    pub fn edge(&self, cause: &str, effect: &str) -> Option<&ChainEdge> {
        self.edges.iter().find(|e| e.cause == cause && e.effect == effect)
    }
}

/// Product of the link strengths along `path`.
pub fn chain_probability<R: Rng + ?Sized>(
    g: &ChainGraph,
    path: &[&str],
    mut mode: LinkMode<'_, R>,
) -> Result<f64, FormalismError> {
    if path.len() < 2 {
        return Err(FormalismError::PathTooShort);
    }
    let mut p = 1.0;
    for pair in path.windows(2) {
        let edge = g.edge(pair[0], pair[1]).ok_or_else(|| FormalismError::MissingEdge {
            cause: pair[0].to_string(),
            effect: pair[1].to_string(),
        })?;
        let fused = fuse_adverbs(&edge.strengths)?;
        p *= match &mut mode {
            LinkMode::Fused => fused.mean,
            LinkMode::Sampled(rng) => sample_link(&fused, *rng),
        };
    }
    Ok(p)
}

/// [`chain_probability`] with fused link strengths.
pub fn chain_probability_fused(g: &ChainGraph, path: &[&str]) -> Result<f64, FormalismError> {
    chain_probability::<rand_chacha::ChaCha8Rng>(g, path, LinkMode::Fused)
}
