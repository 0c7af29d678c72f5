//! Place/transition nets: structure, enabling rule, firing rule.
//!
//! A [`NetDef`] is the plain description as written by a user or the DSL; it
//! may be ill-formed, and [`validate`] lists what is wrong with it. A [`Net`]
//! is a checked, index-resolved net and is what every operation runs on.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timing::TimingSpec;

/// Token counts indexed by place declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn new(counts: Vec<u32>) -> Self {
        Marking(counts)
    }

    pub fn zeros(len: usize) -> Self {
        Marking(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }
}

impl std::ops::Index<usize> for Marking {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for Marking {
    fn from(v: Vec<u32>) -> Self {
        Marking(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub place: String,
    pub weight: u32,
}

impl Arc {
    pub fn new(place: impl Into<String>, weight: u32) -> Self {
        Arc {
            place: place.into(),
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDef {
    pub name: String,
    pub inputs: Vec<Arc>,
    pub outputs: Vec<Arc>,
    pub timing: TimingSpec,
}

/// Unchecked net description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDef {
    pub name: String,
    pub places: Vec<String>,
    pub transitions: Vec<TransitionDef>,
    pub initial_marking: Marking,
}

impl NetDef {
    pub fn new(name: impl Into<String>) -> Self {
        NetDef {
            name: name.into(),
            places: Vec::new(),
            transitions: Vec::new(),
            initial_marking: Marking::default(),
        }
    }

    /// Appends a place holding `tokens` initially.
    pub fn place(mut self, name: impl Into<String>, tokens: u32) -> Self {
        self.places.push(name.into());
        self.initial_marking.0.push(tokens);
        self
    }

    /// Appends a transition. Arcs are `(place, weight)` pairs.
    pub fn transition(
        mut self,
        name: impl Into<String>,
        inputs: &[(&str, u32)],
        outputs: &[(&str, u32)],
        timing: TimingSpec,
    ) -> Self {
        self.transitions.push(TransitionDef {
            name: name.into(),
            inputs: inputs.iter().map(|&(p, w)| Arc::new(p, w)).collect(),
            outputs: outputs.iter().map(|&(p, w)| Arc::new(p, w)).collect(),
            timing,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    DuplicateIdentifier(String),
    UndefinedPlace { transition: String, place: String },
    DuplicateArc { transition: String, place: String },
    ZeroWeight { transition: String, place: String },
    MarkingLength { expected: usize, found: usize },
    InvalidTiming { transition: String, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateIdentifier(id) => write!(f, "duplicate identifier `{id}`"),
            Violation::UndefinedPlace { transition, place } => {
                write!(f, "transition `{transition}` references undeclared place `{place}`")
            }
            Violation::DuplicateArc { transition, place } => {
                write!(f, "transition `{transition}` has two arcs on place `{place}`")
            }
            Violation::ZeroWeight { transition, place } => {
                write!(f, "arc between `{transition}` and `{place}` has weight 0")
            }
            Violation::MarkingLength { expected, found } => {
                write!(f, "initial marking has {found} entries, expected {expected}")
            }
            Violation::InvalidTiming { transition, reason } => {
                write!(f, "transition `{transition}`: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a net description. Violations are
/// data: an empty report means the description is well formed.
pub fn validate(def: &NetDef) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for id in def.places.iter().chain(def.transitions.iter().map(|t| &t.name)) {
        if !seen.insert(id.as_str()) {
            violations.push(Violation::DuplicateIdentifier(id.clone()));
        }
    }
    let places: HashSet<&str> = def.places.iter().map(String::as_str).collect();
    for t in &def.transitions {
        for arcs in [&t.inputs, &t.outputs] {
            let mut on_place = HashSet::new();
            for arc in arcs {
                if !places.contains(arc.place.as_str()) {
                    violations.push(Violation::UndefinedPlace {
                        transition: t.name.clone(),
                        place: arc.place.clone(),
                    });
                }
                if arc.weight == 0 {
                    violations.push(Violation::ZeroWeight {
                        transition: t.name.clone(),
                        place: arc.place.clone(),
                    });
                }
                if !on_place.insert(arc.place.as_str()) {
                    violations.push(Violation::DuplicateArc {
                        transition: t.name.clone(),
                        place: arc.place.clone(),
                    });
                }
            }
        }
        if let Err(reason) = t.timing.check() {
            violations.push(Violation::InvalidTiming {
                transition: t.name.clone(),
                reason,
            });
        }
    }
    if def.initial_marking.len() != def.places.len() {
        violations.push(Violation::MarkingLength {
            expected: def.places.len(),
            found: def.initial_marking.len(),
        });
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("marking has {found} entries but the net has {expected} places")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("transition `{transition}` is not enabled: place `{place}` holds {available} of {required} tokens")]
    NotEnabled {
        transition: String,
        place: String,
        required: u32,
        available: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionKind {
    Source,
    Sink,
    Internal,
}

/// Transition index into [`Net::transitions`].
pub type TransitionId = usize;
/// Place index into the marking vector.
pub type PlaceId = usize;

#[derive(Debug, Clone, PartialEq)]
struct Resolved {
    inputs: Vec<(PlaceId, u32)>,
    outputs: Vec<(PlaceId, u32)>,
}

/// A validated net with arcs resolved to place indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    def: NetDef,
    resolved: Vec<Resolved>,
    place_index: HashMap<String, PlaceId>,
    transition_index: HashMap<String, TransitionId>,
}

impl Net {
    pub fn new(def: NetDef) -> Result<Self, ValidationReport> {
        let report = validate(&def);
        if !report.is_empty() {
            return Err(report);
        }
        let place_index: HashMap<String, PlaceId> =
            def.places.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let transition_index = def
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| (t.name.clone(), i))
            .collect();
        let resolve = |arcs: &[Arc]| arcs.iter().map(|a| (place_index[&a.place], a.weight)).collect();
        let resolved = def
            .transitions
            .iter()
            .map(|t| Resolved {
                inputs: resolve(&t.inputs),
                outputs: resolve(&t.outputs),
            })
            .collect();
        Ok(Net {
            def,
            resolved,
            place_index,
            transition_index,
        })
    }

    pub fn def(&self) -> &NetDef {
        &self.def
    }

    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn places(&self) -> &[String] {
        &self.def.places
    }

    pub fn transitions(&self) -> &[TransitionDef] {
        &self.def.transitions
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.def.initial_marking
    }

    pub fn place_id(&self, name: &str) -> Result<PlaceId, NetError> {
        self.place_index
            .get(name)
            .copied()
            .ok_or_else(|| NetError::UnknownPlace(name.to_string()))
    }

    pub fn transition_id(&self, name: &str) -> Result<TransitionId, NetError> {
        self.transition_index
            .get(name)
            .copied()
            .ok_or_else(|| NetError::UnknownTransition(name.to_string()))
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.def.transitions[t].name
    }

    pub fn inputs(&self, t: TransitionId) -> &[(PlaceId, u32)] {
        &self.resolved[t].inputs
    }

    pub fn outputs(&self, t: TransitionId) -> &[(PlaceId, u32)] {
        &self.resolved[t].outputs
    }

    pub fn timing(&self, t: TransitionId) -> &TimingSpec {
        &self.def.transitions[t].timing
    }

    fn check_dims(&self, m: &Marking) -> Result<(), NetError> {
        if m.len() != self.def.places.len() {
            return Err(NetError::DimensionMismatch {
                expected: self.def.places.len(),
                found: m.len(),
            });
        }
        Ok(())
    }

    /// First input place lacking tokens, if any.
    pub(crate) fn blocking_place(&self, m: &Marking, t: TransitionId) -> Option<(PlaceId, u32)> {
        self.resolved[t].inputs.iter().find(|&&(p, w)| m[p] < w).copied()
    }

    pub(crate) fn is_enabled_unchecked(&self, m: &Marking, t: TransitionId) -> bool {
        self.blocking_place(m, t).is_none()
    }

    pub(crate) fn fire_unchecked(&self, m: &Marking, t: TransitionId) -> Marking {
        let mut next = m.clone();
        for &(p, w) in &self.resolved[t].inputs {
            next.0[p] -= w;
        }
        for &(p, w) in &self.resolved[t].outputs {
            next.0[p] += w;
        }
        next
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> Result<bool, NetError> {
        self.check_dims(m)?;
        Ok(self.is_enabled_unchecked(m, t))
    }

    /// Transitions whose every input place holds at least the arc weight, in
    /// declaration order. Source transitions are always included.
    pub fn enabled_transitions(&self, m: &Marking) -> Result<Vec<TransitionId>, NetError> {
        self.check_dims(m)?;
        Ok((0..self.resolved.len())
            .filter(|&t| self.is_enabled_unchecked(m, t))
            .collect())
    }

    /// Names of [`Net::enabled_transitions`].
    pub fn enabled_names(&self, m: &Marking) -> Result<Vec<&str>, NetError> {
        Ok(self
            .enabled_transitions(m)?
            .into_iter()
            .map(|t| self.transition_name(t))
            .collect())
    }

    /// Fires `t` at `m`, returning the successor marking.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, NetError> {
        self.check_dims(m)?;
        if let Some((p, w)) = self.blocking_place(m, t) {
            return Err(NetError::NotEnabled {
                transition: self.transition_name(t).to_string(),
                place: self.def.places[p].clone(),
                required: w,
                available: m[p],
            });
        }
        Ok(self.fire_unchecked(m, t))
    }

    pub fn fire_named(&self, m: &Marking, name: &str) -> Result<Marking, NetError> {
        let t = self.transition_id(name)?;
        self.fire(m, t)
    }

    /// Isolated transitions (no arcs at all) are reported as sources.
    pub fn classify_transition(&self, name: &str) -> Result<TransitionKind, NetError> {
        let t = self.transition_id(name)?;
        let r = &self.resolved[t];
        Ok(if r.inputs.is_empty() {
            TransitionKind::Source
        } else if r.outputs.is_empty() {
            TransitionKind::Sink
        } else {
            TransitionKind::Internal
        })
    }

    /// Builds a marking from `(place, tokens)` pairs; unnamed places are 0.
    pub fn marking_of(&self, tokens: &[(&str, u32)]) -> Result<Marking, NetError> {
        let mut m = Marking::zeros(self.def.places.len());
        for &(p, n) in tokens {
            m.0[self.place_id(p)?] = n;
        }
        Ok(m)
    }

    /// Net change `output - input` on each place when `t` fires.
    pub fn incidence(&self, t: TransitionId) -> BTreeMap<PlaceId, i64> {
        let mut delta = BTreeMap::new();
        for &(p, w) in &self.resolved[t].inputs {
            *delta.entry(p).or_insert(0) -= w as i64;
        }
        for &(p, w) in &self.resolved[t].outputs {
            *delta.entry(p).or_insert(0) += w as i64;
        }
        delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timing::TimingSpec;

    fn imm() -> TimingSpec {
        TimingSpec::immediate()
    }

    pub(crate) fn sync_choice() -> Net {
        Net::new(
            NetDef::new("sync_choice")
                .place("p1", 2)
                .place("p2", 2)
                .place("p3", 0)
                .place("p4", 0)
                .place("p5", 0)
                .transition("t1", &[("p1", 2), ("p2", 1)], &[("p3", 1)], imm())
                .transition("t2", &[("p3", 1)], &[("p4", 1)], imm())
                .transition("t3", &[("p3", 1)], &[("p5", 1)], imm()),
        )
        .unwrap()
    }

    fn job_market() -> Net {
        Net::new(
            NetDef::new("job_market")
                .place("demands", 3)
                .place("offer", 1)
                .place("interview", 0)
                .place("hired", 0)
                .transition("t1", &[("demands", 1), ("offer", 1)], &[("interview", 1)], imm())
                .transition("t2", &[("interview", 1)], &[("offer", 1), ("hired", 1)], imm()),
        )
        .unwrap()
    }

    #[test]
    fn sync_choice_enabling_and_firing() {
        let net = sync_choice();
        let m0 = net.initial_marking().clone();
        assert_eq!(m0, Marking(vec![2, 2, 0, 0, 0]));
        assert_eq!(net.enabled_names(&m0).unwrap(), vec!["t1"]);
        let m1 = net.fire_named(&m0, "t1").unwrap();
        assert_eq!(m1, Marking(vec![0, 1, 1, 0, 0]));
        assert_eq!(net.enabled_names(&m1).unwrap(), vec!["t2", "t3"]);
        assert_eq!(net.fire_named(&m1, "t2").unwrap(), Marking(vec![0, 1, 0, 1, 0]));
        assert_eq!(net.fire_named(&m1, "t3").unwrap(), Marking(vec![0, 1, 0, 0, 1]));
        // input marking untouched
        assert_eq!(m1, Marking(vec![0, 1, 1, 0, 0]));
    }

    #[test]
    fn job_market_markings() {
        let net = job_market();
        let m0 = net.initial_marking().clone();
        let m1 = net.fire_named(&m0, "t1").unwrap();
        assert_eq!(m1, Marking(vec![2, 0, 1, 0]));
        let m2 = net.fire_named(&m1, "t2").unwrap();
        assert_eq!(m2, Marking(vec![2, 1, 0, 1]));
    }

    #[test]
    fn disabled_fire_names_blocking_place() {
        let net = sync_choice();
        let err = net.fire_named(net.initial_marking(), "t2").unwrap_err();
        assert_eq!(
            err,
            NetError::NotEnabled {
                transition: "t2".into(),
                place: "p3".into(),
                required: 1,
                available: 0
            }
        );
    }

    #[test]
    fn dimension_mismatch() {
        let net = sync_choice();
        let err = net.enabled_transitions(&Marking(vec![1, 1])).unwrap_err();
        assert!(matches!(err, NetError::DimensionMismatch { expected: 5, found: 2 }));
    }

    #[test]
    fn zero_marking_without_sources_enables_nothing() {
        let net = sync_choice();
        assert!(net.enabled_transitions(&Marking::zeros(5)).unwrap().is_empty());
    }

    #[test]
    fn classification() {
        let net = Net::new(
            NetDef::new("k")
                .place("p", 0)
                .transition("src", &[], &[("p", 1)], imm())
                .transition("snk", &[("p", 1)], &[], imm())
                .transition("mid", &[("p", 1)], &[("p", 1)], imm())
                .transition("iso", &[], &[], imm()),
        )
        .unwrap();
        assert_eq!(net.classify_transition("src").unwrap(), TransitionKind::Source);
        assert_eq!(net.classify_transition("snk").unwrap(), TransitionKind::Sink);
        assert_eq!(net.classify_transition("mid").unwrap(), TransitionKind::Internal);
        assert_eq!(net.classify_transition("iso").unwrap(), TransitionKind::Source);
        assert!(net.classify_transition("nope").is_err());
        assert_eq!(
            sync_choice().classify_transition("t1").unwrap(),
            TransitionKind::Internal
        );
        // source transitions are enabled at the empty marking
        assert_eq!(net.enabled_names(&Marking::zeros(1)).unwrap(), vec!["src", "iso"]);
    }

    #[test]
    fn validation_reports() {
        assert!(validate(sync_choice().def()).is_empty());

        let dangling = NetDef::new("d")
            .place("p1", 1)
            .transition("t1", &[("p9", 1)], &[("p1", 1)], imm());
        let report = validate(&dangling);
        assert_eq!(
            report.violations,
            vec![Violation::UndefinedPlace {
                transition: "t1".into(),
                place: "p9".into()
            }]
        );

        let zero = NetDef::new("z")
            .place("p1", 1)
            .transition("t1", &[("p1", 0)], &[], imm());
        assert_eq!(
            validate(&zero).violations,
            vec![Violation::ZeroWeight {
                transition: "t1".into(),
                place: "p1".into()
            }]
        );

        let mut dup = NetDef::new("x").place("a", 0).transition("a", &[], &[], imm());
        dup.initial_marking = Marking(vec![]);
        let v = validate(&dup).violations;
        assert!(v.contains(&Violation::DuplicateIdentifier("a".into())));
        assert!(v.contains(&Violation::MarkingLength { expected: 1, found: 0 }));
        assert!(Net::new(dup).is_err());
    }

    #[test]
    fn synchronization_needs_both_inputs() {
        let net = Net::new(
            NetDef::new("join")
                .place("a", 0)
                .place("b", 0)
                .place("c", 0)
                .transition("t", &[("a", 1), ("b", 1)], &[("c", 1)], imm()),
        )
        .unwrap();
        for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let m = Marking(vec![a, b, 0]);
            assert_eq!(net.is_enabled(&m, 0).unwrap(), a == 1 && b == 1);
        }
    }
}
