use std::fmt::Write;

use super::{Document, Item};
use crate::formalisms::chain::ChainGraph;
use crate::formalisms::fcm::FuzzyCognitiveMap;
use crate::formalisms::neuron::{LinkKind, NeuronDiagram};
use crate::fuzzy::NormKind;
use crate::net::{Arc, NetDef};
use crate::timing::Delay;

fn arcs(list: &[Arc]) -> String {
    list.iter()
        .map(|a| {
            if a.weight == 1 {
                a.place.clone()
            } else {
                format!("{}:{}", a.place, a.weight)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn delay(d: &Delay) -> String {
    match *d {
        Delay::Immediate => "imm".into(),
        Delay::Deterministic { delay } => format!("det({delay})"),
        Delay::Exponential { rate } => format!("exp({rate})"),
        Delay::Uniform { lo, hi } => format!("unif({lo},{hi})"),
    }
}

fn net(out: &mut String, n: &NetDef) {
    writeln!(out, "net {}", n.name).unwrap();
    for (i, p) in n.places.iter().enumerate() {
        match n.initial_marking.counts().get(i).copied().unwrap_or(0) {
            0 => writeln!(out, "  place {p}").unwrap(),
            k => writeln!(out, "  place {p} tokens={k}").unwrap(),
        }
    }
    for t in &n.transitions {
        let mut line = format!("  trans {}", t.name);
        if !t.inputs.is_empty() {
            write!(line, " in {}", arcs(&t.inputs)).unwrap();
        }
        if !t.outputs.is_empty() {
            write!(line, " out {}", arcs(&t.outputs)).unwrap();
        }
        if t.timing.delay != Delay::Immediate {
            write!(line, " delay={}", delay(&t.timing.delay)).unwrap();
        }
        if let Some(g) = &t.timing.gate {
            write!(line, " fuzzy={}", g.name).unwrap();
        }
        if t.timing.conflict_weight != 1.0 {
            write!(line, " weight={}", t.timing.conflict_weight).unwrap();
        }
        writeln!(out, "{line}").unwrap();
    }
    out.push_str("end\n");
}

fn chain(out: &mut String, g: &ChainGraph) {
    writeln!(out, "chain {}", g.name).unwrap();
    for e in &g.edges {
        for s in &e.strengths {
            writeln!(
                out,
                "  edge {} -> {} adverb \"{}\" mean={} std={}",
                e.cause, e.effect, s.adverb, s.mean, s.stddev
            )
            .unwrap();
        }
    }
    out.push_str("end\n");
}

fn fcm(out: &mut String, m: &FuzzyCognitiveMap) {
    writeln!(out, "fcm {}", m.name).unwrap();
    for c in &m.concepts {
        writeln!(out, "  concept {} init={}", c.name, c.init).unwrap();
    }
    for e in &m.edges {
        write!(out, "  edge {} -> {} w={}", e.source, e.target, e.weight).unwrap();
        if e.delay != 0 {
            write!(out, " delay={}", e.delay).unwrap();
        }
        out.push('\n');
    }
    if m.disjunction != NormKind::default() || m.conjunction != NormKind::default() {
        writeln!(
            out,
            "  aggregate or={} and={}",
            m.disjunction.as_str(),
            m.conjunction.as_str()
        )
        .unwrap();
    }
    out.push_str("end\n");
}

fn neuron(out: &mut String, d: &NeuronDiagram) {
    writeln!(out, "neuron {}", d.name).unwrap();
    for n in &d.nodes {
        if n.shaded {
            writeln!(out, "  node {} shaded", n.name).unwrap();
        } else {
            writeln!(out, "  node {}", n.name).unwrap();
        }
    }
    for l in &d.links {
        let kw = match l.kind {
            LinkKind::Stimulatory => "stim",
            LinkKind::Inhibitory => "inhib",
        };
        writeln!(out, "  {kw} {} -> {}", l.source, l.target).unwrap();
    }
    out.push_str("end\n");
}

/// Canonical text: declaration order kept, defaults omitted, two-space
/// indentation inside blocks and one blank line between items.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    for (i, item) in doc.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Net(n) => net(&mut out, n),
            Item::Label(l) => writeln!(out, "label {} {}", l.name, l.shape).unwrap(),
            Item::Chain(g) => chain(&mut out, g),
            Item::Fcm(m) => fcm(&mut out, m),
            Item::Neuron(d) => neuron(&mut out, d),
            Item::TruthTable { name, path } => writeln!(out, "truthtable {name} \"{path}\"").unwrap(),
        }
    }
    out
}
