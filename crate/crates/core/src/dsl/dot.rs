//! Graphviz output. Style table:
//!
//! | element                | rendering                               |
//! |------------------------|-----------------------------------------|
//! | place                  | `shape=circle`, label `name\ntokens`    |
//! | transition             | `shape=box`                             |
//! | arc weight > 1         | edge `label="w"`                        |
//! | reachability node      | `shape=box`, label is the marking       |
//! | deadlock marking       | `peripheries=2`                         |
//! | shaded neuron          | `style=filled, fillcolor=gray`          |
//! | stimulatory link       | default solid arrow                     |
//! | inhibitory link        | `style=dashed, arrowhead=dot`           |
//! | chain edge             | label is the fused mean strength        |

use std::fmt::Write;

use crate::analysis::{detect_deadlocks, ReachabilityGraph};
use crate::formalisms::chain::{fuse_adverbs, ChainGraph};
use crate::formalisms::fcm::FuzzyCognitiveMap;
use crate::formalisms::neuron::{LinkKind, NeuronDiagram};
use crate::net::NetDef;

pub trait ToDot {
    fn to_dot(&self) -> String;
}

pub fn export_dot<T: ToDot + ?Sized>(item: &T) -> String {
    item.to_dot()
}

fn q(s: &str) -> String {
    format!(
        "\"{}\"",
        s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
    )
}

fn open(out: &mut String, name: &str) {
    writeln!(out, "digraph {} {{", q(name)).unwrap();
    out.push_str("  rankdir=LR;\n");
}

impl ToDot for NetDef {
    fn to_dot(&self) -> String {
        let mut out = String::new();
        open(&mut out, &self.name);
        for (i, p) in self.places.iter().enumerate() {
            let tokens = self.initial_marking.counts().get(i).copied().unwrap_or(0);
            writeln!(
                out,
                "  {} [shape=circle, label={}];",
                q(&format!("p:{p}")),
                q(&format!("{p}\n{tokens}"))
            )
            .unwrap();
        }
        for t in &self.transitions {
            writeln!(
                out,
                "  {} [shape=box, label={}];",
                q(&format!("t:{}", t.name)),
                q(&t.name)
            )
            .unwrap();
        }
        for t in &self.transitions {
            let tn = q(&format!("t:{}", t.name));
            let weight = |w: u32| {
                if w > 1 {
                    format!(" [label=\"{w}\"]")
                } else {
                    String::new()
                }
            };
            for a in &t.inputs {
                writeln!(out, "  {} -> {}{};", q(&format!("p:{}", a.place)), tn, weight(a.weight)).unwrap();
            }
            for a in &t.outputs {
                writeln!(out, "  {} -> {}{};", tn, q(&format!("p:{}", a.place)), weight(a.weight)).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

impl ToDot for ReachabilityGraph {
    fn to_dot(&self) -> String {
        let mut out = String::new();
        open(&mut out, "reachability");
        let dead = detect_deadlocks(self);
        for (i, m) in self.nodes.iter().enumerate() {
            let extra = if dead.contains(m) { ", peripheries=2" } else { "" };
            writeln!(out, "  m{i} [shape=box, label={}{extra}];", q(&m.to_string())).unwrap();
        }
        for e in &self.edges {
            writeln!(out, "  m{} -> m{} [label={}];", e.from, e.to, q(&e.transition)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

impl ToDot for ChainGraph {
    fn to_dot(&self) -> String {
        let mut out = String::new();
        open(&mut out, &self.name);
        for n in &self.nodes {
            writeln!(out, "  {} [shape=ellipse];", q(n)).unwrap();
        }
        for e in &self.edges {
            let label = fuse_adverbs(&e.strengths)
                .map(|d| format!("{}", d.mean))
                .unwrap_or_default();
            writeln!(out, "  {} -> {} [label={}];", q(&e.cause), q(&e.effect), q(&label)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

impl ToDot for NeuronDiagram {
    fn to_dot(&self) -> String {
        let mut out = String::new();
        open(&mut out, &self.name);
        for n in &self.nodes {
            let style = if n.shaded { ", style=filled, fillcolor=gray" } else { "" };
            writeln!(out, "  {} [shape=circle{style}];", q(&n.name)).unwrap();
        }
        for l in &self.links {
            let style = match l.kind {
                LinkKind::Stimulatory => "",
                LinkKind::Inhibitory => " [style=dashed, arrowhead=dot]",
            };
            writeln!(out, "  {} -> {}{style};", q(&l.source), q(&l.target)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

impl ToDot for FuzzyCognitiveMap {
    fn to_dot(&self) -> String {
        let mut out = String::new();
        open(&mut out, &self.name);
        for c in &self.concepts {
            writeln!(
                out,
                "  {} [shape=ellipse, label={}];",
                q(&c.name),
                q(&format!("{}\n{}", c.name, c.init))
            )
            .unwrap();
        }
        for e in &self.edges {
            let label = if e.delay > 0 {
                format!("{} (d={})", e.weight, e.delay)
            } else {
                format!("{}", e.weight)
            };
            let style = if e.weight < 0.0 { ", style=dashed" } else { "" };
            writeln!(
                out,
                "  {} -> {} [label={}{style}];",
                q(&e.source),
                q(&e.target),
                q(&label)
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}
