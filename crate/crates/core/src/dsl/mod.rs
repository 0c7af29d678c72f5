//! Line-oriented text format (`.causanet`) for nets, fuzzy labels and the
//! comparison formalisms, with a canonical serializer and a DOT exporter.

mod dot;
mod parse;
mod serialize;

use std::fmt;

use thiserror::Error;

use crate::formalisms::chain::ChainGraph;
use crate::formalisms::fcm::FuzzyCognitiveMap;
use crate::formalisms::neuron::NeuronDiagram;
use crate::fuzzy::FuzzyLabel;
use crate::net::NetDef;

pub use dot::{export_dot, ToDot};
pub use parse::parse;
pub use serialize::serialize;

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    UnknownKeyword,
    DanglingReference,
    DuplicateIdentifier,
    InvalidValue,
}

impl DiagnosticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagnosticKind::Lexical => "lexical error",
            DiagnosticKind::UnknownKeyword => "unknown keyword",
            DiagnosticKind::DanglingReference => "dangling reference",
            DiagnosticKind::DuplicateIdentifier => "duplicate identifier",
            DiagnosticKind::InvalidValue => "invalid value",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub position: Position,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.position, self.kind.as_str(), self.message)
    }
}

/// Every diagnostic produced while parsing, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Net(NetDef),
    Label(FuzzyLabel),
    Chain(ChainGraph),
    Fcm(FuzzyCognitiveMap),
    Neuron(NeuronDiagram),
    /// Pointer to a truth table file in the plain minterm format.
    TruthTable {
        name: String,
        path: String,
    },
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Net(n) => &n.name,
            Item::Label(l) => &l.name,
            Item::Chain(c) => &c.name,
            Item::Fcm(m) => &m.name,
            Item::Neuron(d) => &d.name,
            Item::TruthTable { name, .. } => name,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Item::Net(_) => "net",
            Item::Label(_) => "label",
            Item::Chain(_) => "chain",
            Item::Fcm(_) => "fcm",
            Item::Neuron(_) => "neuron",
            Item::TruthTable { .. } => "truthtable",
        }
    }
}

/// Parsed document. Equality compares items only, not source positions.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub items: Vec<Item>,
    /// Header position of each item, parallel to `items`.
    pub positions: Vec<Position>,
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Document {
    pub fn new(items: Vec<Item>) -> Self {
        let positions = vec![Position::default(); items.len()];
        Document { items, positions }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn nets(&self) -> impl Iterator<Item = &NetDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Net(n) => Some(n),
            _ => None,
        })
    }

    pub fn net(&self, name: &str) -> Option<&NetDef> {
        self.nets().find(|n| n.name == name)
    }

    pub fn label(&self, name: &str) -> Option<&FuzzyLabel> {
        self.items.iter().find_map(|i| match i {
            Item::Label(l) if l.name == name => Some(l),
            _ => None,
        })
    }

    pub fn chains(&self) -> impl Iterator<Item = &ChainGraph> {
        self.items.iter().filter_map(|i| match i {
            Item::Chain(c) => Some(c),
            _ => None,
        })
    }

    pub fn fcms(&self) -> impl Iterator<Item = &FuzzyCognitiveMap> {
        self.items.iter().filter_map(|i| match i {
            Item::Fcm(m) => Some(m),
            _ => None,
        })
    }

    pub fn neurons(&self) -> impl Iterator<Item = &NeuronDiagram> {
        self.items.iter().filter_map(|i| match i {
            Item::Neuron(d) => Some(d),
            _ => None,
        })
    }

    /// Item by name, searching the model namespace (everything but labels).
    pub fn model(&self, name: &str) -> Option<&Item> {
        self.items
            .iter()
            .find(|i| !matches!(i, Item::Label(_)) && i.name() == name)
    }
}
