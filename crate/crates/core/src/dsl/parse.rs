use std::collections::HashMap;

use super::{Diagnostic, DiagnosticKind, Document, Item, ParseError, Position};
use crate::formalisms::chain::{AdverbDistribution, ChainGraph};
use crate::formalisms::fcm::FuzzyCognitiveMap;
use crate::formalisms::neuron::NeuronDiagram;
use crate::formalisms::FormalismError;
use crate::fuzzy::{builtin_label, FuzzyLabel, NormKind, Shape};
use crate::net::{validate, Arc, Marking, NetDef, TransitionDef};
use crate::timing::{Delay, TimingSpec};

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    pos: Position,
}

impl<'a> Tok<'a> {
    /// Position of the byte offset `off` inside this token (ASCII offsets).
    fn at(&self, off: usize) -> Position {
        Position {
            line: self.pos.line,
            column: self.pos.column + self.text[..off].chars().count(),
        }
    }
}

struct Line<'a> {
    toks: Vec<Tok<'a>>,
}

impl<'a> Line<'a> {
    fn head(&self) -> &str {
        self.toks[0].text
    }

    fn pos(&self) -> Position {
        self.toks[0].pos
    }
}

fn diag(position: Position, kind: DiagnosticKind, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        position,
        kind,
        message: message.into(),
    }
}

/// Splits on whitespace outside parentheses and double quotes; `#` starts a
/// comment.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<Tok<'_>>, Diagnostic> {
    let mut toks = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut depth = 0usize;
    let mut quote_col: Option<usize> = None;
    let mut end = line.len();
    let pos = |column| Position { line: line_no, column };
    for (idx, (byte, c)) in line.char_indices().enumerate() {
        let col = idx + 1;
        if quote_col.is_some() {
            if c == '"' {
                quote_col = None;
            }
            continue;
        }
        if depth == 0 && (c.is_whitespace() || c == '#') {
            if let Some((s, sc)) = start.take() {
                toks.push(Tok {
                    text: &line[s..byte],
                    pos: pos(sc),
                });
            }
            if c == '#' {
                end = byte;
                break;
            }
            continue;
        }
        if start.is_none() {
            start = Some((byte, col));
        }
        match c {
            '"' => quote_col = Some(col),
            '(' => depth += 1,
            ')' if depth == 0 => {
                return Err(diag(pos(col), DiagnosticKind::Lexical, "unbalanced `)`"));
            }
            ')' => depth -= 1,
            _ => {}
        }
    }
    if let Some(col) = quote_col {
        return Err(diag(pos(col), DiagnosticKind::Lexical, "unterminated string"));
    }
    if let Some((s, sc)) = start {
        if depth > 0 {
            return Err(diag(pos(sc), DiagnosticKind::Lexical, "unbalanced `(`"));
        }
        toks.push(Tok {
            text: &line[s..end],
            pos: pos(sc),
        });
    }
    Ok(toks)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn ident<'a>(t: &Tok<'a>) -> Result<&'a str, Diagnostic> {
    if is_ident(t.text) {
        Ok(t.text)
    } else {
        Err(diag(
            t.pos,
            DiagnosticKind::Lexical,
            format!("`{}` is not a valid identifier", t.text),
        ))
    }
}

fn number(t: &Tok<'_>, s: &str) -> Result<f64, Diagnostic> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(diag(
            t.pos,
            DiagnosticKind::InvalidValue,
            format!("`{s}` is not a finite number"),
        )),
    }
}

fn count(t: &Tok<'_>, s: &str) -> Result<u32, Diagnostic> {
    s.parse::<u32>().map_err(|_| {
        diag(
            t.pos,
            DiagnosticKind::InvalidValue,
            format!("`{s}` is not a non-negative integer"),
        )
    })
}

/// `name(a,b,...)` into its parts.
fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let inner = s[open + 1..].strip_suffix(')')?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').collect()
    };
    Some((&s[..open], args))
}

fn key_value<'a>(t: &Tok<'a>) -> Option<(&'a str, &'a str)> {
    t.text.split_once('=')
}

fn expect_arity(t: &Tok<'_>, toks: &[Tok<'_>], min: usize, max: usize) -> Result<(), Diagnostic> {
    if toks.len() < min {
        Err(diag(
            t.pos,
            DiagnosticKind::Lexical,
            format!("`{}` needs at least {} arguments", t.text, min - 1),
        ))
    } else if toks.len() > max {
        Err(diag(
            toks[max].pos,
            DiagnosticKind::Lexical,
            format!("unexpected `{}`", toks[max].text),
        ))
    } else {
        Ok(())
    }
}

fn expect_arrow(toks: &[Tok<'_>], i: usize) -> Result<(), Diagnostic> {
    match toks.get(i) {
        Some(t) if t.text == "->" => Ok(()),
        Some(t) => Err(diag(
            t.pos,
            DiagnosticKind::Lexical,
            format!("expected `->`, found `{}`", t.text),
        )),
        None => Err(diag(toks[0].pos, DiagnosticKind::Lexical, "expected `->`")),
    }
}

fn parse_shape(t: &Tok<'_>) -> Result<Shape, Diagnostic> {
    let bad = || {
        diag(
            t.pos,
            DiagnosticKind::InvalidValue,
            format!("`{}` is not tri(a,b,c), trap(a,b,c,d) or crisp(v)", t.text),
        )
    };
    let (kind, args) = call(t.text).ok_or_else(bad)?;
    let v: Vec<f64> = args.iter().map(|a| number(t, a)).collect::<Result<_, _>>()?;
    match (kind, v.as_slice()) {
        ("crisp", &[x]) => Ok(Shape::Crisp(x)),
        ("tri", &[a, b, c]) => Ok(Shape::Triangular(a, b, c)),
        ("trap", &[a, b, c, d]) => Ok(Shape::Trapezoidal(a, b, c, d)),
        _ => Err(bad()),
    }
}

fn parse_delay(t: &Tok<'_>, s: &str) -> Result<Delay, Diagnostic> {
    let bad = || {
        diag(
            t.pos,
            DiagnosticKind::InvalidValue,
            format!("`{s}` is not imm, det(x), exp(r) or unif(a,b)"),
        )
    };
    let delay = if s == "imm" {
        Delay::Immediate
    } else {
        let (kind, args) = call(s).ok_or_else(bad)?;
        let v: Vec<f64> = args.iter().map(|a| number(t, a)).collect::<Result<_, _>>()?;
        match (kind, v.as_slice()) {
            ("det", &[delay]) => Delay::Deterministic { delay },
            ("exp", &[rate]) => Delay::Exponential { rate },
            ("unif", &[lo, hi]) => Delay::Uniform { lo, hi },
            _ => return Err(bad()),
        }
    };
    delay
        .check()
        .map_err(|e| diag(t.pos, DiagnosticKind::InvalidValue, e))?;
    Ok(delay)
}

fn parse_norm(t: &Tok<'_>, s: &str) -> Result<NormKind, Diagnostic> {
    s.parse::<NormKind>().map_err(|_| {
        diag(
            t.pos,
            DiagnosticKind::InvalidValue,
            format!("unknown norm family `{s}`"),
        )
    })
}

struct Ref {
    name: String,
    pos: Position,
}

struct GateRef {
    net: String,
    transition: String,
    label: Ref,
}

struct Parser {
    diagnostics: Vec<Diagnostic>,
    items: Vec<Item>,
    positions: Vec<Position>,
    models: HashMap<String, Position>,
    labels: HashMap<String, Position>,
    gates: Vec<GateRef>,
}

/// Checks per-block uniqueness of names.
#[derive(Default)]
struct Scope {
    seen: HashMap<String, Position>,
}

impl Scope {
    fn declare(&mut self, name: &str, pos: Position) -> Result<(), Diagnostic> {
        if let Some(first) = self.seen.get(name) {
            return Err(diag(
                pos,
                DiagnosticKind::DuplicateIdentifier,
                format!("`{name}` already declared at {first}"),
            ));
        }
        self.seen.insert(name.to_string(), pos);
        Ok(())
    }

    fn contains(&self, name: &str) -> bool {
        self.seen.contains_key(name)
    }
}

fn dangling(r: &Ref, what: &str) -> Diagnostic {
    diag(
        r.pos,
        DiagnosticKind::DanglingReference,
        format!("undeclared {what} `{}`", r.name),
    )
}

impl Parser {
    fn push(&mut self, r: Result<(), Diagnostic>) {
        if let Err(d) = r {
            self.diagnostics.push(d);
        }
    }

    fn declare_model(&mut self, name: &str, pos: Position) -> bool {
        if let Some(first) = self.models.get(name) {
            self.diagnostics.push(diag(
                pos,
                DiagnosticKind::DuplicateIdentifier,
                format!("`{name}` already declared at {first}"),
            ));
            return false;
        }
        self.models.insert(name.to_string(), pos);
        true
    }

    fn add(&mut self, item: Item, pos: Position) {
        self.items.push(item);
        self.positions.push(pos);
    }

    fn run(&mut self, lines: &[Line<'_>]) {
        let mut i = 0;
        while i < lines.len() {
            let line = &lines[i];
            i += 1;
            match line.head() {
                kw @ ("net" | "chain" | "fcm" | "neuron") => {
                    let close = lines[i..].iter().position(|l| l.head() == "end").map(|k| i + k);
                    let body_end = close.unwrap_or(lines.len());
                    let body = &lines[i..body_end];
                    if close.is_none() {
                        self.diagnostics.push(diag(
                            line.pos(),
                            DiagnosticKind::Lexical,
                            format!("`{kw}` block is missing its `end`"),
                        ));
                    } else {
                        let end = &lines[body_end];
                        if end.toks.len() > 1 {
                            self.diagnostics.push(diag(
                                end.toks[1].pos,
                                DiagnosticKind::Lexical,
                                format!("unexpected `{}` after `end`", end.toks[1].text),
                            ));
                        }
                    }
                    i = (body_end + 1).min(lines.len());
                    if let Err(d) = self.block(kw, line, body) {
                        self.diagnostics.push(d);
                    }
                }
                "label" => {
                    let r = self.label(line);
                    self.push(r);
                }
                "truthtable" => {
                    let r = self.truth_table(line);
                    self.push(r);
                }
                other => {
                    self.diagnostics.push(diag(
                        line.pos(),
                        DiagnosticKind::UnknownKeyword,
                        format!("unknown keyword `{other}`"),
                    ));
                }
            }
        }
    }

    fn block(&mut self, kw: &str, header: &Line<'_>, body: &[Line<'_>]) -> Result<(), Diagnostic> {
        let t = &header.toks;
        expect_arity(&t[0], t, 2, 2)?;
        let name = ident(&t[1])?;
        let pos = header.pos();
        let fresh = self.declare_model(name, t[1].pos);
        let before = self.diagnostics.len();
        let item = match kw {
            "net" => self.net(name, pos, body).map(Item::Net),
            "chain" => self.chain(name, body).map(Item::Chain),
            "fcm" => self.fcm(name, body).map(Item::Fcm),
            _ => self.neuron(name, pos, body).map(Item::Neuron),
        };
        if let Some(item) = item {
            if fresh && self.diagnostics.len() == before {
                self.add(item, pos);
            }
        }
        Ok(())
    }

    fn label(&mut self, line: &Line<'_>) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 3, 3)?;
        let name = ident(&t[1])?;
        let shape = parse_shape(&t[2])?;
        let label =
            FuzzyLabel::new(name, shape).map_err(|e| diag(t[2].pos, DiagnosticKind::InvalidValue, e.to_string()))?;
        if let Some(first) = self.labels.get(name) {
            return Err(diag(
                t[1].pos,
                DiagnosticKind::DuplicateIdentifier,
                format!("label `{name}` already declared at {first}"),
            ));
        }
        self.labels.insert(name.to_string(), t[1].pos);
        self.add(Item::Label(label), line.pos());
        Ok(())
    }

    fn truth_table(&mut self, line: &Line<'_>) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 3, 3)?;
        let name = ident(&t[1])?;
        let path = t[2]
            .text
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| diag(t[2].pos, DiagnosticKind::Lexical, "expected a quoted path"))?;
        if self.declare_model(name, t[1].pos) {
            self.add(
                Item::TruthTable {
                    name: name.to_string(),
                    path: path.to_string(),
                },
                line.pos(),
            );
        }
        Ok(())
    }

    fn net(&mut self, name: &str, pos: Position, body: &[Line<'_>]) -> Option<NetDef> {
        let mut scope = Scope::default();
        let mut places: Vec<(String, u32)> = Vec::new();
        let mut transitions = Vec::new();
        let mut arc_refs: Vec<Ref> = Vec::new();
        let mut gates = Vec::new();
        for line in body {
            let r = match line.head() {
                "place" => self.place(line, &mut scope).map(|p| places.push(p)),
                "trans" => self.transition(line, &mut scope, &mut arc_refs).map(|(t, gate)| {
                    if let Some(g) = gate {
                        gates.push((transitions.len(), g));
                    }
                    transitions.push(t);
                }),
                other => Err(diag(
                    line.pos(),
                    DiagnosticKind::UnknownKeyword,
                    format!("unknown keyword `{other}` in net"),
                )),
            };
            self.push(r);
        }
        let place_names: Vec<&str> = places.iter().map(|(p, _)| p.as_str()).collect();
        for r in &arc_refs {
            if !place_names.contains(&r.name.as_str()) {
                self.diagnostics.push(dangling(r, "place"));
            }
        }
        let def = NetDef {
            name: name.to_string(),
            places: places.iter().map(|(p, _)| p.clone()).collect(),
            transitions,
            initial_marking: Marking::new(places.iter().map(|(_, n)| *n).collect()),
        };
        let report = validate(&def);
        // Dangling places were reported with a precise position already.
        for v in report.violations {
            use crate::net::Violation::*;
            if !matches!(v, UndefinedPlace { .. }) {
                self.diagnostics
                    .push(diag(pos, DiagnosticKind::InvalidValue, v.to_string()));
            }
        }
        for (t, label) in gates {
            self.gates.push(GateRef {
                net: name.to_string(),
                transition: def.transitions[t].name.clone(),
                label,
            });
        }
        Some(def)
    }

    fn place(&mut self, line: &Line<'_>, scope: &mut Scope) -> Result<(String, u32), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 2, 3)?;
        let name = ident(&t[1])?;
        let mut tokens = 0;
        if let Some(opt) = t.get(2) {
            match key_value(opt) {
                Some(("tokens", v)) => tokens = count(opt, v)?,
                _ => {
                    return Err(diag(
                        opt.pos,
                        DiagnosticKind::UnknownKeyword,
                        format!("unknown place option `{}`", opt.text),
                    ))
                }
            }
        }
        scope.declare(name, t[1].pos)?;
        Ok((name.to_string(), tokens))
    }

    fn arcs(&self, t: &Tok<'_>, refs: &mut Vec<Ref>) -> Result<Vec<Arc>, Diagnostic> {
        let mut arcs: Vec<Arc> = Vec::new();
        let mut off = 0;
        for part in t.text.split(',') {
            let at = t.at(off);
            off += part.len() + 1;
            let (place, weight) = match part.split_once(':') {
                Some((p, w)) => (p, count(t, w)?),
                None => (part, 1),
            };
            if !is_ident(place) {
                return Err(diag(
                    at,
                    DiagnosticKind::Lexical,
                    format!("`{part}` is not PLACE or PLACE:WEIGHT"),
                ));
            }
            if weight == 0 {
                return Err(diag(at, DiagnosticKind::InvalidValue, "arc weight must be at least 1"));
            }
            if arcs.iter().any(|a| a.place == place) {
                return Err(diag(
                    at,
                    DiagnosticKind::DuplicateIdentifier,
                    format!("place `{place}` listed twice"),
                ));
            }
            refs.push(Ref {
                name: place.to_string(),
                pos: at,
            });
            arcs.push(Arc::new(place, weight));
        }
        Ok(arcs)
    }

    fn transition(
        &mut self,
        line: &Line<'_>,
        scope: &mut Scope,
        arc_refs: &mut Vec<Ref>,
    ) -> Result<(TransitionDef, Option<Ref>), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 2, usize::MAX)?;
        let name = ident(&t[1])?;
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut timing = TimingSpec::immediate();
        let mut gate = None;
        let mut refs = Vec::new();
        let mut k = 2;
        while k < t.len() {
            let opt = &t[k];
            k += 1;
            match opt.text {
                "in" | "out" => {
                    let list = t.get(k).ok_or_else(|| {
                        diag(
                            opt.pos,
                            DiagnosticKind::Lexical,
                            format!("`{}` needs an arc list", opt.text),
                        )
                    })?;
                    k += 1;
                    let arcs = self.arcs(list, &mut refs)?;
                    if opt.text == "in" {
                        inputs = arcs;
                    } else {
                        outputs = arcs;
                    }
                }
                _ => match key_value(opt) {
                    Some(("delay", v)) => timing.delay = parse_delay(opt, v)?,
                    Some(("fuzzy", v)) => {
                        if !is_ident(v) {
                            return Err(diag(
                                opt.pos,
                                DiagnosticKind::Lexical,
                                format!("`{v}` is not a label name"),
                            ));
                        }
                        gate = Some(Ref {
                            name: v.to_string(),
                            pos: opt.at(6),
                        });
                    }
                    Some(("weight", v)) => {
                        let w = number(opt, v)?;
                        if w <= 0.0 {
                            return Err(diag(
                                opt.pos,
                                DiagnosticKind::InvalidValue,
                                "conflict weight must be positive",
                            ));
                        }
                        timing.conflict_weight = w;
                    }
                    _ => {
                        return Err(diag(
                            opt.pos,
                            DiagnosticKind::UnknownKeyword,
                            format!("unknown transition option `{}`", opt.text),
                        ))
                    }
                },
            }
        }
        scope.declare(name, t[1].pos)?;
        arc_refs.extend(refs);
        Ok((
            TransitionDef {
                name: name.to_string(),
                inputs,
                outputs,
                timing,
            },
            gate,
        ))
    }

    fn chain(&mut self, name: &str, body: &[Line<'_>]) -> Option<ChainGraph> {
        let mut g = ChainGraph::new(name);
        for line in body {
            let r = match line.head() {
                "edge" => Self::chain_edge(line, &mut g),
                other => Err(diag(
                    line.pos(),
                    DiagnosticKind::UnknownKeyword,
                    format!("unknown keyword `{other}` in chain"),
                )),
            };
            self.push(r);
        }
        Some(g)
    }

    fn chain_edge(line: &Line<'_>, g: &mut ChainGraph) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 8, 8)?;
        let cause = ident(&t[1])?;
        expect_arrow(t, 2)?;
        let effect = ident(&t[3])?;
        if t[4].text != "adverb" {
            return Err(diag(t[4].pos, DiagnosticKind::Lexical, "expected `adverb`"));
        }
        let adverb = t[5]
            .text
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| diag(t[5].pos, DiagnosticKind::Lexical, "expected a quoted adverb"))?;
        let (mut mean, mut std) = (None, None);
        for opt in &t[6..] {
            match key_value(opt) {
                Some(("mean", v)) => mean = Some(number(opt, v)?),
                Some(("std", v)) => std = Some(number(opt, v)?),
                _ => {
                    return Err(diag(
                        opt.pos,
                        DiagnosticKind::UnknownKeyword,
                        format!("unknown edge option `{}`", opt.text),
                    ))
                }
            }
        }
        let (Some(mean), Some(std)) = (mean, std) else {
            return Err(diag(t[6].pos, DiagnosticKind::Lexical, "edge needs mean= and std="));
        };
        let dist = AdverbDistribution::new(adverb, mean, std)
            .map_err(|e| diag(t[6].pos, DiagnosticKind::InvalidValue, e.to_string()))?;
        g.add_link(cause, effect, dist)
            .map_err(|e| diag(t[1].pos, DiagnosticKind::InvalidValue, e.to_string()))
    }

    fn fcm(&mut self, name: &str, body: &[Line<'_>]) -> Option<FuzzyCognitiveMap> {
        let mut map = FuzzyCognitiveMap::new(name);
        let mut scope = Scope::default();
        let mut refs = Vec::new();
        let mut aggregated = false;
        for line in body {
            let r = match line.head() {
                "concept" => Self::concept(line, &mut map, &mut scope),
                "edge" => Self::fcm_edge(line, &mut map, &mut refs),
                "aggregate" if aggregated => Err(diag(
                    line.pos(),
                    DiagnosticKind::DuplicateIdentifier,
                    "`aggregate` given twice",
                )),
                "aggregate" => {
                    aggregated = true;
                    Self::aggregate(line, &mut map)
                }
                other => Err(diag(
                    line.pos(),
                    DiagnosticKind::UnknownKeyword,
                    format!("unknown keyword `{other}` in fcm"),
                )),
            };
            self.push(r);
        }
        for r in &refs {
            if !scope.contains(&r.name) {
                self.diagnostics.push(dangling(r, "concept"));
            }
        }
        Some(map)
    }

    fn concept(line: &Line<'_>, map: &mut FuzzyCognitiveMap, scope: &mut Scope) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 2, 3)?;
        let name = ident(&t[1])?;
        let mut init = 0.0;
        if let Some(opt) = t.get(2) {
            match key_value(opt) {
                Some(("init", v)) => init = number(opt, v)?,
                _ => {
                    return Err(diag(
                        opt.pos,
                        DiagnosticKind::UnknownKeyword,
                        format!("unknown concept option `{}`", opt.text),
                    ))
                }
            }
            if !(-1.0..=1.0).contains(&init) {
                return Err(diag(
                    opt.pos,
                    DiagnosticKind::InvalidValue,
                    "activation must lie in [-1, 1]",
                ));
            }
        }
        scope.declare(name, t[1].pos)?;
        *map = std::mem::take(map).concept(name, init);
        Ok(())
    }

    fn fcm_edge(line: &Line<'_>, map: &mut FuzzyCognitiveMap, refs: &mut Vec<Ref>) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 5, 6)?;
        let source = ident(&t[1])?;
        expect_arrow(t, 2)?;
        let target = ident(&t[3])?;
        let (mut weight, mut delay) = (None, 0);
        for opt in &t[4..] {
            match key_value(opt) {
                Some(("w", v)) => {
                    let w = number(opt, v)?;
                    if !(-1.0..=1.0).contains(&w) {
                        return Err(diag(
                            opt.pos,
                            DiagnosticKind::InvalidValue,
                            "weight must lie in [-1, 1]",
                        ));
                    }
                    weight = Some(w);
                }
                Some(("delay", v)) => delay = count(opt, v)?,
                _ => {
                    return Err(diag(
                        opt.pos,
                        DiagnosticKind::UnknownKeyword,
                        format!("unknown edge option `{}`", opt.text),
                    ))
                }
            }
        }
        let weight = weight.ok_or_else(|| diag(t[4].pos, DiagnosticKind::Lexical, "edge needs w="))?;
        refs.push(Ref {
            name: source.to_string(),
            pos: t[1].pos,
        });
        refs.push(Ref {
            name: target.to_string(),
            pos: t[3].pos,
        });
        *map = std::mem::take(map).edge(source, target, weight, delay);
        Ok(())
    }

    fn aggregate(line: &Line<'_>, map: &mut FuzzyCognitiveMap) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 2, 3)?;
        for opt in &t[1..] {
            match key_value(opt) {
                Some(("or", v)) => map.disjunction = parse_norm(opt, v)?,
                Some(("and", v)) => map.conjunction = parse_norm(opt, v)?,
                _ => {
                    return Err(diag(
                        opt.pos,
                        DiagnosticKind::UnknownKeyword,
                        format!("unknown aggregate option `{}`", opt.text),
                    ))
                }
            }
        }
        Ok(())
    }

    fn neuron(&mut self, name: &str, pos: Position, body: &[Line<'_>]) -> Option<NeuronDiagram> {
        let mut d = NeuronDiagram::new(name);
        let mut scope = Scope::default();
        let mut refs = Vec::new();
        for line in body {
            let r = match line.head() {
                "node" => Self::neuron_node(line, &mut d, &mut scope),
                kw @ ("stim" | "inhib") => Self::neuron_link(line, kw, &mut d, &mut refs),
                other => Err(diag(
                    line.pos(),
                    DiagnosticKind::UnknownKeyword,
                    format!("unknown keyword `{other}` in neuron"),
                )),
            };
            self.push(r);
        }
        let mut complete = true;
        for r in &refs {
            if !scope.contains(&r.name) {
                self.diagnostics.push(dangling(r, "node"));
                complete = false;
            }
        }
        if complete {
            if let Err(FormalismError::Cyclic(_)) = d.topological_order() {
                self.diagnostics.push(diag(
                    pos,
                    DiagnosticKind::InvalidValue,
                    "neuron diagram must be acyclic",
                ));
            }
        }
        Some(d)
    }

    fn neuron_node(line: &Line<'_>, d: &mut NeuronDiagram, scope: &mut Scope) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 2, 3)?;
        let name = ident(&t[1])?;
        let shaded = match t.get(2) {
            None => false,
            Some(opt) if opt.text == "shaded" => true,
            Some(opt) => {
                return Err(diag(
                    opt.pos,
                    DiagnosticKind::UnknownKeyword,
                    format!("unknown node option `{}`", opt.text),
                ))
            }
        };
        scope.declare(name, t[1].pos)?;
        *d = std::mem::take(d).node(name, shaded);
        Ok(())
    }

    fn neuron_link(line: &Line<'_>, kw: &str, d: &mut NeuronDiagram, refs: &mut Vec<Ref>) -> Result<(), Diagnostic> {
        let t = &line.toks;
        expect_arity(&t[0], t, 4, 4)?;
        let source = ident(&t[1])?;
        expect_arrow(t, 2)?;
        let target = ident(&t[3])?;
        refs.push(Ref {
            name: source.to_string(),
            pos: t[1].pos,
        });
        refs.push(Ref {
            name: target.to_string(),
            pos: t[3].pos,
        });
        let taken = std::mem::take(d);
        *d = if kw == "stim" {
            taken.stim(source, target)
        } else {
            taken.inhib(source, target)
        };
        Ok(())
    }

    /// Labels may be declared anywhere in the document; document labels
    /// shadow the built-in lexicon.
    fn resolve_gates(&mut self) {
        let gates = std::mem::take(&mut self.gates);
        for g in gates {
            let label = self
                .items
                .iter()
                .find_map(|i| match i {
                    Item::Label(l) if l.name == g.label.name => Some(l.clone()),
                    _ => None,
                })
                .or_else(|| builtin_label(&g.label.name));
            let Some(label) = label else {
                self.diagnostics.push(dangling(&g.label, "label"));
                continue;
            };
            // Nets that failed to parse were never added; nothing to patch.
            let target = self.items.iter_mut().find_map(|i| match i {
                Item::Net(n) if n.name == g.net => n.transitions.iter_mut().find(|t| t.name == g.transition),
                _ => None,
            });
            let Some(transition) = target else {
                continue;
            };
            let timing = &mut transition.timing;
            timing.gate = Some(label);
            if let Err(e) = timing.check() {
                self.diagnostics
                    .push(diag(g.label.pos, DiagnosticKind::InvalidValue, e));
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut diagnostics = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        match tokenize(raw, i + 1) {
            Ok(toks) if toks.is_empty() => {}
            Ok(toks) => lines.push(Line { toks }),
            Err(d) => diagnostics.push(d),
        }
    }
    let mut p = Parser {
        diagnostics,
        items: Vec::new(),
        positions: Vec::new(),
        models: HashMap::new(),
        labels: HashMap::new(),
        gates: Vec::new(),
    };
    p.run(&lines);
    p.resolve_gates();
    if p.diagnostics.is_empty() {
        Ok(Document {
            items: p.items,
            positions: p.positions,
        })
    } else {
        p.diagnostics.sort_by_key(|d| d.position);
        Err(ParseError {
            diagnostics: p.diagnostics,
        })
    }
}
