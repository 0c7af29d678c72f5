#![allow(dead_code)]

use causanet::fuzzy::builtin_label;
use causanet::net::NetDef;
use causanet::timing::TimingSpec;
use proptest::prelude::*;

pub fn timing() -> impl Strategy<Value = TimingSpec> {
    let delay = prop_oneof![
        Just(TimingSpec::immediate()),
        (0.0f64..5.0).prop_map(TimingSpec::deterministic),
        (0.1f64..4.0).prop_map(TimingSpec::exponential),
        (0.0f64..2.0, 0.0f64..2.0).prop_map(|(a, b)| TimingSpec::uniform(a, a + b)),
    ];
    let gate = prop_oneof![
        3 => Just(None),
        1 => Just(builtin_label("highly_probable")),
        1 => Just(builtin_label("possible")),
    ];
    (delay, gate, 0.1f64..5.0).prop_map(|(mut t, g, w)| {
        t.gate = g;
        t.conflict_weight = w;
        t
    })
}

type Arcs = Vec<(usize, u32)>;

fn arcs(places: usize) -> impl Strategy<Value = Arcs> {
    proptest::collection::btree_map(0..places, 1u32..=3, 0..=places.min(3)).prop_map(|m| m.into_iter().collect())
}

/// Random valid net with 1-5 places and 1-4 transitions.
pub fn net_def() -> impl Strategy<Value = NetDef> {
    (1usize..=5).prop_flat_map(|np| {
        (
            proptest::collection::vec(0u32..=4, np),
            proptest::collection::vec((arcs(np), arcs(np), timing()), 1..=4),
        )
            .prop_map(move |(tokens, ts)| {
                let mut def = NetDef::new("random");
                for (i, k) in tokens.iter().enumerate() {
                    def = def.place(format!("p{i}"), *k);
                }
                for (j, (ins, outs, timing)) in ts.into_iter().enumerate() {
                    let ins: Vec<(String, u32)> = ins.iter().map(|(p, w)| (format!("p{p}"), *w)).collect();
                    let outs: Vec<(String, u32)> = outs.iter().map(|(p, w)| (format!("p{p}"), *w)).collect();
                    let ins: Vec<(&str, u32)> = ins.iter().map(|(p, w)| (p.as_str(), *w)).collect();
                    let outs: Vec<(&str, u32)> = outs.iter().map(|(p, w)| (p.as_str(), *w)).collect();
                    def = def.transition(format!("t{j}"), &ins, &outs, timing);
                }
                def
            })
    })
}
