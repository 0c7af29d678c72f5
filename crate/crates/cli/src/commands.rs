use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use causanet::analysis::{detect_deadlocks, is_k_bounded, reachability_graph, trace_stats, StatsQuery};
use causanet::dsl::{self, Document, Item};
use causanet::formalisms::boolean::{parse_truth_table, qm_minimize};
use causanet::formalisms::chain::{chain_probability, chain_probability_fused, LinkMode};
use causanet::formalisms::fcm::fcm_run;
use causanet::formalisms::FormalismError;
use causanet::net::Net;
use causanet::puzzles::{self, PuzzleError};
use causanet::timing::{rng_from_seed, run_batch, write_trace, GatePolicy, RunConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable file or invalid syntax.
    #[error("{0}")]
    Parse(String),
    /// A name that the input does not define.
    #[error("{0}")]
    Reference(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Runtime(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Reference(_) => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<Document, CliError> {
    let text = read(path)?;
    dsl::parse(&text).map_err(|e| {
        let lines: Vec<String> = e
            .diagnostics
            .iter()
            .map(|d| format!("{}:{d}", path.display()))
            .collect();
        CliError::Parse(lines.join("\n"))
    })
}

pub fn load_net(path: &Path, name: Option<&str>) -> Result<Net, CliError> {
    let doc = load(path)?;
    let def = match name {
        Some(n) => doc
            .net(n)
            .ok_or_else(|| CliError::Reference(format!("{}: no net named `{n}`", path.display())))?,
        None => doc
            .nets()
            .next()
            .ok_or_else(|| CliError::Reference(format!("{}: file defines no net", path.display())))?,
    };
    Net::new(def.clone()).map_err(|r| CliError::Parse(r.to_string()))
}

pub struct SimulateArgs {
    pub file: PathBuf,
    pub net: Option<String>,
    pub horizon: f64,
    pub runs: u64,
    pub seed: u64,
    pub policy: GatePolicy,
    pub max_steps: usize,
    pub trace_out: Option<PathBuf>,
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let net = load_net(&args.file, args.net.as_deref())?;
    if args.runs == 0 {
        return Err(CliError::Runtime("--runs must be at least 1".into()));
    }
    let cfg = RunConfig {
        horizon: args.horizon,
        max_steps: args.max_steps,
        seed: args.seed,
        policy: args.policy,
    };
    let traces = run_batch(&net, &cfg, args.runs).map_err(|e| CliError::Runtime(e.to_string()))?;

    if let Some(out) = &args.trace_out {
        let io = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", out.display()));
        if args.runs == 1 {
            fs::write(out, write_trace(&traces[0])).map_err(io)?;
        } else {
            fs::create_dir_all(out).map_err(io)?;
            for t in &traces {
                fs::write(out.join(format!("{}-seed{}.trace", t.net, t.seed)), write_trace(t)).map_err(io)?;
            }
        }
    }

    let mut s = String::new();
    writeln!(
        s,
        "net {}: {} run(s), seeds {}..={}, policy {}, horizon {}",
        net.name(),
        args.runs,
        args.seed,
        args.seed.wrapping_add(args.runs - 1),
        args.policy.as_str(),
        args.horizon
    )
    .unwrap();
    if let [trace] = traces.as_slice() {
        for e in &trace.events {
            writeln!(s, "t={:.3} {} {} -> {}", e.time, e.transition, e.pre, e.post).unwrap();
        }
        writeln!(s, "terminated: {}", trace.terminated).unwrap();
    }
    for t in net.transitions() {
        let stats = trace_stats(&net, &traces, &StatsQuery::Transition(t.name.clone()))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        write!(
            s,
            "transition {}: fired in {}/{} runs, frequency {:.3}",
            t.name,
            stats.fired_in,
            stats.runs,
            stats.firing_frequency().unwrap_or(0.0)
        )
        .unwrap();
        if let Some(first) = stats.first_firing {
            write!(s, ", mean first firing {:.3}", first.mean).unwrap();
        }
        if let Some(rate) = stats.gate_pass_rate() {
            write!(
                s,
                ", gate pass rate {rate:.3} ({}/{})",
                stats.gate_passes, stats.gate_attempts
            )
            .unwrap();
        }
        s.push('\n');
    }
    let finals = trace_stats(&net, &traces, &StatsQuery::Place(net.places()[0].clone()))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(s, "final markings ({}):", net.places().join(",")).unwrap();
    for (m, count) in &finals.final_markings {
        writeln!(s, "  {m} x{count}").unwrap();
    }
    print!("{s}");
    Ok(())
}

pub fn reach(
    path: &Path,
    name: Option<&str>,
    max_nodes: usize,
    max_tokens: u32,
    bound: Option<u32>,
) -> Result<(), CliError> {
    let net = load_net(path, name)?;
    let g = reachability_graph(&net, max_nodes, max_tokens);
    let dead = detect_deadlocks(&g);
    println!("net {}", net.name());
    println!("places {}", net.places().join(","));
    println!("nodes {}", g.nodes.len());
    println!("edges {}", g.edges.len());
    println!("truncated {}", g.truncated);
    println!("deadlocks {}", dead.len());
    for m in &dead {
        println!("  {m}");
    }
    if let Some(k) = bound {
        match is_k_bounded(&g, k) {
            Ok(b) => println!("{k}-bounded {b}"),
            Err(e) => println!("{k}-bounded unknown: {e}"),
        }
    }
    Ok(())
}

pub fn puzzle(name: Option<&str>, all: bool, list: bool) -> Result<(), CliError> {
    if list {
        for sc in puzzles::registry() {
            println!("{}\t{}", sc.name, sc.summary);
        }
        return Ok(());
    }
    let results = match (name, all) {
        (_, true) => puzzles::check_all(),
        (Some(n), false) => vec![(n.to_string(), puzzles::build(n).and_then(|s| s.check()))],
        (None, false) => return Err(CliError::Runtime("give a scenario name, --all or --list".into())),
    };
    let mut failed = 0;
    for (scenario, result) in results {
        match result {
            Ok(checks) => {
                for c in checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    failed += usize::from(!c.passed);
                    println!("{tag} {scenario}: {} ({})", c.expectation, c.detail);
                }
            }
            Err(PuzzleError::UnknownScenario(n)) => return Err(CliError::Reference(format!("unknown scenario `{n}`"))),
            Err(e) => {
                failed += 1;
                println!("FAIL {scenario}: {e}");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} expectation(s) failed")));
    }
    Ok(())
}

pub fn minimize(path: &Path) -> Result<(), CliError> {
    let table = parse_truth_table(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let dnf = qm_minimize(&table.variables, &table.minterms).map_err(|e| CliError::Parse(e.to_string()))?;
    println!("{dnf}");
    Ok(())
}

fn formalism_error(e: FormalismError) -> CliError {
    match e {
        FormalismError::UnknownNode(_) | FormalismError::MissingEdge { .. } | FormalismError::UnknownVariable(_) => {
            CliError::Reference(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

pub fn chain(path: &Path, graph: Option<&str>, nodes: &[String], sampled: bool, seed: u64) -> Result<(), CliError> {
    let doc = load(path)?;
    let g = match graph {
        Some(n) => doc.chains().find(|c| c.name == n),
        None => doc.chains().next(),
    }
    .ok_or_else(|| CliError::Reference(format!("{}: no such chain", path.display())))?;
    let refs: Vec<&str> = nodes.iter().map(String::as_str).collect();
    let p = if sampled {
        let mut rng = rng_from_seed(seed);
        chain_probability(g, &refs, LinkMode::Sampled(&mut rng))
    } else {
        chain_probability_fused(g, &refs)
    }
    .map_err(formalism_error)?;
    println!("{p}");
    Ok(())
}

pub fn fcm(path: &Path, name: Option<&str>, steps: usize) -> Result<(), CliError> {
    let doc = load(path)?;
    let map = match name {
        Some(n) => doc.fcms().find(|m| m.name == n),
        None => doc.fcms().next(),
    }
    .ok_or_else(|| CliError::Reference(format!("{}: no such map", path.display())))?;
    let run = fcm_run(map, &map.initial_state(), steps).map_err(formalism_error)?;
    let names: Vec<&str> = map.concepts.iter().map(|c| c.name.as_str()).collect();
    println!("step\t{}", names.join("\t"));
    for (k, state) in run.trajectory.iter().enumerate() {
        let row: Vec<String> = state.iter().map(|v| format!("{v:.6}")).collect();
        println!("{k}\t{}", row.join("\t"));
    }
    match run.fixed_point_at {
        Some(k) => println!("fixed point at step {k}"),
        None => println!("no fixed point within {steps} steps"),
    }
    Ok(())
}

pub fn export_dot(path: &Path, name: Option<&str>, reach: bool) -> Result<(), CliError> {
    let doc = load(path)?;
    let item = match name {
        Some(n) => doc.model(n),
        None => doc
            .items
            .iter()
            .find(|i| !matches!(i, Item::Label(_) | Item::TruthTable { .. })),
    }
    .ok_or_else(|| CliError::Reference(format!("{}: no such model", path.display())))?;
    let dot = match (item, reach) {
        (Item::Net(def), true) => {
            let net = Net::new(def.clone()).map_err(|r| CliError::Parse(r.to_string()))?;
            dsl::export_dot(&reachability_graph(&net, puzzles::MAX_NODES, puzzles::MAX_TOKENS))
        }
        (_, true) => return Err(CliError::Reference(format!("`{}` is not a net", item.name()))),
        (Item::Net(def), false) => dsl::export_dot(def),
        (Item::Chain(g), false) => dsl::export_dot(g),
        (Item::Fcm(m), false) => dsl::export_dot(m),
        (Item::Neuron(d), false) => dsl::export_dot(d),
        (other, false) => {
            return Err(CliError::Reference(format!("`{}` has no graph form", other.name())));
        }
    };
    print!("{dot}");
    Ok(())
}

pub fn validate(path: &Path) -> Result<(), CliError> {
    let doc = load(path)?;
    for item in &doc.items {
        match item {
            Item::Net(n) => println!(
                "net {}: {} places, {} transitions",
                n.name,
                n.places.len(),
                n.transitions.len()
            ),
            other => println!("{} {}", other.keyword(), other.name()),
        }
    }
    println!("ok: {} item(s)", doc.items.len());
    Ok(())
}
