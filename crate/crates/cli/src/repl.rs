//! Untimed token game. Delays are ignored; `auto` picks among the enabled
//! transitions by their conflict weights.

use std::io::{self, BufRead, Write};

use causanet::net::{Marking, Net};
use causanet::timing::{resolve_conflict, rng_from_seed};

fn show<W: Write>(net: &Net, m: &Marking, out: &mut W) -> io::Result<()> {
    writeln!(out, "marking {m}")?;
    let enabled = net.enabled_names(m).expect("marking matches the net");
    if enabled.is_empty() {
        writeln!(out, "enabled (none)")
    } else {
        writeln!(out, "enabled {}", enabled.join(" "))
    }
}

const HELP: &str = "commands: fire <transition>, auto, undo, show, help, quit";

pub fn run<R: BufRead, W: Write>(net: &Net, seed: u64, input: R, mut out: W) -> io::Result<()> {
    let mut rng = rng_from_seed(seed);
    let mut history = vec![net.initial_marking().clone()];
    writeln!(out, "net {} places ({})", net.name(), net.places().join(","))?;
    show(net, &history[0], &mut out)?;
    for line in input.lines() {
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let current = history.last().expect("history is never empty").clone();
        match words.as_slice() {
            [] => continue,
            ["quit" | "exit"] => break,
            ["help"] => writeln!(out, "{HELP}")?,
            ["show"] => show(net, &current, &mut out)?,
            ["fire", t] => match net.fire_named(&current, t) {
                Ok(next) => {
                    history.push(next);
                    writeln!(out, "fired {t}")?;
                    show(net, history.last().unwrap(), &mut out)?;
                }
                Err(e) => writeln!(out, "refused: {e}")?,
            },
            ["auto"] => {
                let enabled = net.enabled_transitions(&current).expect("marking matches the net");
                let candidates: Vec<(usize, f64)> =
                    enabled.iter().map(|&t| (t, net.timing(t).conflict_weight)).collect();
                match resolve_conflict(&candidates, &mut rng) {
                    Ok(t) => {
                        history.push(net.fire(&current, t).expect("enabled transition fires"));
                        writeln!(out, "fired {}", net.transition_name(t))?;
                        show(net, history.last().unwrap(), &mut out)?;
                    }
                    Err(_) => writeln!(out, "deadlock: nothing is enabled")?,
                }
            }
            ["undo"] => {
                if history.len() > 1 {
                    history.pop();
                    show(net, history.last().unwrap(), &mut out)?;
                } else {
                    writeln!(out, "nothing to undo")?;
                }
            }
            _ => writeln!(out, "unknown command `{line}`; {HELP}")?,
        }
        out.flush()?;
    }
    Ok(())
}
