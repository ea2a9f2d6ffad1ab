//! Process model files.
//!
//! ```text
//! # order-1 binary chain
//! alphabet 2
//! kind markov
//! order 1
//! transition
//! 0.75 0.25
//! 0.25 0.75
//! ```
//!
//! `kind iid` takes a `marginal` row; `kind hmm` takes `states`, a
//! `transition` matrix over hidden states and an `emission` matrix. Any kind
//! may add an `initial` row. A file whose first line is a lone integer `k`
//! followed by `k` rows is read as an order-1 chain on `k` symbols.

use std::fmt::Write as _;

use renyirate::entropy::FiniteDistribution;
use renyirate::processes::{ProcessKind, ProcessModel};
use renyirate::spectral::MarkovChain;
use renyirate::{Error, Result};

#[derive(Default)]
struct Sections {
    alphabet: Option<usize>,
    kind: Option<String>,
    order: Option<usize>,
    states: Option<usize>,
    marginal: Vec<Vec<f64>>,
    transition: Vec<Vec<f64>>,
    emission: Vec<Vec<f64>>,
    initial: Vec<Vec<f64>>,
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("expected a number, found `{t}`")))
        })
        .collect()
}

fn count(value: Option<&str>, key: &str, lineno: usize) -> Result<usize> {
    value
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(lineno, format!("`{key}` needs a nonnegative integer")))
}

fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn parse_plain_chain(lines: &[(usize, &str)], k: usize) -> Result<ProcessModel> {
    let rows = lines[1..]
        .iter()
        .map(|(n, l)| numbers(l, *n))
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "chain file declares {k} states but has {} rows",
            rows.len()
        )));
    }
    ProcessModel::markov(k, 1, rows, None)
}

pub fn parse_model(text: &str) -> Result<ProcessModel> {
    let lines = content_lines(text);
    if lines.is_empty() {
        return Err(Error::parse(1, "empty model file"));
    }
    if let Ok(k) = lines[0].1.parse::<usize>() {
        return parse_plain_chain(&lines, k);
    }
    let mut s = Sections::default();
    let mut current: Option<&'static str> = None;
    for &(lineno, line) in &lines {
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        if head.parse::<f64>().is_ok() {
            let row = numbers(line, lineno)?;
            let target = match current {
                Some("marginal") => &mut s.marginal,
                Some("transition") => &mut s.transition,
                Some("emission") => &mut s.emission,
                Some("initial") => &mut s.initial,
                _ => return Err(Error::parse(lineno, "numbers outside a section")),
            };
            target.push(row);
            continue;
        }
        let value = toks.next();
        if toks.next().is_some() {
            return Err(Error::parse(lineno, format!("unexpected text after `{head} {}`", value.unwrap())));
        }
        match head {
            "alphabet" => s.alphabet = Some(count(value, head, lineno)?),
            "order" => s.order = Some(count(value, head, lineno)?),
            "states" => s.states = Some(count(value, head, lineno)?),
            "kind" => {
                let v = value.ok_or_else(|| Error::parse(lineno, "`kind` needs iid, markov or hmm"))?;
                if !matches!(v, "iid" | "markov" | "hmm") {
                    return Err(Error::parse(lineno, format!("unknown kind `{v}`")));
                }
                s.kind = Some(v.to_string());
            }
            "marginal" | "transition" | "emission" | "initial" => {
                if value.is_some() {
                    return Err(Error::parse(lineno, format!("section `{head}` takes no value")));
                }
                current = Some(match head {
                    "marginal" => "marginal",
                    "transition" => "transition",
                    "emission" => "emission",
                    _ => "initial",
                });
            }
            other => return Err(Error::parse(lineno, format!("unknown keyword `{other}`"))),
        }
    }
    build(s)
}

fn single_row(rows: Vec<Vec<f64>>, what: &str) -> Result<Option<Vec<f64>>> {
    match rows.len() {
        0 => Ok(None),
        1 => Ok(rows.into_iter().next()),
        n => Err(Error::DimensionMismatch(format!("`{what}` must be one row, found {n}"))),
    }
}

fn check_alphabet(declared: Option<usize>, actual: usize) -> Result<()> {
    match declared {
        Some(a) if a != actual => Err(Error::DimensionMismatch(format!(
            "alphabet declared as {a} but rows have {actual} entries"
        ))),
        _ => Ok(()),
    }
}

fn build(s: Sections) -> Result<ProcessModel> {
    let kind = s.kind.clone().ok_or_else(|| Error::parse(1, "missing `kind` line"))?;
    match kind.as_str() {
        "iid" => {
            let m = single_row(s.marginal, "marginal")?
                .ok_or_else(|| Error::DimensionMismatch("iid model needs a `marginal` row".into()))?;
            check_alphabet(s.alphabet, m.len())?;
            ProcessModel::iid(FiniteDistribution::new(m)?)
        }
        "markov" => {
            let order = s.order.unwrap_or(1);
            let a = s
                .alphabet
                .or_else(|| s.transition.first().map(Vec::len))
                .ok_or_else(|| Error::DimensionMismatch("markov model needs a `transition` table".into()))?;
            ProcessModel::markov(a, order, s.transition, single_row(s.initial, "initial")?)
        }
        _ => {
            let states = s.states.unwrap_or(s.transition.len());
            if s.transition.len() != states {
                return Err(Error::DimensionMismatch(format!(
                    "{states} hidden states but {} transition rows",
                    s.transition.len()
                )));
            }
            if let Some(r) = s.emission.first() {
                check_alphabet(s.alphabet, r.len())?;
            }
            let chain = MarkovChain::from_dense(&s.transition, single_row(s.initial, "initial")?)?;
            ProcessModel::hmm(chain, s.emission)
        }
    }
}

fn row(out: &mut String, v: &[f64]) {
    let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "{}", cells.join(" "));
}

/// Canonical text of a model; parsing it gives the same model.
pub fn write_model(p: &ProcessModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alphabet {}", p.alphabet());
    match p.kind() {
        ProcessKind::Iid { marginal } => {
            out.push_str("kind iid\nmarginal\n");
            row(&mut out, marginal.probs());
        }
        ProcessKind::Markov { order, table, initial } => {
            let _ = writeln!(out, "kind markov\norder {order}\ntransition");
            table.iter().for_each(|r| row(&mut out, r));
            out.push_str("initial\n");
            row(&mut out, initial);
        }
        ProcessKind::Hidden { chain, emission } => {
            let _ = writeln!(out, "kind hmm\nstates {}\ntransition", chain.states());
            chain.transition().to_dense().iter().for_each(|r| row(&mut out, r));
            out.push_str("emission\n");
            emission.iter().for_each(|r| row(&mut out, r));
            out.push_str("initial\n");
            row(&mut out, chain.initial().probs());
        }
    }
    out
}
