//! Text form of a gadget: one column per line, levels separated by `;`,
//! each level written as `start/den width/den label`. Merged levels carry
//! several `start width` pairs before the label. `#` starts a comment.

use super::gadget::{Column, Gadget};
use super::interval::{Level, RationalInterval};
use crate::error::{Error, Result};
use crate::rational::{format, parse};

fn parse_level(text: &str, line: usize) -> Result<(Level, u8)> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() < 3 || toks.len() % 2 == 0 {
        return Err(Error::parse(
            line,
            format!("level `{}` needs `start width` pairs and a label", text.trim()),
        ));
    }
    let (pairs, label) = toks.split_at(toks.len() - 1);
    let symbol: u8 = label[0]
        .parse()
        .map_err(|_| Error::parse(line, format!("bad label symbol `{}`", label[0])))?;
    let mut pieces = Vec::with_capacity(pairs.len() / 2);
    for pair in pairs.chunks(2) {
        let start =
            parse(pair[0]).ok_or_else(|| Error::parse(line, format!("bad rational `{}`", pair[0])))?;
        let width =
            parse(pair[1]).ok_or_else(|| Error::parse(line, format!("bad rational `{}`", pair[1])))?;
        pieces.push(RationalInterval::new(start, width)?);
    }
    Ok((Level::new(pieces)?, symbol))
}

pub fn parse_gadget(text: &str) -> Result<Gadget> {
    let mut columns = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut levels = Vec::new();
        let mut label = Vec::new();
        for part in body.split(';') {
            let (level, symbol) = parse_level(part, i + 1)?;
            levels.push(level);
            label.push(symbol);
        }
        columns.push(Column::new(levels, label)?);
    }
    Gadget::new(columns)
}

pub fn write_gadget(g: &Gadget) -> String {
    let mut out = String::new();
    for c in g.columns() {
        let levels: Vec<String> = c
            .levels()
            .iter()
            .zip(c.label())
            .map(|(l, s)| {
                let mut parts: Vec<String> = l
                    .pieces()
                    .iter()
                    .map(|p| format!("{} {}", format(p.start()), format(p.width())))
                    .collect();
                parts.push(s.to_string());
                parts.join(" ")
            })
            .collect();
        out.push_str(&levels.join(" ; "));
        out.push('\n');
    }
    out
}
