//! Line-oriented calculus table files.
//!
//! ```text
//! # comment
//! name rcc8
//! relations
//! DC EC PO TPP NTPP TPPi NTPPi EQ
//! identity
//! EQ
//! converse
//! TPP TPPi
//! composition
//! NTPP EC -> DC
//! ```
//!
//! A file with an `identity` section is a binary calculus; one with a
//! `rotation` section is ternary; one with only `relations` declares a bare
//! relation universe. Composition pairs that are not listed are empty.

use std::fmt::Write as _;

use super::{Calculus, CalculusError, TernaryCalculus};
use crate::bitset::ValueSet;

/// Contents of a calculus file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CalculusFile {
    Binary(Calculus),
    Ternary(TernaryCalculus),
    /// Relation symbols without integrity tables.
    Universe { name: String, symbols: Vec<String> },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Relations,
    Identity,
    Converse,
    Rotation,
    Composition,
}

fn err(line: usize, message: impl Into<String>) -> CalculusError {
    CalculusError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<CalculusFile, CalculusError> {
    let mut name = String::from("unnamed");
    let mut symbols: Vec<String> = Vec::new();
    let mut identity: Option<(usize, String)> = None;
    let mut converse: Vec<(usize, String, String)> = Vec::new();
    let mut rotation: Vec<(usize, String, String)> = Vec::new();
    let mut composition: Vec<(usize, String, String, Vec<String>)> = Vec::new();
    let mut seen = Vec::new();
    let mut section = Section::None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let header = match tokens[0] {
            "relations" => Some(Section::Relations),
            "identity" => Some(Section::Identity),
            "converse" => Some(Section::Converse),
            "rotation" => Some(Section::Rotation),
            "composition" => Some(Section::Composition),
            _ => None,
        };
        if tokens[0] == "name" {
            if tokens.len() != 2 {
                return Err(err(line_no, "expected `name <name>`"));
            }
            name = tokens[1].to_string();
            continue;
        }
        if let (Some(s), 1) = (header, tokens.len()) {
            if seen.contains(&(s as u8)) {
                return Err(err(line_no, format!("section `{}` repeated", tokens[0])));
            }
            seen.push(s as u8);
            section = s;
            continue;
        }
        match section {
            Section::None => return Err(err(line_no, "data before any section header")),
            Section::Relations => symbols.extend(tokens.iter().map(|t| t.to_string())),
            Section::Identity => {
                if tokens.len() != 1 || identity.is_some() {
                    return Err(err(line_no, "identity section takes a single relation"));
                }
                identity = Some((line_no, tokens[0].to_string()));
            }
            Section::Converse | Section::Rotation => {
                if tokens.len() != 2 {
                    return Err(err(line_no, "expected a pair `R S`"));
                }
                let entry = (line_no, tokens[0].to_string(), tokens[1].to_string());
                if section == Section::Converse {
                    converse.push(entry);
                } else {
                    rotation.push(entry);
                }
            }
            Section::Composition => {
                if tokens.len() < 3 || tokens[2] != "->" {
                    return Err(err(line_no, "expected `R S -> T...`"));
                }
                composition.push((
                    line_no,
                    tokens[0].to_string(),
                    tokens[1].to_string(),
                    tokens[3..].iter().map(|t| t.to_string()).collect(),
                ));
            }
        }
    }

    if symbols.is_empty() {
        return Err(err(0, "no relations declared"));
    }
    let lookup = |line: usize, s: &str| -> Result<usize, CalculusError> {
        symbols
            .iter()
            .position(|x| x == s)
            .ok_or_else(|| err(line, format!("unknown relation `{s}`")))
    };
    let k = symbols.len();

    let map = |entries: &[(usize, String, String)], what: &str| -> Result<Vec<usize>, CalculusError> {
        let mut table = vec![usize::MAX; k];
        for (line, a, b) in entries {
            let (a, b) = (lookup(*line, a)?, lookup(*line, b)?);
            if table[a] != usize::MAX {
                return Err(err(*line, format!("{what} of `{}` given twice", symbols[a])));
            }
            table[a] = b;
        }
        if let Some(missing) = table.iter().position(|&x| x == usize::MAX) {
            return Err(err(0, format!("{what} of `{}` missing", symbols[missing])));
        }
        Ok(table)
    };

    let mut comp = vec![ValueSet::EMPTY; k * k];
    for (line, r, s, ts) in &composition {
        let (r, s) = (lookup(*line, r)?, lookup(*line, s)?);
        let cell = &mut comp[r * k + s];
        if !cell.is_empty() {
            return Err(err(*line, "composition entry given twice"));
        }
        for t in ts {
            cell.insert(lookup(*line, t)?);
        }
    }

    if !rotation.is_empty() {
        if identity.is_some() {
            return Err(err(0, "a ternary calculus has no identity section"));
        }
        let conv = map(&converse, "converse")?;
        let rot = map(&rotation, "rotation")?;
        return Ok(CalculusFile::Ternary(TernaryCalculus::new(name, symbols, conv, rot, comp)?));
    }
    match identity {
        Some((line, id)) => {
            let id = lookup(line, &id)?;
            let conv = map(&converse, "converse")?;
            Ok(CalculusFile::Binary(Calculus::new(name, symbols, conv, comp, id)?))
        }
        None if converse.is_empty() && composition.is_empty() => Ok(CalculusFile::Universe { name, symbols }),
        None => Err(err(0, "binary calculus without identity section")),
    }
}

fn write_relations(out: &mut String, name: &str, symbols: &[String]) {
    let _ = writeln!(out, "name {name}");
    out.push_str("relations\n");
    for chunk in symbols.chunks(12) {
        let _ = writeln!(out, "{}", chunk.join(" "));
    }
}

fn write_composition(out: &mut String, symbols: &[String], compose: impl Fn(usize, usize) -> ValueSet) {
    out.push_str("composition\n");
    let k = symbols.len();
    for r in 0..k {
        for s in 0..k {
            let ts = compose(r, s);
            if ts.is_empty() {
                continue;
            }
            let names: Vec<&str> = ts.iter().map(|t| symbols[t].as_str()).collect();
            let _ = writeln!(out, "{} {} -> {}", symbols[r], symbols[s], names.join(" "));
        }
    }
}

pub fn emit_binary(c: &Calculus) -> String {
    let mut out = String::new();
    write_relations(&mut out, c.name(), c.symbols());
    let _ = writeln!(out, "identity\n{}", c.symbol(c.identity()));
    out.push_str("converse\n");
    for [r, s] in c.converse_pairs() {
        let _ = writeln!(out, "{} {}", c.symbol(r), c.symbol(s));
    }
    write_composition(&mut out, c.symbols(), |r, s| c.compose(r, s));
    out
}

pub fn emit_ternary(c: &TernaryCalculus) -> String {
    let mut out = String::new();
    write_relations(&mut out, c.name(), c.symbols());
    out.push_str("converse\n");
    for [r, s] in c.converse_pairs() {
        let _ = writeln!(out, "{} {}", c.symbol(r), c.symbol(s));
    }
    out.push_str("rotation\n");
    for [r, s] in c.rotation_pairs() {
        let _ = writeln!(out, "{} {}", c.symbol(r), c.symbol(s));
    }
    write_composition(&mut out, c.symbols(), |r, s| c.compose(r, s));
    out
}

pub fn emit_universe(name: &str, symbols: &[String]) -> String {
    let mut out = String::new();
    write_relations(&mut out, name, symbols);
    out
}

pub fn emit(file: &CalculusFile) -> String {
    match file {
        CalculusFile::Binary(c) => emit_binary(c),
        CalculusFile::Ternary(c) => emit_ternary(c),
        CalculusFile::Universe { name, symbols } => emit_universe(name, symbols),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
# two-relation toy
name toy
relations
a b
identity
a
converse
a a
b b
composition
a a -> a
a b -> b
b a -> b
b b -> a b
";

    #[test]
    fn parses_binary_file() {
        let CalculusFile::Binary(c) = parse(TINY).unwrap() else {
            panic!("expected binary calculus");
        };
        assert_eq!(c.name(), "toy");
        assert_eq!(c.size(), 2);
        assert_eq!(c.compose(1, 1), ValueSet::full(2));
        assert!(c.validate().is_empty());
        assert_eq!(parse(&emit_binary(&c)).unwrap(), CalculusFile::Binary(c));
    }

    #[test]
    fn reports_line_numbers() {
        let bad = TINY.replace("a b -> b", "a q -> b");
        assert_eq!(
            parse(&bad),
            Err(CalculusError::Parse {
                line: 12,
                message: "unknown relation `q`".into()
            })
        );
        let dup = TINY.replace("b b\n", "a b\n");
        assert!(matches!(parse(&dup), Err(CalculusError::Parse { line: 9, .. })));
        assert!(parse("a b\n").is_err());
        assert!(parse("relations\nx\ncomposition\nx x - x\n").is_err());
    }

    #[test]
    fn missing_composition_is_empty() {
        let partial = TINY.replace("b b -> a b\n", "");
        let CalculusFile::Binary(c) = parse(&partial).unwrap() else {
            panic!();
        };
        assert!(c.compose(1, 1).is_empty());
        assert!(!c.validate().is_empty());
    }

    #[test]
    fn universe_only_file() {
        let f = parse("name dirs\nrelations\nB B+N\n").unwrap();
        assert_eq!(
            f,
            CalculusFile::Universe {
                name: "dirs".into(),
                symbols: vec!["B".into(), "B+N".into()]
            }
        );
        assert_eq!(parse(&emit(&f)).unwrap(), f);
    }
}
