//! Line-oriented scenario files.
//!
//! ```text
//! # five regions, topology and size
//! objects 0 1 2 3 4
//! aspect topo rcc8
//! aspect size size
//! rel topo 0 2 { TPP EQ }
//! rel size 0 2 { < }
//! link topo_size topo size
//! ```
//!
//! Directives may appear in any order. `time T` unrolls the scenario over
//! steps `0..T`; `rel` then takes an optional `@t` before the braces, and
//! `neighbour <aspect> <table>` ties consecutive steps. A calculus is a
//! built-in name (`rcc8`, `size`, `pointcd`, `cyc`, `dirsets`) or a path to
//! a calculus file, resolved against the scenario file's directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qsr_core::calculi::format::{self, CalculusFile};
use qsr_core::calculi::{derive_cyc, derive_point_cd, derive_size_pa, load_rcc8, validate_calculus};
use qsr_core::scenarios::{
    link_topo_dir, link_topo_size, neighbour_rcc8, AspectCalculus, LinkTable, NeighbourTable, RelationUniverse,
};
use qsr_core::{AspectDecl, Scenario};

pub const BUILTIN_CALCULI: [&str; 5] = ["rcc8", "size", "pointcd", "cyc", "dirsets"];
pub const BUILTIN_LINKS: [&str; 2] = ["topo_size", "topo_dir"];
pub const BUILTIN_NEIGHBOURS: [&str; 1] = ["rcc8"];

/// A parse or validation error; `line` is 1-based, 0 for whole-file errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// A parsed scenario together with how each aspect's calculus was named.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    /// Calculus token of each aspect, as written in the file.
    pub calculus_sources: Vec<String>,
}

enum Directive<'a> {
    Objects(Vec<&'a str>),
    Aspect {
        name: &'a str,
        calculus: &'a str,
        set_valued: bool,
    },
    Time(usize),
    Rel {
        aspect: &'a str,
        objects: Vec<&'a str>,
        time: Option<usize>,
        relations: Vec<&'a str>,
    },
    Link {
        table: &'a str,
        aspects: Vec<&'a str>,
    },
    Neighbour {
        aspect: &'a str,
        table: &'a str,
    },
}

fn tokens(line: &str) -> Vec<&str> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    for word in body.split_whitespace() {
        // braces may touch their neighbours: `{TPP EQ}`
        let mut rest = word;
        while !rest.is_empty() {
            match rest.find(['{', '}']) {
                Some(0) => {
                    out.push(&rest[..1]);
                    rest = &rest[1..];
                }
                Some(i) => {
                    out.push(&rest[..i]);
                    rest = &rest[i..];
                }
                None => {
                    out.push(rest);
                    rest = "";
                }
            }
        }
    }
    out
}

fn directive<'a>(line: usize, toks: &[&'a str]) -> Result<Directive<'a>, ParseError> {
    let args = &toks[1..];
    match toks[0] {
        "objects" => Ok(Directive::Objects(args.to_vec())),
        "aspect" => match args {
            [name, calculus] => Ok(Directive::Aspect {
                name,
                calculus,
                set_valued: false,
            }),
            [name, calculus, "set_valued"] => Ok(Directive::Aspect {
                name,
                calculus,
                set_valued: true,
            }),
            _ => Err(err(line, "expected `aspect <name> <calculus> [set_valued]`")),
        },
        "time" => match args {
            [t] => t
                .parse()
                .ok()
                .filter(|&t: &usize| t > 0)
                .map(Directive::Time)
                .ok_or_else(|| err(line, format!("`{t}` is not a positive step count"))),
            _ => Err(err(line, "expected `time <steps>`")),
        },
        "rel" => {
            let open = args.iter().position(|&t| t == "{");
            let close = args.iter().position(|&t| t == "}");
            let (Some(open), Some(close)) = (open, close) else {
                return Err(err(line, "expected `rel <aspect> <objects> [@t] { <relations> }`"));
            };
            if close != args.len() - 1 || close < open || open < 2 {
                return Err(err(line, "expected `rel <aspect> <objects> [@t] { <relations> }`"));
            }
            let mut head = &args[1..open];
            let mut time = None;
            if let Some(last) = head.last().and_then(|t| t.strip_prefix('@')) {
                time = Some(last.parse().map_err(|_| err(line, format!("bad time step `@{last}`")))?);
                head = &head[..head.len() - 1];
            }
            if head.is_empty() {
                return Err(err(line, "`rel` needs an object tuple"));
            }
            let relations = args[open + 1..close].to_vec();
            if relations.is_empty() {
                return Err(err(line, "empty relation set"));
            }
            if let Some(bad) = relations.iter().find(|r| **r == "{") {
                return Err(err(line, format!("unexpected `{bad}`")));
            }
            Ok(Directive::Rel {
                aspect: args[0],
                objects: head.to_vec(),
                time,
                relations,
            })
        }
        "link" => match args {
            [table, aspects @ ..] if !aspects.is_empty() => Ok(Directive::Link {
                table,
                aspects: aspects.to_vec(),
            }),
            _ => Err(err(line, "expected `link <table> <aspect>...`")),
        },
        "neighbour" => match args {
            [aspect, table] => Ok(Directive::Neighbour { aspect, table }),
            _ => Err(err(line, "expected `neighbour <aspect> <table>`")),
        },
        other => Err(err(line, format!("unknown directive `{other}`"))),
    }
}

/// Resolves a calculus token to an aspect.
pub fn resolve_aspect(
    name: &str,
    calculus: &str,
    set_valued: bool,
    base: Option<&Path>,
) -> Result<AspectDecl, String> {
    let decl = match calculus {
        "rcc8" => AspectDecl::binary(name, Arc::new(load_rcc8())),
        "size" => AspectDecl::binary(name, Arc::new(derive_size_pa())),
        "pointcd" => AspectDecl::binary(name, Arc::new(derive_point_cd())),
        "cyc" => AspectDecl::ternary(name, Arc::new(derive_cyc())),
        "dirsets" => AspectDecl::directions(name),
        path if path.contains('/') || path.ends_with(".cal") => {
            let full: PathBuf = match base {
                Some(dir) => dir.join(path),
                None => PathBuf::from(path),
            };
            let text = std::fs::read_to_string(&full).map_err(|e| format!("cannot read `{}`: {e}", full.display()))?;
            match format::parse(&text).map_err(|e| format!("{}: {e}", full.display()))? {
                CalculusFile::Binary(c) => {
                    let v = validate_calculus(&c);
                    if let Some(first) = v.first() {
                        return Err(format!("{}: {} violations, first: {first}", full.display(), v.len()));
                    }
                    AspectDecl::binary(name, Arc::new(c))
                }
                CalculusFile::Ternary(c) => {
                    let v = c.validate();
                    if let Some(first) = v.first() {
                        return Err(format!("{}: {} violations, first: {first}", full.display(), v.len()));
                    }
                    AspectDecl::ternary(name, Arc::new(c))
                }
                CalculusFile::Universe { name: u, symbols } => AspectDecl {
                    name: name.to_string(),
                    calculus: AspectCalculus::Universe(Arc::new(RelationUniverse { name: u, symbols })),
                    set_valued: false,
                },
            }
        }
        other => {
            return Err(format!(
                "unknown calculus `{other}` (built-in: {}, or a path to a calculus file)",
                BUILTIN_CALCULI.join(", ")
            ))
        }
    };
    Ok(AspectDecl { set_valued, ..decl })
}

pub fn builtin_link(name: &str) -> Option<LinkTable> {
    match name {
        "topo_size" => Some(link_topo_size()),
        "topo_dir" => Some(link_topo_dir()),
        _ => None,
    }
}

pub fn builtin_neighbour(name: &str) -> Option<NeighbourTable> {
    match name {
        "rcc8" => Some(neighbour_rcc8()),
        _ => None,
    }
}

impl ScenarioFile {
    /// Parses `text`; relative calculus paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, ParseError> {
        let mut directives = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let toks = tokens(raw);
            if !toks.is_empty() {
                directives.push((i + 1, directive(i + 1, &toks)?));
            }
        }

        let mut objects = None;
        for (line, d) in &directives {
            if let Directive::Objects(o) = d {
                if objects.is_some() {
                    return Err(err(*line, "objects declared twice"));
                }
                objects = Some((*line, o.clone()));
            }
        }
        let Some((obj_line, objects)) = objects else {
            return Err(err(0, "no `objects` line"));
        };
        let mut scenario = Scenario::new(objects.iter().copied()).map_err(|e| err(obj_line, e.to_string()))?;
        let mut calculus_sources = Vec::new();

        // Apply in dependency order, keeping the file order within a kind.
        for (line, d) in &directives {
            match d {
                Directive::Aspect {
                    name,
                    calculus,
                    set_valued,
                } => {
                    let decl = resolve_aspect(name, calculus, *set_valued, base).map_err(|m| err(*line, m))?;
                    scenario.add_aspect(decl).map_err(|e| err(*line, e.to_string()))?;
                    calculus_sources.push(calculus.to_string());
                }
                Directive::Time(t) => {
                    if scenario.time_steps().is_some() {
                        return Err(err(*line, "time declared twice"));
                    }
                    scenario.set_time_steps(*t).map_err(|e| err(*line, e.to_string()))?;
                }
                _ => {}
            }
        }
        for (line, d) in &directives {
            match d {
                Directive::Rel {
                    aspect,
                    objects,
                    time,
                    relations,
                } => {
                    scenario
                        .restrict_at(aspect, objects, *time, relations)
                        .map_err(|e| err(*line, e.to_string()))?;
                }
                Directive::Link { table, aspects } => {
                    let t = builtin_link(table).ok_or_else(|| {
                        err(*line, format!("unknown link table `{table}` (built-in: {})", BUILTIN_LINKS.join(", ")))
                    })?;
                    scenario.link(Arc::new(t), aspects).map_err(|e| err(*line, e.to_string()))?;
                }
                Directive::Neighbour { aspect, table } => {
                    let t = builtin_neighbour(table).ok_or_else(|| {
                        err(
                            *line,
                            format!("unknown neighbourhood `{table}` (built-in: {})", BUILTIN_NEIGHBOURS.join(", ")),
                        )
                    })?;
                    scenario.neighbour(aspect, Arc::new(t)).map_err(|e| err(*line, e.to_string()))?;
                }
                _ => {}
            }
        }
        Ok(ScenarioFile {
            scenario,
            calculus_sources,
        })
    }

    pub fn read(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    /// Writes the scenario back in file syntax.
    pub fn emit(&self) -> String {
        let s = &self.scenario;
        let mut out = String::new();
        writeln!(out, "objects {}", s.objects().join(" ")).unwrap();
        if let Some(t) = s.time_steps() {
            writeln!(out, "time {t}").unwrap();
        }
        for (a, source) in s.aspects().iter().zip(&self.calculus_sources) {
            let flag = if a.set_valued { " set_valued" } else { "" };
            writeln!(out, "aspect {} {source}{flag}", a.name).unwrap();
        }
        for r in s.restrictions() {
            let a = &s.aspects()[r.aspect];
            let objs: Vec<&str> = r.objects.iter().map(|&o| s.objects()[o].as_str()).collect();
            let rels: Vec<&str> = r.allowed.iter().map(|v| a.symbols()[v].as_str()).collect();
            let at = r.time.map(|t| format!(" @{t}")).unwrap_or_default();
            writeln!(out, "rel {} {}{at} {{ {} }}", a.name, objs.join(" "), rels.join(" ")).unwrap();
        }
        for l in s.links() {
            let names: Vec<&str> = l.aspects.iter().map(|&a| s.aspects()[a].name.as_str()).collect();
            writeln!(out, "link {} {}", l.table.name(), names.join(" ")).unwrap();
        }
        for nb in s.neighbours() {
            writeln!(out, "neighbour {} {}", s.aspects()[nb.aspect].name, nb.table.name()).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIVE: &str = "\
# five regions
objects 0 1 2 3 4
aspect topo rcc8
aspect size size
rel topo 0 2 { TPP EQ }
rel topo 1 0 {TPP EQ PO}
rel size 0 2 { < }   # strictly smaller
link topo_size topo size
";

    #[test]
    fn parses_and_round_trips() {
        let f = ScenarioFile::parse(FIVE, None).unwrap();
        assert_eq!(f.scenario.objects().len(), 5);
        assert_eq!(f.scenario.restrictions().len(), 3);
        assert_eq!(f.scenario.links().len(), 1);
        let again = ScenarioFile::parse(&f.emit(), None).unwrap();
        assert_eq!(again, f);
        assert_eq!(again.emit(), f.emit());
    }

    #[test]
    fn temporal_round_trip() {
        let text = "objects a b\ntime 3\naspect topo rcc8\nneighbour topo rcc8\nrel topo a b @0 { DC }\nrel topo a b @2 { PO }\nrel topo b a { DC EC PO }\n";
        let f = ScenarioFile::parse(text, None).unwrap();
        assert_eq!(f.scenario.time_steps(), Some(3));
        assert_eq!(f.scenario.restrictions()[0].time, Some(0));
        assert_eq!(f.scenario.restrictions()[2].time, None);
        assert_eq!(ScenarioFile::parse(&f.emit(), None).unwrap(), f);
    }

    #[test]
    fn set_valued_directions() {
        let text = "objects a b\naspect topo rcc8\naspect dir dirsets set_valued\nlink topo_dir topo dir\nrel dir a b { B B+N }\n";
        let f = ScenarioFile::parse(text, None).unwrap();
        assert!(f.scenario.aspects()[1].set_valued);
        assert_eq!(ScenarioFile::parse(&f.emit(), None).unwrap(), f);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("objects a b\naspect topo rcc8\nrel topo a b { XX }\n", 3, "XX"),
            ("objects a b\naspect topo nope\n", 2, "unknown calculus"),
            ("objects a b\naspect topo rcc8\nrel topo a c { DC }\n", 3, "unknown object"),
            ("objects a b\nfrobnicate\n", 2, "unknown directive"),
            ("objects a b\naspect topo rcc8\nrel topo a b DC\n", 3, "expected"),
            ("objects a b\naspect topo rcc8\nrel topo a b { }\n", 3, "empty"),
            ("objects a b\naspect topo rcc8\nrel topo a b @1 { DC }\n", 3, "time step"),
            ("objects a b\naspect topo rcc8\nlink topo_size topo\n", 3, "link"),
            ("objects a b\ntime 0\n", 2, "positive"),
            ("objects\naspect topo rcc8\n", 1, "no objects"),
            ("objects a a\n", 1, "twice"),
            ("objects a\nobjects b\n", 2, "twice"),
            ("objects a b\naspect size pointcd set_valued\n", 2, "direction tiles"),
            ("objects a b\naspect t rcc8\naspect t size\n", 3, "declared twice"),
        ];
        for (text, line, needle) in cases {
            let e = ScenarioFile::parse(text, None).unwrap_err();
            assert_eq!(e.line, line, "{text}: {e}");
            assert!(e.to_string().contains(needle), "{text}: {e}");
        }
        let e = ScenarioFile::parse("aspect topo rcc8\n", None).unwrap_err();
        assert_eq!(e.line, 0);
    }

    #[test]
    fn calculus_paths_resolve_against_the_file() {
        let dir = std::env::temp_dir().join(format!("qsr-cal-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("rcc8.cal"), qsr_core::calculi::RCC8_DATA).unwrap();
        let f = ScenarioFile::parse("objects a b c\naspect t ./rcc8.cal\nrel t a b { NTPP }\n", Some(&dir)).unwrap();
        assert_eq!(f.calculus_sources, ["./rcc8.cal"]);
        let bad = qsr_core::calculi::RCC8_DATA.replace("TPP TPPi\n", "TPP TPP\n");
        std::fs::write(dir.join("bad.cal"), bad).unwrap();
        let e = ScenarioFile::parse("objects a b\naspect t bad.cal\n", Some(&dir)).unwrap_err();
        assert!(e.to_string().contains("violations"), "{e}");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
