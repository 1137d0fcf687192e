//! Subcommand bodies. Each writes its report to `out` and returns the
//! process exit code.

use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use qsr_core::calculi::format::{self, CalculusFile};
use qsr_core::calculi::{
    derive_cyc, derive_point_cd, derive_size_pa, derive_valid_direction_sets, load_rcc8,
    validate_calculus, Violation,
};
use qsr_core::pc_oracle::{seeded_instances, verify as run_verify, DECIDE_CHECK_SIZE};
use qsr_core::scenarios::{build, link_topo_size, AspectCalculus, CheckOutcome, RelationEntry, RelationReport};

use crate::scenario_file::ScenarioFile;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

fn entry_line(e: &RelationEntry, timed: bool) -> String {
    let at = if timed { format!(" @{}", e.time) } else { String::new() };
    format!("rel {} {}{at} {{ {} }}", e.aspect, e.objects.join(" "), e.relations.join(" "))
}

fn entry_json(e: &RelationEntry, timed: bool) -> Value {
    let mut v = json!({
        "aspect": e.aspect,
        "objects": e.objects,
        "relations": e.relations,
    });
    if timed {
        v["time"] = json!(e.time);
    }
    v
}

fn write_report(out: &mut dyn Write, report: &RelationReport, timed: bool) -> io::Result<()> {
    for e in &report.entries {
        writeln!(out, "{}", entry_line(e, timed))?;
    }
    Ok(())
}

pub fn check(file: &ScenarioFile, json: bool, out: &mut dyn Write) -> io::Result<u8> {
    let timed = file.scenario.time_steps().is_some();
    let mut net = match build(&file.scenario) {
        Ok(net) => net,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let outcome = net.check();
    match (&outcome, json) {
        (CheckOutcome::Inconsistent, false) => writeln!(out, "INCONSISTENT")?,
        (CheckOutcome::Inconsistent, true) => writeln!(out, "{}", json!({ "status": "inconsistent" }))?,
        (CheckOutcome::Fixpoint(report), false) => {
            writeln!(out, "FIXPOINT")?;
            write_report(out, report, timed)?;
        }
        (CheckOutcome::Fixpoint(report), true) => {
            let rels: Vec<Value> = report.entries.iter().map(|e| entry_json(e, timed)).collect();
            writeln!(out, "{}", json!({ "status": "fixpoint", "relations": rels }))?;
        }
    }
    Ok(match outcome {
        CheckOutcome::Inconsistent => EXIT_FAIL,
        CheckOutcome::Fixpoint(_) => EXIT_OK,
    })
}

/// Search results are only known to be realizable for plain RCC-8
/// networks; anything else is reported as consistent with respect to the
/// encoded constraints.
fn verdict(file: &ScenarioFile) -> &'static str {
    let s = &file.scenario;
    let plain_rcc8 = s.links().is_empty()
        && s.neighbours().is_empty()
        && s
            .aspects()
            .iter()
            .all(|a| matches!(&a.calculus, AspectCalculus::Binary(c) if c.name() == "rcc8"));
    if plain_rcc8 {
        "consistent"
    } else {
        "search-consistent"
    }
}

pub fn decide(file: &ScenarioFile, all: bool, json: bool, out: &mut dyn Write) -> io::Result<u8> {
    let timed = file.scenario.time_steps().is_some();
    let mut net = match build(&file.scenario) {
        Ok(net) => net,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let status = verdict(file);
    let mut failure = None;
    let mut seen = 0;
    let count = net.decide_all(|atomic| {
        seen += 1;
        let written = if json {
            let rels: Vec<Value> = atomic.entries.iter().map(|e| entry_json(e, timed)).collect();
            writeln!(out, "{}", json!({ "status": status, "relations": rels }))
        } else {
            let header = if all { format!("scenario {seen}") } else { status.to_uppercase() };
            writeln!(out, "{header}").and_then(|_| write_report(out, atomic, timed))
        };
        match written {
            Ok(()) => all,
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if count == 0 {
        return Ok(EXIT_FAIL);
    }
    if all {
        if json {
            writeln!(out, "{}", json!({ "status": status, "count": count }))?;
        } else {
            writeln!(out, "{} {count} atomic scenarios", status.to_uppercase())?;
        }
    }
    Ok(EXIT_OK)
}

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn violations_check(name: &str, v: &[Violation], detail: String) -> Check {
    Check {
        name: name.to_string(),
        ok: v.is_empty(),
        detail: if v.is_empty() {
            detail
        } else {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        },
    }
}

fn count_check(name: &str, got: usize, want: usize) -> Check {
    Check {
        name: name.to_string(),
        ok: got == want,
        detail: format!("{got} (expected {want})"),
    }
}

pub fn validate_tables(calculus: Option<&Path>, json: bool, out: &mut dyn Write) -> io::Result<u8> {
    let mut checks = Vec::new();
    let rcc8 = load_rcc8();
    let size = derive_size_pa();
    let pointcd = derive_point_cd();
    let cyc = derive_cyc();
    checks.push(violations_check("rcc8 axioms", &validate_calculus(&rcc8), "ok".into()));
    checks.push(violations_check("size axioms", &validate_calculus(&size), "ok".into()));
    checks.push(violations_check("pointcd axioms", &validate_calculus(&pointcd), "ok".into()));
    checks.push(violations_check("cyc axioms", &cyc.validate(), "ok".into()));
    checks.push(count_check("rcc8 composition triples", rcc8.composition_triples().len(), 193));
    checks.push(count_check("size composition triples", size.composition_triples().len(), 13));
    checks.push(count_check("topo_size link pairs", link_topo_size().len(), 14));
    checks.push(count_check("cyc relations", cyc.size(), 24));
    checks.push(count_check("valid direction sets", derive_valid_direction_sets().len(), 218));
    let deterministic = format::emit_ternary(&cyc) == format::emit_ternary(&derive_cyc());
    checks.push(Check {
        name: "cyc derivation deterministic".into(),
        ok: deterministic,
        detail: if deterministic { "identical" } else { "differs" }.into(),
    });

    if let Some(path) = calculus {
        let name = path.display().to_string();
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {name}: {e}");
                return Ok(EXIT_USAGE);
            }
        };
        let parsed = match format::parse(&text) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {name}: {e}");
                return Ok(EXIT_USAGE);
            }
        };
        checks.push(match parsed {
            CalculusFile::Binary(c) => {
                let detail = format!("{} relations, {} composition triples", c.size(), c.composition_triples().len());
                violations_check(&name, &validate_calculus(&c), detail)
            }
            CalculusFile::Ternary(c) => violations_check(&name, &c.validate(), format!("{} relations", c.size())),
            CalculusFile::Universe { symbols, .. } => Check {
                name,
                ok: true,
                detail: format!("{} relations, no tables", symbols.len()),
            },
        });
    }

    let passed = checks.iter().all(|c| c.ok);
    if json {
        let items: Vec<Value> = checks
            .iter()
            .map(|c| json!({ "check": c.name, "ok": c.ok, "detail": c.detail }))
            .collect();
        writeln!(out, "{}", json!({ "ok": passed, "checks": items }))?;
    } else {
        for c in &checks {
            writeln!(out, "{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

pub fn verify(instances: usize, max_n: usize, seed: u64, json: bool, out: &mut dyn Write) -> io::Result<u8> {
    let nets = seeded_instances(Arc::new(load_rcc8()), instances, max_n, seed);
    let r = run_verify(&nets);
    if json {
        writeln!(
            out,
            "{}",
            json!({
                "instances": r.instances,
                "max_n": max_n,
                "seed": seed,
                "pc_gac_equal": r.pc_gac_equal,
                "small_instances": r.small,
                "decide_agrees": r.decide_agrees,
                "inconsistent": r.inconsistent,
                "failures": r.failures,
                "ok": r.passed(),
            })
        )?;
    } else {
        writeln!(out, "instances {} (sizes 3..={max_n}, seed {seed})", r.instances)?;
        writeln!(out, "pc == gac {}/{}", r.pc_gac_equal, r.instances)?;
        writeln!(out, "decide == enumeration (n <= {DECIDE_CHECK_SIZE}) {}/{}", r.decide_agrees, r.small)?;
        writeln!(out, "inconsistent {}", r.inconsistent)?;
        if !r.failures.is_empty() {
            let idx: Vec<String> = r.failures.iter().map(ToString::to_string).collect();
            writeln!(out, "failing instances {}", idx.join(" "))?;
        }
        writeln!(out, "{}", if r.passed() { "PASS" } else { "FAIL" })?;
    }
    Ok(if r.passed() { EXIT_OK } else { EXIT_FAIL })
}

/// Calculus text for `derive`.
pub fn derived_text(which: &str) -> Option<String> {
    Some(match which {
        "cyc" => format::emit_ternary(&derive_cyc()),
        "size" => format::emit_binary(&derive_size_pa()),
        "pointcd" => format::emit_binary(&derive_point_cd()),
        "dirsets" => format::emit_universe("dirsets", &derive_valid_direction_sets().symbols()),
        "rcc8" => format::emit_binary(&load_rcc8()),
        _ => return None,
    })
}

pub fn derive(which: &str, dest: Option<&Path>, json: bool, out: &mut dyn Write) -> io::Result<u8> {
    let Some(text) = derived_text(which) else {
        eprintln!("error: unknown calculus `{which}`");
        return Ok(EXIT_USAGE);
    };
    match dest {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return Ok(EXIT_USAGE);
            }
            if json {
                writeln!(out, "{}", json!({ "calculus": which, "written": path.display().to_string() }))?;
            }
        }
        None if json => writeln!(out, "{}", json!({ "calculus": which, "text": text }))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}
