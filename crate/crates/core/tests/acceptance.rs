//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsr_core::calculi::{
    cyc_pattern, derive_cyc, derive_point_cd, derive_size_pa, derive_valid_direction_sets, load_rcc8,
    validate_calculus,
};
use qsr_core::engine::{QueueOrder, SearchOutcome, ValueOrder, VarOrder};
use qsr_core::pc_oracle::{compare_pc_gac, decide_matches_enumeration, seeded_instances};
use qsr_core::scenarios::{
    build, check, link_topo_size, post_object_query, CheckOutcome, ConstraintKind, ObjectQuery,
};
use qsr_core::{AspectDecl, Propagation, Scenario};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn topo() -> AspectDecl {
    AspectDecl::binary("topo", Arc::new(load_rcc8()))
}

fn size() -> AspectDecl {
    AspectDecl::binary("size", Arc::new(derive_size_pa()))
}

fn five_regions(with_topo: bool, with_size: bool) -> Scenario {
    let mut s = Scenario::new(["0", "1", "2", "3", "4"]).unwrap();
    s.add_aspect(topo()).unwrap();
    s.add_aspect(size()).unwrap();
    if with_topo {
        s.restrict("topo", &["0", "2"], &["TPP", "EQ"]).unwrap();
        s.restrict("topo", &["1", "0"], &["TPP", "EQ", "PO"]).unwrap();
        s.restrict("topo", &["1", "2"], &["TPP", "EQ"]).unwrap();
        s.restrict("topo", &["4", "3"], &["TPP", "EQ"]).unwrap();
    }
    if with_size {
        s.restrict("size", &["0", "2"], &["<"]).unwrap();
        s.restrict("size", &["3", "1"], &["<", "="]).unwrap();
        s.restrict("size", &["2", "4"], &["<", "="]).unwrap();
    }
    s.link(Arc::new(link_topo_size()), &["topo", "size"]).unwrap();
    s
}

fn five_region_example() -> Outcome {
    let start = Instant::now();
    let combined = check(&five_regions(true, true)).unwrap();
    let topo_only = check(&five_regions(true, false)).unwrap();
    let size_only = check(&five_regions(false, true)).unwrap();
    let elapsed = start.elapsed();
    ensure(combined == CheckOutcome::Inconsistent, || "combined scenario not refuted".into())?;
    ensure(matches!(topo_only, CheckOutcome::Fixpoint(_)), || "topology-only failed".into())?;
    ensure(matches!(size_only, CheckOutcome::Fixpoint(_)), || "size-only failed".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("combined inconsistent, parts at fixpoint, {elapsed:.2?}"))
}

fn table_counts() -> Outcome {
    let counts = [
        ("rcc8 composition", load_rcc8().composition_triples().len(), 193),
        ("size composition", derive_size_pa().composition_triples().len(), 13),
        ("topo&size link", link_topo_size().len(), 14),
        ("cyc relations", derive_cyc().size(), 24),
        ("direction sets", derive_valid_direction_sets().len(), 218),
    ];
    for (name, got, want) in counts {
        ensure(got == want, || format!("{name}: {got} != {want}"))?;
    }
    Ok("193/13/14/24/218".into())
}

fn pc_equals_gac() -> Outcome {
    let start = Instant::now();
    let instances = seeded_instances(Arc::new(load_rcc8()), 500, 8, 1);
    let mut equal = 0;
    let mut first_bad = None;
    for (i, net) in instances.iter().enumerate() {
        if compare_pc_gac(net).equal() {
            equal += 1;
        } else if first_bad.is_none() {
            first_bad = Some(i);
        }
    }
    let elapsed = start.elapsed();
    ensure(equal == 500, || format!("{equal}/500 equal, first mismatch at instance {first_bad:?}"))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("500/500 equal, {elapsed:.2?}"))
}

fn decide_matches_brute_force() -> Outcome {
    let instances = seeded_instances(Arc::new(load_rcc8()), 200, 4, 1);
    let agree = instances
        .iter()
        .filter(|net| decide_matches_enumeration(net).unwrap())
        .count();
    ensure(agree == 200, || format!("{agree}/200 agree"))?;
    Ok("200/200 agree".into())
}

fn confluence() -> Outcome {
    let instances = seeded_instances(Arc::new(load_rcc8()), 50, 8, 5);
    let mut runs = 0;
    for (i, net) in instances.iter().enumerate() {
        let (mut fifo, _) = net.to_network();
        let reference = (fifo.store_mut().propagate(), fifo.store().domains().to_vec());
        for shuffle in 0..20u64 {
            let (mut other, _) = net.to_network();
            other.store_mut().set_queue_order(QueueOrder::Shuffled {
                seed: 1000 * i as u64 + shuffle,
            });
            let got = (other.store_mut().propagate(), other.store().domains().to_vec());
            let same = match (&reference.0, &got.0) {
                (Propagation::Failure, Propagation::Failure) => true,
                (Propagation::Fixpoint, Propagation::Fixpoint) => reference.1 == got.1,
                _ => false,
            };
            ensure(same, || format!("instance {i} shuffle {shuffle} differs"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs}/1000 identical"))
}

fn calculus_axioms() -> Outcome {
    for c in [load_rcc8(), derive_size_pa(), derive_point_cd()] {
        let v = validate_calculus(&c);
        ensure(v.is_empty(), || format!("{}: {} violations", c.name(), v.len()))?;
    }
    let cyc = derive_cyc();
    let v = cyc.validate();
    ensure(v.is_empty(), || format!("cyc: {} violations", v.len()))?;
    for r in 0..cyc.size() {
        ensure(cyc.rotate(cyc.rotate(cyc.rotate(r))) == r, || format!("rotation³ of {}", cyc.symbol(r)))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let [a, b, c, d]: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..360));
        let abc = cyc.index_of(&cyc_pattern(a, b, c)).unwrap();
        let acd = cyc.index_of(&cyc_pattern(a, c, d)).unwrap();
        let abd = cyc.index_of(&cyc_pattern(a, b, d)).unwrap();
        ensure(cyc.compose(abc, acd).contains(abd), || format!("angles {a} {b} {c} {d}"))?;
    }
    Ok("rcc8, size, pointcd, cyc valid; rotation³ = id; 1000 cyc samples sound".into())
}

fn constraint_scaling() -> Outcome {
    for n in 3..=20 {
        let mut s = Scenario::new((0..n).map(|i| format!("r{i}"))).unwrap();
        s.add_aspect(topo()).unwrap();
        s.add_aspect(size()).unwrap();
        let net = build(&s).unwrap();
        for aspect in ["topo", "size"] {
            let conv = net.count(ConstraintKind::Converse, Some(aspect));
            let comp = net.count(ConstraintKind::Composition, Some(aspect));
            ensure(conv == n * (n - 1) / 2, || format!("n={n} {aspect}: {conv} conv"))?;
            ensure(comp == n * (n - 1) * (n - 2) / 6, || format!("n={n} {aspect}: {comp} comp"))?;
        }
    }
    Ok("C(n,2) conv and C(n,3) comp for n in 3..=20".into())
}

/// b and c lie inside a and touch; d overlaps all three. Only (b, c) has
/// the first region smaller and disconnected from or touching the second.
fn query_scenario() -> Scenario {
    let mut s = Scenario::new(["a", "b", "c", "d"]).unwrap();
    s.add_aspect(topo()).unwrap();
    s.add_aspect(size()).unwrap();
    s.link(Arc::new(link_topo_size()), &["topo", "size"]).unwrap();
    s.restrict("topo", &["b", "a"], &["NTPP"]).unwrap();
    s.restrict("topo", &["c", "a"], &["NTPP"]).unwrap();
    s.restrict("topo", &["b", "c"], &["EC"]).unwrap();
    for x in ["a", "b", "c"] {
        s.restrict("topo", &["d", x], &["PO"]).unwrap();
    }
    s.restrict("size", &["b", "c"], &["<"]).unwrap();
    s
}

fn object_query() -> Outcome {
    let objects = ["a", "b", "c", "d"];
    // pairs qualifying in some atomic refinement
    let mut plain = build(&query_scenario()).unwrap();
    let mut brute = BTreeSet::new();
    let refinements = plain.decide_all(|atomic| {
        for x in objects {
            for y in objects {
                if x == y {
                    continue;
                }
                let sz = &atomic.get("size", &[x, y], 0).unwrap().relations[0];
                let tp = &atomic.get("topo", &[x, y], 0).unwrap().relations[0];
                if sz == "<" && (tp == "DC" || tp == "EC") {
                    brute.insert((x.to_string(), y.to_string()));
                }
            }
        }
        true
    });
    ensure(refinements > 0, || "scenario has no atomic refinement".into())?;
    let expected = BTreeSet::from([("b".to_string(), "c".to_string())]);
    ensure(brute == expected, || format!("enumeration found {brute:?}"))?;

    let mut net = build(&query_scenario()).unwrap();
    post_object_query(
        &mut net,
        &["x1", "x2"],
        &[
            ObjectQuery::new("size", &["x1", "x2"], &["<"]),
            ObjectQuery::new("topo", &["x1", "x2"], &["DC", "EC"]),
        ],
    )
    .unwrap();
    let (x1, x2) = (net.object_var("x1").unwrap(), net.object_var("x2").unwrap());
    let SearchOutcome::Solution(sol) = net.store_mut().solve(VarOrder::SmallestDomain, ValueOrder::Ascending) else {
        return Err("query unsatisfiable".into());
    };
    let found = (objects[sol.value(x1)].to_string(), objects[sol.value(x2)].to_string());
    ensure(expected.contains(&found), || format!("solve returned {found:?}"))?;
    let mut all = BTreeSet::new();
    net.decide_all(|a| {
        let pick = |v: &str| a.object_vars.iter().find(|(n, _)| n == v).unwrap().1[0].clone();
        all.insert((pick("x1"), pick("x2")));
        true
    });
    ensure(all == expected, || format!("query solutions bind {all:?}"))?;
    Ok(format!("unique pair {found:?} over {refinements} refinements"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("five-region example refuted by propagation", five_region_example),
        ("table counts", table_counts),
        ("PC equals GAC on 500 instances", pc_equals_gac),
        ("decide agrees with enumeration on 200 instances", decide_matches_brute_force),
        ("propagation is confluent", confluence),
        ("calculus axioms", calculus_axioms),
        ("constraint-count scaling", constraint_scaling),
        ("object-variable query", object_query),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
