use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::format::{self, CalculusFile};
use super::*;

fn set(c: &Calculus, names: &[&str]) -> ValueSet {
    names.iter().map(|n| c.index_of(n).unwrap()).collect()
}

#[test]
fn rcc8_anchors() {
    let c = load_rcc8();
    assert_eq!(c.size(), 8);
    assert_eq!(c.symbol(c.identity()), "EQ");
    assert_eq!(c.composition_triples().len(), 193);
    let idx = |n| c.index_of(n).unwrap();
    assert!(c.compose(idx("NTPP"), idx("EC")).contains(idx("DC")));
    assert_eq!(c.converse(idx("EQ")), idx("EQ"));
    assert_eq!(c.converse(idx("TPP")), idx("TPPi"));
    assert_eq!(c.converse_pairs().len(), 8);
    for r in 0..8 {
        assert_eq!(c.compose(r, c.identity()), ValueSet::singleton(r));
        assert_eq!(c.compose(c.identity(), r), ValueSet::singleton(r));
    }
    assert!(validate_calculus(&c).is_empty());
}

/// RCC-8 relation between two discs given by integer centre and radius.
fn disc_relation(a: (i64, i64, i64), b: (i64, i64, i64)) -> &'static str {
    let d2 = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
    let (ra, rb) = (a.2, b.2);
    if d2 > (ra + rb).pow(2) {
        "DC"
    } else if d2 == (ra + rb).pow(2) {
        "EC"
    } else if d2 == 0 && ra == rb {
        "EQ"
    } else if ra < rb && d2 < (rb - ra).pow(2) {
        "NTPP"
    } else if ra < rb && d2 == (rb - ra).pow(2) {
        "TPP"
    } else if ra > rb && d2 < (ra - rb).pow(2) {
        "NTPPi"
    } else if ra > rb && d2 == (ra - rb).pow(2) {
        "TPPi"
    } else {
        "PO"
    }
}

#[test]
fn rcc8_table_is_sound_for_discs() {
    // Every triple realized by three discs must be in the table,
    let c = load_rcc8();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut seen = std::collections::BTreeSet::new();
    let disc = |rng: &mut ChaCha8Rng| (rng.gen_range(-4..=4), rng.gen_range(-4..=4), rng.gen_range(1..=4));
    for _ in 0..100_000 {
        let (a, b, d) = (disc(&mut rng), disc(&mut rng), disc(&mut rng));
        let r = c.index_of(disc_relation(a, b)).unwrap();
        let s = c.index_of(disc_relation(b, d)).unwrap();
        let t = c.index_of(disc_relation(a, d)).unwrap();
        assert!(
            c.compose(r, s).contains(t),
            "{} {} {} realized by discs but missing",
            c.symbol(r),
            c.symbol(s),
            c.symbol(t)
        );
        seen.insert((r, s, t));
    }
    // and discs on a small grid realize every triple of the table
    assert_eq!(seen.len(), 193);
}

#[test]
fn corrupted_rcc8_is_reported() {
    let bad = RCC8_DATA.replace("TPP TPPi\n", "TPP TPP\n");
    let CalculusFile::Binary(c) = format::parse(&bad).unwrap() else {
        panic!();
    };
    let v = validate_calculus(&c);
    assert!(v.iter().any(|x| matches!(x, Violation::ConverseNotInvolutive { relation } if relation == "TPPi")));
    assert!(v.iter().any(|x| matches!(x, Violation::ConverseNotDerivable { relation, .. } if relation == "TPP")));
    assert!(matches!(parse_rcc8(&bad), Err(CalculusError::Invalid { .. })));

    let dropped = RCC8_DATA.replace("NTPP EC -> DC\n", "NTPP EC -> EC\n");
    assert!(!validate_calculus(&parse_rcc8_unchecked(&dropped)).is_empty());
}

fn parse_rcc8_unchecked(text: &str) -> Calculus {
    match format::parse(text).unwrap() {
        CalculusFile::Binary(c) => c,
        _ => panic!(),
    }
}

#[test]
fn rcc8_round_trips_through_file_format() {
    let c = load_rcc8();
    let text = format::emit_binary(&c);
    assert_eq!(parse_rcc8(&text).unwrap(), c);
}

#[test]
fn size_calculus() {
    let c = derive_size_pa();
    assert_eq!(c.symbols(), &["<", "=", ">"]);
    assert_eq!(c.symbol(c.identity()), "=");
    let pairs: Vec<(&str, &str)> = c
        .converse_pairs()
        .iter()
        .map(|&[a, b]| (c.symbol(a), c.symbol(b)))
        .collect();
    assert_eq!(pairs, vec![("<", ">"), ("=", "="), (">", "<")]);
    assert_eq!(c.composition_triples().len(), 13);
    assert_eq!(c.compose(0, 2), c.full());
    assert_eq!(c.compose(0, 0), set(&c, &["<"]));
    assert_eq!(c.compose(0, 1), set(&c, &["<"]));
    assert!(validate_calculus(&c).is_empty());
}

#[test]
fn point_direction_calculus() {
    let c = derive_point_cd();
    assert_eq!(c.size(), 9);
    assert_eq!(c.symbol(c.identity()), "EQ");
    let i = |n| c.index_of(n).unwrap();
    assert_eq!(c.compose(i("N"), i("N")), set(&c, &["N"]));
    // opposite axis directions stay on the axis
    assert_eq!(c.compose(i("N"), i("S")), set(&c, &["N", "EQ", "S"]));
    // opposite diagonals reach every relation
    assert_eq!(c.compose(i("NE"), i("SW")), c.full());
    assert_eq!(c.compose(i("N"), i("E")), set(&c, &["NE"]));
    assert_eq!(c.converse(i("NW")), i("SE"));
    assert!(validate_calculus(&c).is_empty());
}

#[test]
fn cyc_calculus() {
    let c = derive_cyc();
    assert_eq!(c.size(), 24);
    for name in ["lrl", "lel", "rol", "eee"] {
        assert!(c.index_of(name).is_some(), "{name}");
    }
    let eee = c.index_of("eee").unwrap();
    assert_eq!(c.rotate(eee), eee);
    for r in 0..24 {
        assert_eq!(c.rotate(c.rotate(c.rotate(r))), r);
        assert_eq!(c.converse(c.converse(r)), r);
    }
    assert!(c.validate().is_empty(), "{:?}", c.validate());
}

#[test]
fn cyc_composition_respects_shared_orientation() {
    // comp(abc, acd) is non-empty iff both agree on the relation of c to a,
    // and the result keeps (b,a) from the first and (d,a) from the second.
    let c = derive_cyc();
    for r in 0..24 {
        for s in 0..24 {
            let (rs, ss) = (c.symbol(r).as_bytes(), c.symbol(s).as_bytes());
            let out = c.compose(r, s);
            assert_eq!(!out.is_empty(), rs[2] == ss[0], "{} {}", c.symbol(r), c.symbol(s));
            for t in out.iter() {
                let ts = c.symbol(t).as_bytes();
                assert_eq!(ts[0], rs[0]);
                assert_eq!(ts[2], ss[2]);
            }
        }
    }
}

#[test]
fn cyc_composition_is_sound_for_random_orientations() {
    let c = derive_cyc();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..1000 {
        let [a, b, cc, d]: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..360));
        let abc = c.index_of(&cyc_pattern(a, b, cc)).unwrap();
        let acd = c.index_of(&cyc_pattern(a, cc, d)).unwrap();
        let abd = c.index_of(&cyc_pattern(a, b, d)).unwrap();
        assert!(c.compose(abc, acd).contains(abd), "angles {a} {b} {cc} {d}");
    }
}

#[test]
fn orientation_classes() {
    assert_eq!(orientation_class(10, 10), 0);
    assert_eq!(orientation_class(100, 10), 1);
    assert_eq!(orientation_class(190, 10), 2);
    assert_eq!(orientation_class(0, 10), 3);
    assert_eq!(cyc_pattern(0, 0, 0), "eee");
}

#[test]
fn derivations_are_deterministic() {
    assert_eq!(format::emit_ternary(&derive_cyc()), format::emit_ternary(&derive_cyc()));
    assert_eq!(derive_size_pa(), derive_size_pa());
    assert_eq!(derive_point_cd(), derive_point_cd());
    assert_eq!(derive_valid_direction_sets(), derive_valid_direction_sets());
    let text = format::emit_ternary(&derive_cyc());
    assert_eq!(format::parse(&text).unwrap(), CalculusFile::Ternary(derive_cyc()));
}

#[test]
fn valid_direction_sets() {
    let u = derive_valid_direction_sets();
    assert_eq!(u.len(), 218);
    let parse = |s| DirectionUniverse::parse_set(s).unwrap();
    assert!(u.is_valid(parse("N+NE+E")));
    assert!(!u.is_valid(parse("N+S")));
    assert!(u.is_valid(parse("B+N+NE+E+SE+S")));
    assert!(u.is_valid(parse("B")));
    assert!(!u.is_valid(0));
    assert!(u.valid_sets().windows(2).all(|w| w[0] < w[1]));
    assert_eq!(set_name(parse("NE+B+N")), "B+N+NE");
    assert_eq!(DirectionUniverse::parse_set("B+B"), None);
    assert_eq!(DirectionUniverse::parse_set("X"), None);
    // every single tile is a connected region, the full grid too
    assert!((0..9).all(|t| u.is_valid(1 << t)));
    assert!(u.is_valid(0x1ff));
}
