//! Cyclic ordering of 2D orientations.
//!
//! Orientations are directions in whole degrees. The relation of `x` to
//! `y` is the class of the angle `(x - y) mod 360`: `e` at 0, `l` strictly
//! between 0 and 180, `o` at 180, `r` beyond. A triple `(a, b, c)` is named
//! by the classes of `(b,a)`, `(c,b)` and `(c,a)`, e.g. `lrl`.

use super::TernaryCalculus;
use crate::bitset::ValueSet;

const CLASSES: [char; 4] = ['e', 'l', 'o', 'r'];

/// Grid (in degrees) used to enumerate orientation quadruples for the
/// composition table.
pub const CYC_GRID_STEP: u32 = 15;

/// Class index (into `e, l, o, r`) of the angle from `y` to `x`.
pub fn orientation_class(x: u32, y: u32) -> usize {
    let alpha = (x + 360 - y % 360) % 360;
    match alpha {
        0 => 0,
        1..=179 => 1,
        180 => 2,
        _ => 3,
    }
}

/// The three-letter pattern of orientations `(a, b, c)`.
pub fn cyc_pattern(a: u32, b: u32, c: u32) -> String {
    [orientation_class(b, a), orientation_class(c, b), orientation_class(c, a)]
        .iter()
        .map(|&i| CLASSES[i])
        .collect()
}

fn index(symbols: &[String], pattern: &str) -> usize {
    symbols
        .iter()
        .position(|s| s == pattern)
        .unwrap_or_else(|| panic!("pattern {pattern} was not enumerated"))
}

/// Derives the 24 realizable triples with their converse
/// (`(a,b,c) → (a,c,b)`), rotation (`(a,b,c) → (c,a,b)`) and composition
/// (`(a,b,c), (a,c,d) → (a,b,d)`).
///
/// Relations depend only on angle differences, so `a` is pinned at 0.
pub fn derive_cyc() -> TernaryCalculus {
    let mut patterns: Vec<String> = Vec::new();
    for b in 0..360 {
        for c in 0..360 {
            patterns.push(cyc_pattern(0, b, c));
        }
    }
    patterns.sort_by_key(|p| p.chars().map(|ch| CLASSES.iter().position(|&x| x == ch).unwrap()).collect::<Vec<_>>());
    patterns.dedup();
    assert_eq!(patterns.len(), 24, "expected 24 realizable orientation triples");
    let symbols = patterns;
    let k = symbols.len();

    let mut converse = vec![usize::MAX; k];
    let mut rotation = vec![usize::MAX; k];
    let record = |table: &mut Vec<usize>, from: usize, to: usize| {
        assert!(table[from] == usize::MAX || table[from] == to, "relation map is not functional");
        table[from] = to;
    };
    for b in 0..360 {
        for c in 0..360 {
            let r = index(&symbols, &cyc_pattern(0, b, c));
            record(&mut converse, r, index(&symbols, &cyc_pattern(0, c, b)));
            record(&mut rotation, r, index(&symbols, &cyc_pattern(c, 0, b)));
        }
    }

    let grid: Vec<u32> = (0..360).step_by(CYC_GRID_STEP as usize).collect();
    let mut composition = vec![ValueSet::EMPTY; k * k];
    for &b in &grid {
        for &c in &grid {
            let abc = index(&symbols, &cyc_pattern(0, b, c));
            for &d in &grid {
                let acd = index(&symbols, &cyc_pattern(0, c, d));
                let abd = index(&symbols, &cyc_pattern(0, b, d));
                composition[abc * k + acd].insert(abd);
            }
        }
    }
    TernaryCalculus::new("cyc", symbols, converse, rotation, composition).expect("derived tables are well-formed")
}
