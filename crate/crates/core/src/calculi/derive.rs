//! Calculi derived by exhaustive enumeration of small models.

use std::cmp::Ordering;

use super::Calculus;
use crate::bitset::ValueSet;

/// Builds a binary calculus from a finite model: `classify(x, y)` names the
/// relation of `x` to `y`, and `compose_model` enumerates every
/// `(x, y, z)` triple whose relations should be collected.
fn from_model<P: Copy>(
    name: &str,
    symbols: &[&str],
    identity: usize,
    points: &[P],
    classify: impl Fn(P, P) -> usize,
) -> Calculus {
    let k = symbols.len();
    let mut converse = vec![usize::MAX; k];
    let mut composition = vec![ValueSet::EMPTY; k * k];
    for &x in points {
        for &y in points {
            let r = classify(x, y);
            let c = classify(y, x);
            assert!(converse[r] == usize::MAX || converse[r] == c, "converse is not functional");
            converse[r] = c;
            for &z in points {
                composition[r * k + classify(y, z)].insert(classify(x, z));
            }
        }
    }
    let symbols = symbols.iter().map(|s| s.to_string()).collect();
    Calculus::new(name, symbols, converse, composition, identity).expect("derived tables are well-formed")
}

/// Point algebra on sizes `{<, =, >}`, derived from integers `0..=2`.
pub fn derive_size_pa() -> Calculus {
    let points: Vec<i32> = (0..=2).collect();
    from_model("size", &["<", "=", ">"], 1, &points, |x, y| match x.cmp(&y) {
        Ordering::Less => 0,
        Ordering::Equal => 1,
        Ordering::Greater => 2,
    })
}

const POINT_CD: [&str; 9] = ["N", "NE", "E", "SE", "S", "SW", "W", "NW", "EQ"];

/// Projection-based cardinal directions between points: the relation of
/// `a` to `b` is named by the signs of `a - b` (north is `+y`).
fn classify_displacement(dx: i32, dy: i32) -> usize {
    match (dx.signum(), dy.signum()) {
        (0, 1) => 0,
        (1, 1) => 1,
        (1, 0) => 2,
        (1, -1) => 3,
        (0, -1) => 4,
        (-1, -1) => 5,
        (-1, 0) => 6,
        (-1, 1) => 7,
        _ => 8,
    }
}

/// Nine point directions `N, NE, E, SE, S, SW, W, NW, EQ`, derived from
/// points on a 5×5 integer grid.
pub fn derive_point_cd() -> Calculus {
    let points: Vec<(i32, i32)> = (-2..=2).flat_map(|x| (-2..=2).map(move |y| (x, y))).collect();
    from_model("pointcd", &POINT_CD, 8, &points, |a, b| classify_displacement(a.0 - b.0, a.1 - b.1))
}
