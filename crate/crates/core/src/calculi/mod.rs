//! Qualitative calculi: base relations with converse and composition.
//!
//! RCC-8 ships as an embedded table; the size, point-direction and cyclic
//! orientation calculi and the connected direction-tile sets are derived by
//! enumerating small geometric models.

mod cyc;
mod derive;
mod directions;
pub mod format;
mod rcc8;

use std::fmt;

use thiserror::Error;

use crate::bitset::{ValueSet, MAX_UNIVERSE};

pub use cyc::{derive_cyc, orientation_class, cyc_pattern, CYC_GRID_STEP};
pub use derive::{derive_point_cd, derive_size_pa};
pub use directions::{derive_valid_direction_sets, set_name, DirectionUniverse, DIRECTION_TILES};
pub use rcc8::{load_rcc8, parse_rcc8, RCC8_DATA};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Structure(String),
    #[error("calculus {name} violates {} axiom(s): {}", .violations.len(), render(.violations))]
    Invalid { name: String, violations: Vec<Violation> },
}

fn render(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// One failed axiom check, with relations named by symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ConverseNotInvolutive { relation: String },
    RightIdentity { relation: String, found: Vec<String> },
    LeftIdentity { relation: String, found: Vec<String> },
    ConverseComposition { r: String, s: String, t: String },
    CycleLaw { r: String, s: String, t: String },
    EmptyComposition { r: String, s: String },
    ConverseNotDerivable { relation: String, derived: Vec<String> },
    RotationOrder { relation: String },
    RotationNotBijective,
    NoRightIdentity { relation: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConverseNotInvolutive { relation } => {
                write!(f, "converse of converse of {relation} is not {relation}")
            }
            Violation::RightIdentity { relation, found } => {
                write!(f, "comp({relation}, id) = {{{}}}", found.join(" "))
            }
            Violation::LeftIdentity { relation, found } => {
                write!(f, "comp(id, {relation}) = {{{}}}", found.join(" "))
            }
            Violation::ConverseComposition { r, s, t } => write!(
                f,
                "{t} in comp({r}, {s}) disagrees with conv({t}) in comp(conv({s}), conv({r}))"
            ),
            Violation::CycleLaw { r, s, t } => {
                write!(f, "{t} in comp({r}, {s}) disagrees with {s} in comp(conv({r}), {t})")
            }
            Violation::EmptyComposition { r, s } => write!(f, "comp({r}, {s}) is empty"),
            Violation::ConverseNotDerivable { relation, derived } => write!(
                f,
                "converse of {relation} not derivable from composition (identity reached via {{{}}})",
                derived.join(" ")
            ),
            Violation::RotationOrder { relation } => {
                write!(f, "rotating {relation} three times does not return it")
            }
            Violation::RotationNotBijective => write!(f, "rotation is not a permutation"),
            Violation::NoRightIdentity { relation } => {
                write!(f, "no relation s with comp({relation}, s) = {{{relation}}}")
            }
        }
    }
}

/// A binary qualitative calculus over jointly exhaustive, pairwise disjoint
/// base relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calculus {
    name: String,
    symbols: Vec<String>,
    converse: Vec<usize>,
    composition: Vec<ValueSet>,
    identity: usize,
}

impl Calculus {
    /// Checks shapes and indices only; axioms are left to [`Calculus::validate`].
    pub fn new(
        name: impl Into<String>,
        symbols: Vec<String>,
        converse: Vec<usize>,
        composition: Vec<ValueSet>,
        identity: usize,
    ) -> Result<Self, CalculusError> {
        let k = symbols.len();
        check_symbols(&symbols)?;
        if converse.len() != k || converse.iter().any(|&c| c >= k) {
            return Err(CalculusError::Structure("converse table does not cover the relations".into()));
        }
        if composition.len() != k * k || composition.iter().any(|s| !s.is_subset(&ValueSet::full(k))) {
            return Err(CalculusError::Structure("composition table has the wrong shape".into()));
        }
        if identity >= k {
            return Err(CalculusError::Structure("identity is not a base relation".into()));
        }
        Ok(Calculus {
            name: name.into(),
            symbols,
            converse,
            composition,
            identity,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol(&self, r: usize) -> &str {
        &self.symbols[r]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn converse(&self, r: usize) -> usize {
        self.converse[r]
    }

    pub fn compose(&self, r: usize, s: usize) -> ValueSet {
        self.composition[r * self.size() + s]
    }

    pub fn full(&self) -> ValueSet {
        ValueSet::full(self.size())
    }

    /// Converse image of a relation set.
    pub fn converse_set(&self, rs: &ValueSet) -> ValueSet {
        rs.iter().map(|r| self.converse[r]).collect()
    }

    /// Union of `comp(r, s)` over `r ∈ a`, `s ∈ b`.
    pub fn compose_sets(&self, a: &ValueSet, b: &ValueSet) -> ValueSet {
        let mut out = ValueSet::EMPTY;
        for r in a.iter() {
            for s in b.iter() {
                out = out.union(&self.compose(r, s));
            }
        }
        out
    }

    /// The converse table as `(R, conv R)` pairs.
    pub fn converse_pairs(&self) -> Vec<[usize; 2]> {
        (0..self.size()).map(|r| [r, self.converse[r]]).collect()
    }

    /// The composition table as `(R, S, T)` triples with `T ∈ comp(R, S)`.
    pub fn composition_triples(&self) -> Vec<[usize; 3]> {
        let k = self.size();
        let mut out = Vec::new();
        for r in 0..k {
            for s in 0..k {
                out.extend(self.compose(r, s).iter().map(|t| [r, s, t]));
            }
        }
        out
    }

    pub fn names(&self, rs: &ValueSet) -> Vec<String> {
        rs.iter().map(|r| self.symbols[r].clone()).collect()
    }

    /// Checks the relation-algebra axioms the reasoning relies on.
    pub fn validate(&self) -> Vec<Violation> {
        validate_calculus(self)
    }
}

/// Reports every violated axiom of `c`; an empty list means the tables are
/// usable as integrity constraints.
///
/// Checked: converse is an involution; the identity is neutral on both
/// sides; `T ∈ comp(R,S) ⇔ conv T ∈ comp(conv S, conv R)`;
/// `T ∈ comp(R,S) ⇔ S ∈ comp(conv R, T)`; composition is total; and the
/// converse of each `R` is the unique `S` with `id ∈ comp(R,S)`.
pub fn validate_calculus(c: &Calculus) -> Vec<Violation> {
    let k = c.size();
    let id = c.identity;
    let name = |r: usize| c.symbols[r].clone();
    let mut out = Vec::new();

    for r in 0..k {
        if c.converse(c.converse(r)) != r {
            out.push(Violation::ConverseNotInvolutive { relation: name(r) });
        }
    }
    for r in 0..k {
        let right = c.compose(r, id);
        if right != ValueSet::singleton(r) {
            out.push(Violation::RightIdentity {
                relation: name(r),
                found: c.names(&right),
            });
        }
        let left = c.compose(id, r);
        if left != ValueSet::singleton(r) {
            out.push(Violation::LeftIdentity {
                relation: name(r),
                found: c.names(&left),
            });
        }
    }
    for r in 0..k {
        for s in 0..k {
            let rs = c.compose(r, s);
            if rs.is_empty() {
                out.push(Violation::EmptyComposition { r: name(r), s: name(s) });
            }
            for t in 0..k {
                let here = rs.contains(t);
                let there = c.compose(c.converse(s), c.converse(r)).contains(c.converse(t));
                if here != there {
                    out.push(Violation::ConverseComposition {
                        r: name(r),
                        s: name(s),
                        t: name(t),
                    });
                }
                if here != c.compose(c.converse(r), t).contains(s) {
                    out.push(Violation::CycleLaw {
                        r: name(r),
                        s: name(s),
                        t: name(t),
                    });
                }
            }
        }
    }
    for r in 0..k {
        let derived: ValueSet = (0..k).filter(|&s| c.compose(r, s).contains(id)).collect();
        if derived != ValueSet::singleton(c.converse(r)) {
            out.push(Violation::ConverseNotDerivable {
                relation: name(r),
                derived: c.names(&derived),
            });
        }
    }
    out
}

/// A calculus of ternary relations (cyclic orientations of triples).
///
/// Composition relates `(R[a,b,c], R[a,c,d], R[a,b,d])`; converse maps
/// `R[a,b,c]` to `R[a,c,b]`; rotation maps `R[a,b,c]` to `R[c,a,b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryCalculus {
    name: String,
    symbols: Vec<String>,
    converse: Vec<usize>,
    rotation: Vec<usize>,
    composition: Vec<ValueSet>,
}

impl TernaryCalculus {
    pub fn new(
        name: impl Into<String>,
        symbols: Vec<String>,
        converse: Vec<usize>,
        rotation: Vec<usize>,
        composition: Vec<ValueSet>,
    ) -> Result<Self, CalculusError> {
        let k = symbols.len();
        check_symbols(&symbols)?;
        if converse.len() != k || converse.iter().any(|&c| c >= k) {
            return Err(CalculusError::Structure("converse table does not cover the relations".into()));
        }
        if rotation.len() != k || rotation.iter().any(|&c| c >= k) {
            return Err(CalculusError::Structure("rotation table does not cover the relations".into()));
        }
        if composition.len() != k * k || composition.iter().any(|s| !s.is_subset(&ValueSet::full(k))) {
            return Err(CalculusError::Structure("composition table has the wrong shape".into()));
        }
        Ok(TernaryCalculus {
            name: name.into(),
            symbols,
            converse,
            rotation,
            composition,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol(&self, r: usize) -> &str {
        &self.symbols[r]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn converse(&self, r: usize) -> usize {
        self.converse[r]
    }

    pub fn rotate(&self, r: usize) -> usize {
        self.rotation[r]
    }

    pub fn compose(&self, r: usize, s: usize) -> ValueSet {
        self.composition[r * self.size() + s]
    }

    pub fn converse_pairs(&self) -> Vec<[usize; 2]> {
        (0..self.size()).map(|r| [r, self.converse[r]]).collect()
    }

    pub fn rotation_pairs(&self) -> Vec<[usize; 2]> {
        (0..self.size()).map(|r| [r, self.rotation[r]]).collect()
    }

    pub fn composition_triples(&self) -> Vec<[usize; 3]> {
        let k = self.size();
        let mut out = Vec::new();
        for r in 0..k {
            for s in 0..k {
                out.extend(self.compose(r, s).iter().map(|t| [r, s, t]));
            }
        }
        out
    }

    /// Ternary counterpart of [`validate_calculus`]: converse involution,
    /// rotation of order three and bijective, composition invariant under
    /// swapping the outer orientations, and a right identity for each
    /// relation.
    pub fn validate(&self) -> Vec<Violation> {
        let k = self.size();
        let name = |r: usize| self.symbols[r].clone();
        let mut out = Vec::new();
        for r in 0..k {
            if self.converse(self.converse(r)) != r {
                out.push(Violation::ConverseNotInvolutive { relation: name(r) });
            }
            if self.rotate(self.rotate(self.rotate(r))) != r {
                out.push(Violation::RotationOrder { relation: name(r) });
            }
        }
        let image: ValueSet = self.rotation.iter().copied().collect();
        if image.len() != k {
            out.push(Violation::RotationNotBijective);
        }
        for r in 0..k {
            for s in 0..k {
                for t in 0..k {
                    let here = self.compose(r, s).contains(t);
                    let there = self
                        .compose(self.converse(s), self.converse(r))
                        .contains(self.converse(t));
                    if here != there {
                        out.push(Violation::ConverseComposition {
                            r: name(r),
                            s: name(s),
                            t: name(t),
                        });
                    }
                }
            }
            if !(0..k).any(|s| self.compose(r, s) == ValueSet::singleton(r)) {
                out.push(Violation::NoRightIdentity { relation: name(r) });
            }
        }
        out
    }
}

fn check_symbols(symbols: &[String]) -> Result<(), CalculusError> {
    if symbols.is_empty() || symbols.len() > MAX_UNIVERSE {
        return Err(CalculusError::Structure(format!(
            "a calculus needs 1..={MAX_UNIVERSE} relations, got {}",
            symbols.len()
        )));
    }
    for (i, s) in symbols.iter().enumerate() {
        if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#' || c == '{' || c == '}') {
            return Err(CalculusError::Structure(format!("bad relation symbol {s:?}")));
        }
        if symbols[..i].contains(s) {
            return Err(CalculusError::Structure(format!("duplicate relation symbol {s}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
