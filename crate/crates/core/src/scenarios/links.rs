//! Tables tying aspects together and tying time steps together.

use super::ScenarioError;
use crate::calculi::{derive_size_pa, derive_valid_direction_sets, load_rcc8, DirectionUniverse};

/// One slot of a link table: which positions of the object tuple the
/// related aspect reads, and that aspect's relation symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkSlot {
    /// Positions into the linked object tuple, e.g. `[0, 1]` for `(a, b)`.
    pub shape: Vec<usize>,
    pub symbols: Vec<String>,
}

/// Admissible combinations of relations across aspects for one object tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkTable {
    name: String,
    object_arity: usize,
    slots: Vec<LinkSlot>,
    tuples: Vec<Vec<usize>>,
}

impl LinkTable {
    pub fn new(
        name: impl Into<String>,
        object_arity: usize,
        slots: Vec<LinkSlot>,
        tuples: Vec<Vec<usize>>,
    ) -> Result<Self, ScenarioError> {
        let name = name.into();
        let bad = |message: String| ScenarioError::LinkMismatch {
            table: name.clone(),
            message,
        };
        if object_arity == 0 || slots.is_empty() {
            return Err(bad("a link needs objects and slots".into()));
        }
        for slot in &slots {
            if slot.shape.iter().any(|&p| p >= object_arity) {
                return Err(bad(format!("slot shape {:?} exceeds object arity {object_arity}", slot.shape)));
            }
            if super::has_repeats(&slot.shape) {
                return Err(bad(format!("slot shape {:?} repeats a position", slot.shape)));
            }
        }
        for t in &tuples {
            if t.len() != slots.len() {
                return Err(bad(format!("tuple {t:?} does not fill {} slots", slots.len())));
            }
            if t.iter().zip(&slots).any(|(&v, s)| v >= s.symbols.len()) {
                return Err(bad(format!("tuple {t:?} names a relation outside its slot")));
            }
        }
        Ok(LinkTable {
            name,
            object_arity,
            slots,
            tuples,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_arity(&self) -> usize {
        self.object_arity
    }

    pub fn slots(&self) -> &[LinkSlot] {
        &self.slots
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Symbols of `tuple`, slot by slot.
    pub fn tuple_symbols(&self, tuple: &[usize]) -> Vec<&str> {
        tuple.iter().zip(&self.slots).map(|(&v, s)| s.symbols[v].as_str()).collect()
    }
}

/// RCC-8 against relative size: a proper part is smaller, equal regions
/// have equal size, the remaining relations say nothing about size.
pub fn link_topo_size() -> LinkTable {
    let topo = load_rcc8();
    let size = derive_size_pa();
    let t = |n: &str| topo.index_of(n).unwrap();
    let s = |n: &str| size.index_of(n).unwrap();
    let mut tuples = vec![
        vec![t("TPP"), s("<")],
        vec![t("NTPP"), s("<")],
        vec![t("TPPi"), s(">")],
        vec![t("NTPPi"), s(">")],
        vec![t("EQ"), s("=")],
    ];
    for r in ["DC", "EC", "PO"] {
        for z in ["<", "=", ">"] {
            tuples.push(vec![t(r), s(z)]);
        }
    }
    LinkTable::new(
        "topo_size",
        2,
        vec![
            LinkSlot {
                shape: vec![0, 1],
                symbols: topo.symbols().to_vec(),
            },
            LinkSlot {
                shape: vec![0, 1],
                symbols: size.symbols().to_vec(),
            },
        ],
        tuples,
    )
    .expect("built-in link table is well-formed")
}

/// RCC-8 against direction-tile sets of the first region relative to the
/// second. Regions that are equal or inside the reference lie in its
/// bounding tile only; a region containing the reference covers that tile.
pub fn link_topo_dir() -> LinkTable {
    let topo = load_rcc8();
    let dirs = derive_valid_direction_sets();
    let b = 1u16 << DirectionUniverse::tile("B").unwrap();
    let mut tuples = Vec::new();
    for (r, name) in topo.symbols().iter().enumerate() {
        for (d, &set) in dirs.valid_sets().iter().enumerate() {
            let ok = match name.as_str() {
                "EQ" | "TPP" | "NTPP" => set == b,
                "TPPi" | "NTPPi" => set & b != 0,
                _ => true,
            };
            if ok {
                tuples.push(vec![r, d]);
            }
        }
    }
    LinkTable::new(
        "topo_dir",
        2,
        vec![
            LinkSlot {
                shape: vec![0, 1],
                symbols: topo.symbols().to_vec(),
            },
            LinkSlot {
                shape: vec![0, 1],
                symbols: dirs.symbols(),
            },
        ],
        tuples,
    )
    .expect("built-in link table is well-formed")
}

/// Which relation may follow which between consecutive time steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourTable {
    name: String,
    symbols: Vec<String>,
    pairs: Vec<(usize, usize)>,
}

impl NeighbourTable {
    /// Pairs are kept as given (deduplicated, sorted); no closure is added.
    pub fn new(
        name: impl Into<String>,
        symbols: Vec<String>,
        mut pairs: Vec<(usize, usize)>,
    ) -> Result<Self, ScenarioError> {
        let name = name.into();
        if let Some(p) = pairs.iter().find(|p| p.0 >= symbols.len() || p.1 >= symbols.len()) {
            return Err(ScenarioError::LinkMismatch {
                table: name,
                message: format!("pair {p:?} outside the relation universe"),
            });
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(NeighbourTable { name, symbols, pairs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.pairs.binary_search(&(from, to)).is_ok()
    }
}

/// Continuous transitions between RCC-8 relations, symmetric, and a
/// relation may persist across a step.
pub fn neighbour_rcc8() -> NeighbourTable {
    let topo = load_rcc8();
    let i = |n: &str| topo.index_of(n).unwrap();
    let edges = [
        ("DC", "EC"),
        ("EC", "PO"),
        ("PO", "TPP"),
        ("PO", "TPPi"),
        ("PO", "EQ"),
        ("TPP", "NTPP"),
        ("TPPi", "NTPPi"),
        ("TPP", "EQ"),
        ("TPPi", "EQ"),
    ];
    let mut pairs: Vec<(usize, usize)> = (0..topo.size()).map(|r| (r, r)).collect();
    for (a, b) in edges {
        pairs.push((i(a), i(b)));
        pairs.push((i(b), i(a)));
    }
    NeighbourTable::new("rcc8", topo.symbols().to_vec(), pairs).expect("built-in table is well-formed")
}
