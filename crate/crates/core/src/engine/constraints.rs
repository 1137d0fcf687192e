//! Propagators for the constraint kinds the store understands.

use std::sync::Arc;

use super::domain::{FiniteDomain, SetDomain};
use super::EngineError;
use crate::bitset::ValueSet;

/// Marker for a wiped-out domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Failure;

#[derive(Debug, Clone, Copy)]
enum Saved {
    Var(usize, FiniteDomain),
    Set(usize, SetDomain),
}

/// Variable domains plus the undo trail. Propagators only ever shrink
/// domains through the methods here, so every change is trailed.
#[derive(Debug, Clone)]
pub(crate) struct Domains {
    pub(crate) vars: Vec<FiniteDomain>,
    pub(crate) sets: Vec<SetDomain>,
    trail: Vec<Saved>,
    pub(crate) depth: usize,
    pub(crate) changed_vars: Vec<usize>,
    pub(crate) changed_sets: Vec<usize>,
}

impl Domains {
    pub(crate) fn new() -> Self {
        Domains {
            vars: Vec::new(),
            sets: Vec::new(),
            trail: Vec::new(),
            depth: 0,
            changed_vars: Vec::new(),
            changed_sets: Vec::new(),
        }
    }

    /// Keeps only `keep` in the domain of `var`.
    pub(crate) fn restrict(&mut self, var: usize, keep: &ValueSet) -> Result<bool, Failure> {
        let old = self.vars[var];
        let mut next = old;
        if !next.intersect_with(keep) {
            return Ok(false);
        }
        if self.depth > 0 {
            self.trail.push(Saved::Var(var, old));
        }
        self.vars[var] = next;
        self.changed_vars.push(var);
        if next.is_empty() {
            Err(Failure)
        } else {
            Ok(true)
        }
    }

    pub(crate) fn tighten_set(&mut self, set: usize, lower: u16, upper: u16) -> Result<bool, Failure> {
        let old = self.sets[set];
        let mut next = old;
        if !next.tighten(lower, upper) {
            return Ok(false);
        }
        if self.depth > 0 {
            self.trail.push(Saved::Set(set, old));
        }
        self.sets[set] = next;
        self.changed_sets.push(set);
        if next.is_consistent() {
            Ok(true)
        } else {
            Err(Failure)
        }
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Saved::Var(v, d) => self.vars[v] = d,
                Saved::Set(s, d) => self.sets[s] = d,
            }
        }
    }
}

const NO_SUPPORT: u32 = u32::MAX;

/// An extensional relation: the allowed tuples of a table constraint.
///
/// Tuples are deduplicated and indexed by `(position, value)` so that
/// support search only scans tuples that can support the value.
#[derive(Debug, Clone)]
pub struct Tuples {
    arity: usize,
    flat: Vec<u16>,
    by_value: Vec<Vec<Vec<u32>>>,
}

impl Tuples {
    pub fn new<I, T>(arity: usize, tuples: I) -> Result<Self, EngineError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        if arity == 0 {
            return Err(EngineError::EmptyScope);
        }
        let mut rows: Vec<Vec<u16>> = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(EngineError::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            let mut row = Vec::with_capacity(arity);
            for &v in t {
                if v > u16::MAX as usize {
                    return Err(EngineError::ValueOutOfRange { value: v, universe: u16::MAX as usize });
                }
                row.push(v as u16);
            }
            rows.push(row);
        }
        rows.sort_unstable();
        rows.dedup();

        let mut by_value: Vec<Vec<Vec<u32>>> = vec![Vec::new(); arity];
        for (i, row) in rows.iter().enumerate() {
            for (p, &v) in row.iter().enumerate() {
                let slot = &mut by_value[p];
                if slot.len() <= v as usize {
                    slot.resize(v as usize + 1, Vec::new());
                }
                slot[v as usize].push(i as u32);
            }
        }
        Ok(Tuples {
            arity,
            flat: rows.concat(),
            by_value,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u16] {
        &self.flat[i * self.arity..(i + 1) * self.arity]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> + '_ {
        self.flat.chunks_exact(self.arity)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        let Some(first) = tuple.first() else {
            return false;
        };
        self.candidates(0, *first)
            .iter()
            .any(|&i| self.get(i as usize).iter().zip(tuple).all(|(&a, &b)| a as usize == b))
    }

    /// Largest value in column `p`, if any.
    fn column_max(&self, p: usize) -> Option<usize> {
        self.by_value[p]
            .iter()
            .rposition(|l| !l.is_empty())
    }

    fn candidates(&self, p: usize, v: usize) -> &[u32] {
        self.by_value[p].get(v).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TableConstraint {
    pub(crate) scope: Vec<usize>,
    pub(crate) tuples: Arc<Tuples>,
    residues: Vec<u32>,
    stride: usize,
}

impl TableConstraint {
    pub(crate) fn new(scope: Vec<usize>, tuples: Arc<Tuples>, vars: &[FiniteDomain]) -> Result<Self, EngineError> {
        if scope.len() != tuples.arity() {
            return Err(EngineError::ArityMismatch {
                expected: scope.len(),
                found: tuples.arity(),
            });
        }
        let mut stride = 0;
        for (p, &v) in scope.iter().enumerate() {
            let universe = vars[v].universe_size();
            if let Some(max) = tuples.column_max(p) {
                if max >= universe {
                    return Err(EngineError::ValueOutOfRange { value: max, universe });
                }
            }
            stride = stride.max(universe);
        }
        Ok(TableConstraint {
            residues: vec![NO_SUPPORT; stride * scope.len()],
            scope,
            tuples,
            stride,
        })
    }

    fn tuple_alive(&self, vars: &[FiniteDomain], t: u32) -> bool {
        self.tuples
            .get(t as usize)
            .iter()
            .zip(&self.scope)
            .all(|(&v, &x)| vars[x].contains(v as usize))
    }

    fn seek_support(&mut self, vars: &[FiniteDomain], p: usize, v: usize) -> bool {
        let slot = p * self.stride + v;
        let residue = self.residues[slot];
        if residue != NO_SUPPORT && self.tuple_alive(vars, residue) {
            return true;
        }
        for &t in self.tuples.candidates(p, v) {
            if self.tuple_alive(vars, t) {
                self.residues[slot] = t;
                return true;
            }
        }
        false
    }

    pub(crate) fn propagate(&mut self, d: &mut Domains) -> Result<(), Failure> {
        loop {
            let mut changed = false;
            for p in 0..self.scope.len() {
                let x = self.scope[p];
                let mut keep = ValueSet::EMPTY;
                for v in d.vars[x].iter() {
                    if self.seek_support(&d.vars, p, v) {
                        keep.insert(v);
                    }
                }
                changed |= d.restrict(x, &keep)?;
            }
            if !changed {
                return Ok(());
            }
        }
    }

    pub(crate) fn witness(&self, vars: &[FiniteDomain], p: usize, v: usize) -> Option<Vec<usize>> {
        self.tuples
            .candidates(p, v)
            .iter()
            .find(|&&t| self.tuple_alive(vars, t))
            .map(|&t| self.tuples.get(t as usize).iter().map(|&x| x as usize).collect())
    }

    fn satisfied(&self, values: &[usize]) -> bool {
        let t: Vec<usize> = self.scope.iter().map(|&x| values[x]).collect();
        self.tuples.contains(&t)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SetMembership {
    pub(crate) var: usize,
    bit: u16,
    required: bool,
}

impl SetMembership {
    pub(crate) fn new(var: usize, element: usize, required: bool) -> Self {
        SetMembership {
            var,
            bit: 1 << element,
            required,
        }
    }

    fn propagate(&self, d: &mut Domains) -> Result<(), Failure> {
        if self.required {
            d.tighten_set(self.var, self.bit, u16::MAX)?;
        } else {
            d.tighten_set(self.var, 0, !self.bit)?;
        }
        Ok(())
    }

    fn satisfied(&self, set: u16) -> bool {
        (set & self.bit != 0) == self.required
    }
}

/// `enum_var = i` iff `set_var = valid_sets[i]`.
#[derive(Debug, Clone)]
pub(crate) struct Channel {
    pub(crate) set_var: usize,
    pub(crate) enum_var: usize,
    valid_sets: Arc<[u16]>,
}

impl Channel {
    pub(crate) fn new(set_var: usize, enum_var: usize, valid_sets: Arc<[u16]>) -> Self {
        Channel {
            set_var,
            enum_var,
            valid_sets,
        }
    }

    fn propagate(&self, d: &mut Domains) -> Result<(), Failure> {
        let bounds = d.sets[self.set_var];
        let mut keep = ValueSet::EMPTY;
        let mut meet = u16::MAX;
        let mut join = 0u16;
        for i in d.vars[self.enum_var].iter() {
            let s = self.valid_sets[i];
            if bounds.admits(s) {
                keep.insert(i);
                meet &= s;
                join |= s;
            }
        }
        d.restrict(self.enum_var, &keep)?;
        d.tighten_set(self.set_var, meet, join)?;
        Ok(())
    }

    fn satisfied(&self, values: &[usize], sets: &[u16]) -> bool {
        self.valid_sets[values[self.enum_var]] == sets[self.set_var]
    }
}

/// One cell of an array constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayCell {
    /// A relation variable.
    Var(super::VarId),
    /// A fixed relation set, e.g. the identity on the array diagonal.
    Const(ValueSet),
}

/// `cells[index_vars] ∈ target`, cells laid out row-major over `dims`.
#[derive(Debug, Clone)]
pub(crate) struct ArrayConstraint {
    pub(crate) index_vars: Vec<usize>,
    dims: Vec<usize>,
    pub(crate) cells: Vec<ArrayCell>,
    target: ValueSet,
}

impl ArrayConstraint {
    pub(crate) fn new(index_vars: Vec<usize>, dims: Vec<usize>, cells: Vec<ArrayCell>, target: ValueSet) -> Self {
        ArrayConstraint {
            index_vars,
            dims,
            cells,
            target,
        }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    fn cell_admits(&self, vars: &[FiniteDomain], cell: ArrayCell) -> bool {
        match cell {
            ArrayCell::Var(v) => vars[v.0].bits().intersects(&self.target),
            ArrayCell::Const(s) => s.intersects(&self.target),
        }
    }

    fn propagate(&self, d: &mut Domains) -> Result<(), Failure> {
        let k = self.index_vars.len();
        let choices: Vec<Vec<usize>> = self.index_vars.iter().map(|&x| d.vars[x].iter().collect()).collect();
        let mut supported = vec![ValueSet::EMPTY; k];
        let mut pick = vec![0usize; k];
        let mut idx = vec![0usize; k];
        'outer: loop {
            for p in 0..k {
                idx[p] = choices[p][pick[p]];
            }
            if self.cell_admits(&d.vars, self.cells[self.offset(&idx)]) {
                for p in 0..k {
                    supported[p].insert(idx[p]);
                }
            }
            // odometer over the cartesian product of index domains
            let mut p = k;
            while p > 0 {
                p -= 1;
                pick[p] += 1;
                if pick[p] < choices[p].len() {
                    continue 'outer;
                }
                pick[p] = 0;
            }
            break;
        }
        for (&x, set) in self.index_vars.iter().zip(&supported) {
            d.restrict(x, set)?;
        }
        let bound: Option<Vec<usize>> = self.index_vars.iter().map(|&x| d.vars[x].value()).collect();
        if let Some(idx) = bound {
            if let ArrayCell::Var(v) = self.cells[self.offset(&idx)] {
                d.restrict(v.0, &self.target)?;
            }
        }
        Ok(())
    }

    fn satisfied(&self, values: &[usize]) -> bool {
        let idx: Vec<usize> = self.index_vars.iter().map(|&x| values[x]).collect();
        match self.cells[self.offset(&idx)] {
            ArrayCell::Var(v) => self.target.contains(values[v.0]),
            ArrayCell::Const(s) => s.intersects(&self.target),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Constraint {
    Table(TableConstraint),
    Membership(SetMembership),
    Channel(Channel),
    Array(ArrayConstraint),
}

impl Constraint {
    pub(crate) fn propagate(&mut self, d: &mut Domains) -> Result<(), Failure> {
        match self {
            Constraint::Table(c) => c.propagate(d),
            Constraint::Membership(c) => c.propagate(d),
            Constraint::Channel(c) => c.propagate(d),
            Constraint::Array(c) => c.propagate(d),
        }
    }

    pub(crate) fn vars(&self) -> Vec<usize> {
        match self {
            Constraint::Table(c) => c.scope.clone(),
            Constraint::Membership(_) => Vec::new(),
            Constraint::Channel(c) => vec![c.enum_var],
            Constraint::Array(c) => {
                let mut vs = c.index_vars.clone();
                vs.extend(c.cells.iter().filter_map(|cell| match cell {
                    ArrayCell::Var(v) => Some(v.0),
                    ArrayCell::Const(_) => None,
                }));
                vs.sort_unstable();
                vs.dedup();
                vs
            }
        }
    }

    pub(crate) fn set_vars(&self) -> Vec<usize> {
        match self {
            Constraint::Membership(c) => vec![c.var],
            Constraint::Channel(c) => vec![c.set_var],
            _ => Vec::new(),
        }
    }

    pub(crate) fn satisfied(&self, values: &[usize], sets: &[u16]) -> bool {
        match self {
            Constraint::Table(c) => c.satisfied(values),
            Constraint::Membership(c) => c.satisfied(sets[c.var]),
            Constraint::Channel(c) => c.satisfied(values, sets),
            Constraint::Array(c) => c.satisfied(values),
        }
    }
}
