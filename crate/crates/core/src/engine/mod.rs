//! Generic finite-domain constraint store.
//!
//! Variables carry bitset domains ([`FiniteDomain`]) or subset bounds
//! ([`SetDomain`]). Constraints are extensional tables, set membership,
//! set/enum channels and variable-indexed array constraints. Table
//! constraints are made generalised arc consistent by support seeking with
//! residual supports; [`Store::propagate`] runs every scheduled constraint
//! until nothing changes. [`Store::solve`] adds depth-first search with
//! chronological backtracking on top.

mod constraints;
mod domain;
mod search;

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitset::{ValueSet, MAX_UNIVERSE};
use constraints::{ArrayConstraint, Channel, Constraint, Domains, SetMembership, TableConstraint};

pub use constraints::{ArrayCell, Tuples};
pub use domain::{FiniteDomain, SetDomain, MAX_SET_UNIVERSE};
pub use search::{SearchOutcome, Solution, ValueOrder, VarOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetVarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("variable domain is empty")]
    EmptyDomain,
    #[error("universe of {0} values is unsupported")]
    UniverseTooLarge(usize),
    #[error("unknown variable {0}")]
    UnknownVar(usize),
    #[error("unknown set variable {0}")]
    UnknownSetVar(usize),
    #[error("constraint scope is empty")]
    EmptyScope,
    #[error("variable {0} appears twice in one scope")]
    RepeatedVar(usize),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("value {value} outside universe of size {universe}")]
    ValueOutOfRange { value: usize, universe: usize },
    #[error("array dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("invalid set list: {0}")]
    InvalidSets(String),
}

/// Result of running propagation to a fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    Failure,
}

/// Order in which scheduled constraints are revised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueueOrder {
    #[default]
    Fifo,
    /// Pick a uniformly random pending constraint each step.
    Shuffled { seed: u64 },
}

/// A constraint store. Not thread-safe to share mutably; separate stores
/// are independent.
#[derive(Debug, Clone)]
pub struct Store {
    doms: Domains,
    constraints: Vec<Constraint>,
    var_watch: Vec<Vec<usize>>,
    set_watch: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    rng: Option<ChaCha8Rng>,
    failed: bool,
    levels: Vec<usize>,
}

impl Default for Store {
    fn default() -> Self {
        Self::new()
    }
}

impl Store {
    pub fn new() -> Self {
        Store {
            doms: Domains::new(),
            constraints: Vec::new(),
            var_watch: Vec::new(),
            set_watch: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            rng: None,
            failed: false,
            levels: Vec::new(),
        }
    }

    pub fn set_queue_order(&mut self, order: QueueOrder) {
        self.rng = match order {
            QueueOrder::Fifo => None,
            QueueOrder::Shuffled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
    }

    pub fn new_var(&mut self, domain: FiniteDomain) -> Result<VarId, EngineError> {
        if domain.is_empty() {
            return Err(EngineError::EmptyDomain);
        }
        self.doms.vars.push(domain);
        self.var_watch.push(Vec::new());
        Ok(VarId(self.doms.vars.len() - 1))
    }

    pub fn new_set_var(&mut self, domain: SetDomain) -> Result<SetVarId, EngineError> {
        if !domain.is_consistent() {
            return Err(EngineError::EmptyDomain);
        }
        self.doms.sets.push(domain);
        self.set_watch.push(Vec::new());
        Ok(SetVarId(self.doms.sets.len() - 1))
    }

    pub fn num_vars(&self) -> usize {
        self.doms.vars.len()
    }

    pub fn num_set_vars(&self) -> usize {
        self.doms.sets.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn domain(&self, var: VarId) -> &FiniteDomain {
        &self.doms.vars[var.0]
    }

    pub fn set_domain(&self, var: SetVarId) -> &SetDomain {
        &self.doms.sets[var.0]
    }

    pub fn domains(&self) -> &[FiniteDomain] {
        &self.doms.vars
    }

    /// True once some domain has been wiped out.
    pub fn is_failed(&self) -> bool {
        self.failed
    }

    /// Marks the store inconsistent without touching any domain, e.g. for
    /// contradictions detected while building a model.
    pub fn mark_failed(&mut self) {
        self.failed = true;
    }

    /// Intersects the domain of `var` with `keep` and schedules its
    /// constraints. Returns false if the domain became empty.
    pub fn restrict(&mut self, var: VarId, keep: &ValueSet) -> bool {
        self.check_var(var.0).expect("unknown variable");
        let ok = self.doms.restrict(var.0, keep).is_ok();
        self.schedule_changes(None);
        if !ok {
            self.failed = true;
        }
        ok
    }

    /// Posts an extensional constraint; `tuples` may be shared between many
    /// constraints.
    pub fn post_table(&mut self, scope: &[VarId], tuples: Arc<Tuples>) -> Result<ConstraintId, EngineError> {
        if scope.is_empty() {
            return Err(EngineError::EmptyScope);
        }
        let mut ids: Vec<usize> = Vec::with_capacity(scope.len());
        for v in scope {
            self.check_var(v.0)?;
            if ids.contains(&v.0) {
                return Err(EngineError::RepeatedVar(v.0));
            }
            ids.push(v.0);
        }
        let c = TableConstraint::new(ids, tuples, &self.doms.vars)?;
        Ok(self.add(Constraint::Table(c)))
    }

    /// Requires (`required`) or forbids `element` in the set variable.
    pub fn post_set_membership(
        &mut self,
        var: SetVarId,
        element: usize,
        required: bool,
    ) -> Result<ConstraintId, EngineError> {
        self.check_set_var(var.0)?;
        let universe = self.doms.sets[var.0].universe_size();
        if element >= universe {
            return Err(EngineError::ValueOutOfRange { value: element, universe });
        }
        Ok(self.add(Constraint::Membership(SetMembership::new(var.0, element, required))))
    }

    /// Ties `enum_var` (a value index) to `set_var` (its set value) through
    /// the ordered list of admissible sets.
    pub fn channel_set_to_enum(
        &mut self,
        set_var: SetVarId,
        enum_var: VarId,
        valid_sets: Arc<[u16]>,
    ) -> Result<ConstraintId, EngineError> {
        self.check_set_var(set_var.0)?;
        self.check_var(enum_var.0)?;
        let universe = self.doms.sets[set_var.0].universe_size();
        let mask = if universe == 16 { u16::MAX } else { (1u16 << universe) - 1 };
        if valid_sets.iter().any(|&s| s & !mask != 0) {
            return Err(EngineError::InvalidSets("set outside the universe".into()));
        }
        let mut sorted = valid_sets.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != valid_sets.len() {
            return Err(EngineError::InvalidSets("duplicate sets".into()));
        }
        let enum_universe = self.doms.vars[enum_var.0].universe_size();
        if enum_universe != valid_sets.len() {
            return Err(EngineError::ArityMismatch {
                expected: valid_sets.len(),
                found: enum_universe,
            });
        }
        Ok(self.add(Constraint::Channel(Channel::new(set_var.0, enum_var.0, valid_sets))))
    }

    /// `cells[index_vars] ∈ target` for a row-major array of shape `dims`.
    ///
    /// Index values without any admissible cell are pruned, and once every
    /// index is bound the selected cell is intersected with `target`. This is
    /// weaker than GAC on the whole conjunction: cell domains are not pruned
    /// while indices are still open.
    pub fn post_array_constraint(
        &mut self,
        index_vars: &[VarId],
        dims: &[usize],
        cells: Vec<ArrayCell>,
        target: ValueSet,
    ) -> Result<ConstraintId, EngineError> {
        if index_vars.is_empty() {
            return Err(EngineError::EmptyScope);
        }
        if index_vars.len() != dims.len() {
            return Err(EngineError::DimensionMismatch(format!(
                "{} index variables for {} dimensions",
                index_vars.len(),
                dims.len()
            )));
        }
        let size: usize = dims.iter().product();
        if size != cells.len() {
            return Err(EngineError::DimensionMismatch(format!(
                "{} cells for shape {:?}",
                cells.len(),
                dims
            )));
        }
        for (v, &n) in index_vars.iter().zip(dims) {
            self.check_var(v.0)?;
            if let Some(max) = self.doms.vars[v.0].bits().last() {
                if max >= n {
                    return Err(EngineError::DimensionMismatch(format!(
                        "index variable {} may take {} beyond extent {}",
                        v.0, max, n
                    )));
                }
            }
        }
        for cell in &cells {
            if let ArrayCell::Var(v) = cell {
                self.check_var(v.0)?;
            }
        }
        let c = ArrayConstraint::new(index_vars.iter().map(|v| v.0).collect(), dims.to_vec(), cells, target);
        Ok(self.add(Constraint::Array(c)))
    }

    /// Revises scheduled constraints until none can remove a value.
    pub fn propagate(&mut self) -> Propagation {
        if self.failed {
            return Propagation::Failure;
        }
        while let Some(c) = self.pop() {
            self.queued[c] = false;
            let outcome = self.constraints[c].propagate(&mut self.doms);
            self.schedule_changes(Some(c));
            if outcome.is_err() {
                self.failed = true;
                self.clear_queue();
                return Propagation::Failure;
            }
        }
        Propagation::Fixpoint
    }

    /// A tuple of table constraint `c` that supports `value` at scope
    /// position `pos` within the current domains.
    pub fn support_witness(&self, c: ConstraintId, pos: usize, value: usize) -> Option<Vec<usize>> {
        match &self.constraints[c.0] {
            Constraint::Table(t) => t.witness(&self.doms.vars, pos, value),
            _ => None,
        }
    }

    /// Scope of a table constraint.
    pub fn table_scope(&self, c: ConstraintId) -> Option<Vec<VarId>> {
        match &self.constraints[c.0] {
            Constraint::Table(t) => Some(t.scope.iter().map(|&v| VarId(v)).collect()),
            _ => None,
        }
    }

    /// Checks a complete assignment against every posted constraint and the
    /// root domains.
    pub fn is_solution(&self, values: &[usize], sets: &[u16]) -> bool {
        values.len() == self.num_vars()
            && sets.len() == self.num_set_vars()
            && self.constraints.iter().all(|c| c.satisfied(values, sets))
    }

    fn add(&mut self, c: Constraint) -> ConstraintId {
        let id = self.constraints.len();
        for v in c.vars() {
            self.var_watch[v].push(id);
        }
        for s in c.set_vars() {
            self.set_watch[s].push(id);
        }
        self.constraints.push(c);
        self.queued.push(false);
        self.enqueue(id);
        ConstraintId(id)
    }

    fn enqueue(&mut self, c: usize) {
        if !self.queued[c] {
            self.queued[c] = true;
            self.queue.push_back(c);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self.rng.as_mut() {
            None => self.queue.pop_front(),
            Some(rng) if !self.queue.is_empty() => {
                let i = rng.gen_range(0..self.queue.len());
                self.queue.swap_remove_back(i)
            }
            Some(_) => None,
        }
    }

    fn clear_queue(&mut self) {
        for c in self.queue.drain(..) {
            self.queued[c] = false;
        }
    }

    fn schedule_changes(&mut self, source: Option<usize>) {
        let vars = std::mem::take(&mut self.doms.changed_vars);
        let sets = std::mem::take(&mut self.doms.changed_sets);
        for &v in &vars {
            for i in 0..self.var_watch[v].len() {
                let c = self.var_watch[v][i];
                if Some(c) != source {
                    self.enqueue(c);
                }
            }
        }
        for &s in &sets {
            for i in 0..self.set_watch[s].len() {
                let c = self.set_watch[s][i];
                if Some(c) != source {
                    self.enqueue(c);
                }
            }
        }
        self.doms.changed_vars = vars;
        self.doms.changed_vars.clear();
        self.doms.changed_sets = sets;
        self.doms.changed_sets.clear();
    }

    fn check_var(&self, v: usize) -> Result<(), EngineError> {
        if v < self.doms.vars.len() {
            Ok(())
        } else {
            Err(EngineError::UnknownVar(v))
        }
    }

    fn check_set_var(&self, v: usize) -> Result<(), EngineError> {
        if v < self.doms.sets.len() {
            Ok(())
        } else {
            Err(EngineError::UnknownSetVar(v))
        }
    }

    fn push_level(&mut self) {
        self.levels.push(self.doms.trail_len());
        self.doms.depth += 1;
    }

    fn pop_level(&mut self) {
        let mark = self.levels.pop().expect("no open search level");
        self.doms.undo_to(mark);
        self.doms.depth -= 1;
        self.clear_queue();
        self.failed = false;
    }
}

/// Checks a universe size against the widest supported bitset.
pub fn check_universe(n: usize) -> Result<(), EngineError> {
    if n == 0 || n > MAX_UNIVERSE {
        Err(EngineError::UniverseTooLarge(n))
    } else {
        Ok(())
    }
}
