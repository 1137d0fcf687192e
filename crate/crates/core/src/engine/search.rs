use std::ops::ControlFlow;

use super::{Propagation, SetVarId, Store, VarId};
use crate::bitset::ValueSet;

/// Variable selection heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarOrder {
    /// Smallest domain first, ties broken by variable id.
    #[default]
    SmallestDomain,
    /// First unbound variable by id.
    InputOrder,
}

/// Value selection heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueOrder {
    #[default]
    Ascending,
    Descending,
}

/// One value per variable and one set per set variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub values: Vec<usize>,
    pub sets: Vec<u16>,
}

impl Solution {
    pub fn value(&self, v: VarId) -> usize {
        self.values[v.0]
    }

    pub fn set(&self, v: SetVarId) -> u16 {
        self.sets[v.0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Solution(Solution),
    Unsat,
}

enum Branch {
    Var(usize),
    Set(usize, usize),
}

impl Store {
    /// First solution under the given orders, or `Unsat` after exhausting
    /// the search tree. Domains are restored to their pre-search state.
    pub fn solve(&mut self, var_order: VarOrder, value_order: ValueOrder) -> SearchOutcome {
        let mut found = None;
        self.solve_all(var_order, value_order, |s| {
            found = Some(s.clone());
            false
        });
        match found {
            Some(s) => SearchOutcome::Solution(s),
            None => SearchOutcome::Unsat,
        }
    }

    /// Enumerates solutions, calling `on_solution` for each until it returns
    /// false. Returns the number of solutions reported.
    pub fn solve_all<F>(&mut self, var_order: VarOrder, value_order: ValueOrder, mut on_solution: F) -> usize
    where
        F: FnMut(&Solution) -> bool,
    {
        if self.propagate() == Propagation::Failure {
            return 0;
        }
        let mut count = 0;
        let _ = self.dfs(var_order, value_order, &mut |s: &Solution| {
            count += 1;
            on_solution(s)
        });
        count
    }

    fn dfs(
        &mut self,
        var_order: VarOrder,
        value_order: ValueOrder,
        on_solution: &mut dyn FnMut(&Solution) -> bool,
    ) -> ControlFlow<()> {
        match self.select(var_order) {
            None => {
                let solution = Solution {
                    values: self.doms.vars.iter().map(|d| d.value().unwrap()).collect(),
                    sets: self.doms.sets.iter().map(|d| d.lower()).collect(),
                };
                if on_solution(&solution) {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            }
            Some(Branch::Var(v)) => {
                let mut values: Vec<usize> = self.doms.vars[v].iter().collect();
                if value_order == ValueOrder::Descending {
                    values.reverse();
                }
                for value in values {
                    self.push_level();
                    let ok = self.restrict(VarId(v), &ValueSet::singleton(value));
                    let flow = if ok && self.propagate() == Propagation::Fixpoint {
                        self.dfs(var_order, value_order, on_solution)
                    } else {
                        ControlFlow::Continue(())
                    };
                    self.pop_level();
                    flow?;
                }
                ControlFlow::Continue(())
            }
            Some(Branch::Set(s, element)) => {
                let bit = 1u16 << element;
                for include in [true, false] {
                    self.push_level();
                    let (lower, upper) = if include { (bit, u16::MAX) } else { (0, !bit) };
                    let ok = self.doms.tighten_set(s, lower, upper).is_ok();
                    self.schedule_changes(None);
                    let flow = if ok && self.propagate() == Propagation::Fixpoint {
                        self.dfs(var_order, value_order, on_solution)
                    } else {
                        ControlFlow::Continue(())
                    };
                    self.pop_level();
                    flow?;
                }
                ControlFlow::Continue(())
            }
        }
    }

    fn select(&self, var_order: VarOrder) -> Option<Branch> {
        let open = self.doms.vars.iter().enumerate().filter(|(_, d)| d.len() > 1);
        let var = match var_order {
            VarOrder::SmallestDomain => open.min_by_key(|(i, d)| (d.len(), *i)).map(|(i, _)| i),
            VarOrder::InputOrder => open.map(|(i, _)| i).next(),
        };
        if let Some(v) = var {
            return Some(Branch::Var(v));
        }
        self.doms.sets.iter().enumerate().find_map(|(i, d)| {
            let open = d.upper() & !d.lower();
            (open != 0).then(|| Branch::Set(i, open.trailing_zeros() as usize))
        })
    }
}
