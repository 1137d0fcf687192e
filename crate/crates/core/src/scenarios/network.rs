use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AspectCalculus, AspectDecl, Scenario, ScenarioError};
use crate::bitset::ValueSet;
use crate::engine::{
    FiniteDomain, Propagation, SetDomain, SetVarId, Solution, Store, Tuples, ValueOrder, VarId, VarOrder,
};

/// What a posted constraint encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    Converse,
    Composition,
    Rotation,
    Link,
    Neighbour,
    Channel,
    Query,
}

/// Key of a relation variable: time step, aspect, object tuple.
pub(crate) type RelKey = (usize, usize, Vec<usize>);

/// A scenario compiled into a constraint store.
#[derive(Debug, Clone)]
pub struct Network {
    pub(crate) store: Store,
    pub(crate) objects: Vec<String>,
    pub(crate) aspects: Vec<AspectDecl>,
    pub(crate) steps: usize,
    pub(crate) vars: BTreeMap<RelKey, VarId>,
    pub(crate) set_views: BTreeMap<VarId, SetVarId>,
    pub(crate) object_vars: BTreeMap<String, VarId>,
    pub(crate) counts: BTreeMap<(ConstraintKind, Option<usize>), usize>,
}

/// Relation set of one object tuple under one aspect at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEntry {
    pub aspect: String,
    pub objects: Vec<String>,
    pub time: usize,
    pub values: ValueSet,
    pub relations: Vec<String>,
}

/// Relation sets of every relation variable, plus candidate objects of
/// every object variable. Atomic when every set is a singleton.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationReport {
    pub entries: Vec<RelationEntry>,
    pub object_vars: Vec<(String, Vec<String>)>,
}

pub type AtomicScenario = RelationReport;

impl RelationReport {
    pub fn get(&self, aspect: &str, objects: &[&str], time: usize) -> Option<&RelationEntry> {
        self.entries
            .iter()
            .find(|e| e.aspect == aspect && e.time == time && e.objects.iter().map(String::as_str).eq(objects.iter().copied()))
    }

    pub fn is_atomic(&self) -> bool {
        self.entries.iter().all(|e| e.values.len() == 1) && self.object_vars.iter().all(|(_, c)| c.len() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Inconsistent,
    Fixpoint(RelationReport),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Inconsistent,
    Consistent(AtomicScenario),
}

/// Ordered tuples of `k` distinct objects out of `n`, lexicographic.
pub(crate) fn ordered_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for o in 0..n {
            if !cur.contains(&o) {
                cur.push(o);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn tuples<const K: usize>(rows: Vec<[usize; K]>) -> Arc<Tuples> {
    Arc::new(Tuples::new(K, rows).expect("calculus tables are within their universe"))
}

/// Compiles `scenario` into relation variables and constraints.
///
/// Domains start as the intersection of all applicable restrictions; an
/// empty intersection leaves the network failed rather than erroring.
pub fn build(scenario: &Scenario) -> Result<Network, ScenarioError> {
    let n = scenario.objects().len();
    let steps = scenario.steps();
    let mut net = Network {
        store: Store::new(),
        objects: scenario.objects().to_vec(),
        aspects: scenario.aspects().to_vec(),
        steps,
        vars: BTreeMap::new(),
        set_views: BTreeMap::new(),
        object_vars: BTreeMap::new(),
        counts: BTreeMap::new(),
    };

    // Fold restrictions into per-variable domains; diagonals only need the
    // identity to survive.
    let mut initial: BTreeMap<RelKey, ValueSet> = BTreeMap::new();
    let mut diagonal_conflict = false;
    for r in scenario.restrictions() {
        let decl = &net.aspects[r.aspect];
        let times: Vec<usize> = match r.time {
            Some(t) => vec![t],
            None => (0..steps).collect(),
        };
        if super::has_repeats(&r.objects) {
            let id = decl.identity().expect("restriction was validated");
            diagonal_conflict |= !r.allowed.contains(id);
            continue;
        }
        for t in times {
            let full = ValueSet::full(decl.universe_size());
            let d = initial.entry((t, r.aspect, r.objects.clone())).or_insert(full);
            *d = d.intersection(&r.allowed);
        }
    }

    for t in 0..steps {
        for a in 0..net.aspects.len() {
            net.add_aspect(t, a, n, &initial)?;
        }
    }
    if diagonal_conflict {
        net.store.mark_failed();
    }

    for decl in scenario.links() {
        let table = &decl.table;
        let rows = Arc::new(Tuples::new(table.slots().len(), table.tuples())?);
        for t in 0..steps {
            for objs in ordered_tuples(n, table.object_arity()) {
                let scope: Vec<VarId> = table
                    .slots()
                    .iter()
                    .zip(&decl.aspects)
                    .map(|(slot, &a)| net.vars[&(t, a, slot.shape.iter().map(|&p| objs[p]).collect())])
                    .collect();
                net.post(&scope, rows.clone(), ConstraintKind::Link, None)?;
            }
        }
    }

    for decl in scenario.neighbours() {
        let pairs: Vec<[usize; 2]> = decl.table.pairs().iter().map(|&(a, b)| [a, b]).collect();
        let rows = tuples(pairs);
        for t in 1..steps {
            let keys: Vec<Vec<usize>> =
                net.vars.keys().filter(|k| k.0 == t && k.1 == decl.aspect).map(|k| k.2.clone()).collect();
            for objs in keys {
                let before = net.vars[&(t - 1, decl.aspect, objs.clone())];
                let after = net.vars[&(t, decl.aspect, objs)];
                net.post(&[before, after], rows.clone(), ConstraintKind::Neighbour, Some(decl.aspect))?;
            }
        }
    }
    Ok(net)
}

impl Network {
    fn add_aspect(
        &mut self,
        t: usize,
        a: usize,
        n: usize,
        initial: &BTreeMap<RelKey, ValueSet>,
    ) -> Result<(), ScenarioError> {
        let decl = self.aspects[a].clone();
        let k = decl.universe_size();
        let tile_sets: Option<Arc<[u16]>> = if decl.set_valued { Some(decl.tile_sets()?.into()) } else { None };
        for objs in ordered_tuples(n, decl.arity()) {
            let key = (t, a, objs);
            let var = self.store.new_var(FiniteDomain::full(k))?;
            if let Some(d) = initial.get(&key) {
                self.store.restrict(var, d);
            }
            if let Some(sets) = &tile_sets {
                let view = self.store.new_set_var(SetDomain::new(9))?;
                self.store.channel_set_to_enum(view, var, sets.clone())?;
                self.bump(ConstraintKind::Channel, Some(a));
                self.set_views.insert(var, view);
            }
            self.vars.insert(key, var);
        }

        let v = |net: &Self, objs: &[usize]| net.vars[&(t, a, objs.to_vec())];
        match &decl.calculus {
            AspectCalculus::Binary(c) => {
                let conv = tuples(c.converse_pairs());
                let comp = tuples(c.composition_triples());
                for x in 0..n {
                    for y in x + 1..n {
                        let scope = [v(self, &[x, y]), v(self, &[y, x])];
                        self.post(&scope, conv.clone(), ConstraintKind::Converse, Some(a))?;
                    }
                }
                for x in 0..n {
                    for y in x + 1..n {
                        for z in y + 1..n {
                            let scope = [v(self, &[x, y]), v(self, &[y, z]), v(self, &[x, z])];
                            self.post(&scope, comp.clone(), ConstraintKind::Composition, Some(a))?;
                        }
                    }
                }
            }
            AspectCalculus::Ternary(c) => {
                let conv = tuples(c.converse_pairs());
                let rot = tuples(c.rotation_pairs());
                let comp = tuples(c.composition_triples());
                for objs in ordered_tuples(n, 3) {
                    let [x, y, z] = [objs[0], objs[1], objs[2]];
                    if y < z {
                        let scope = [v(self, &[x, y, z]), v(self, &[x, z, y])];
                        self.post(&scope, conv.clone(), ConstraintKind::Converse, Some(a))?;
                    }
                    let scope = [v(self, &[x, y, z]), v(self, &[z, x, y])];
                    self.post(&scope, rot.clone(), ConstraintKind::Rotation, Some(a))?;
                }
                for objs in ordered_tuples(n, 4) {
                    let [w, x, y, z] = [objs[0], objs[1], objs[2], objs[3]];
                    let scope = [v(self, &[w, x, y]), v(self, &[w, y, z]), v(self, &[w, x, z])];
                    self.post(&scope, comp.clone(), ConstraintKind::Composition, Some(a))?;
                }
            }
            AspectCalculus::Universe(_) => {}
        }
        Ok(())
    }

    pub(crate) fn post(
        &mut self,
        scope: &[VarId],
        rows: Arc<Tuples>,
        kind: ConstraintKind,
        aspect: Option<usize>,
    ) -> Result<(), ScenarioError> {
        self.store.post_table(scope, rows)?;
        self.bump(kind, aspect);
        Ok(())
    }

    pub(crate) fn bump(&mut self, kind: ConstraintKind, aspect: Option<usize>) {
        *self.counts.entry((kind, aspect)).or_default() += 1;
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn aspects(&self) -> &[AspectDecl] {
        &self.aspects
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn aspect_index(&self, name: &str) -> Result<usize, ScenarioError> {
        self.aspects
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ScenarioError::UnknownAspect(name.to_string()))
    }

    fn object_index(&self, name: &str) -> Result<usize, ScenarioError> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| ScenarioError::UnknownObject(name.to_string()))
    }

    /// The relation variable for `aspect` over `objects` at step `time`;
    /// `None` for diagonal or degenerate tuples.
    pub fn var(&self, aspect: &str, objects: &[&str], time: usize) -> Result<Option<VarId>, ScenarioError> {
        let a = self.aspect_index(aspect)?;
        let objs = objects.iter().map(|o| self.object_index(o)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.vars.get(&(time, a, objs)).copied())
    }

    pub(crate) fn var_at(&self, time: usize, aspect: usize, objects: &[usize]) -> Option<VarId> {
        self.vars.get(&(time, aspect, objects.to_vec())).copied()
    }

    /// The subset-bounds view of a set-valued relation variable.
    pub fn set_view(&self, var: VarId) -> Option<SetVarId> {
        self.set_views.get(&var).copied()
    }

    pub fn object_var(&self, name: &str) -> Option<VarId> {
        self.object_vars.get(name).copied()
    }

    pub fn num_relation_vars(&self) -> usize {
        self.vars.len()
    }

    /// Number of constraints of `kind` posted for `aspect` (over all steps);
    /// `None` counts constraints not tied to one aspect.
    pub fn count(&self, kind: ConstraintKind, aspect: Option<&str>) -> usize {
        let a = match aspect {
            Some(name) => match self.aspect_index(name) {
                Ok(a) => Some(a),
                Err(_) => return 0,
            },
            None => None,
        };
        self.counts.get(&(kind, a)).copied().unwrap_or(0)
    }

    /// Total number of constraints of `kind`.
    pub fn count_kind(&self, kind: ConstraintKind) -> usize {
        self.counts.iter().filter(|((k, _), _)| *k == kind).map(|(_, c)| c).sum()
    }

    fn report_with(&self, domain: impl Fn(VarId) -> ValueSet) -> RelationReport {
        let entries = self
            .vars
            .iter()
            .map(|((t, a, objs), &v)| {
                let decl = &self.aspects[*a];
                let values = domain(v);
                RelationEntry {
                    aspect: decl.name.clone(),
                    objects: objs.iter().map(|&o| self.objects[o].clone()).collect(),
                    time: *t,
                    relations: values.iter().map(|r| decl.symbols()[r].clone()).collect(),
                    values,
                }
            })
            .collect();
        let object_vars = self
            .object_vars
            .iter()
            .map(|(name, &v)| (name.clone(), domain(v).iter().map(|o| self.objects[o].clone()).collect()))
            .collect();
        RelationReport { entries, object_vars }
    }

    /// Current domains of all relation and object variables.
    pub fn report(&self) -> RelationReport {
        self.report_with(|v| *self.store.domain(v).bits())
    }

    fn solution_report(&self, s: &Solution) -> AtomicScenario {
        self.report_with(|v| ValueSet::singleton(s.value(v)))
    }

    /// Propagates to the GAC fixpoint.
    pub fn check(&mut self) -> CheckOutcome {
        match self.store.propagate() {
            Propagation::Failure => CheckOutcome::Inconsistent,
            Propagation::Fixpoint => CheckOutcome::Fixpoint(self.report()),
        }
    }

    /// Searches for one atomic refinement.
    pub fn decide(&mut self) -> Decision {
        let mut found = None;
        self.decide_all(|s| {
            found = Some(s.clone());
            false
        });
        match found {
            Some(s) => Decision::Consistent(s),
            None => Decision::Inconsistent,
        }
    }

    /// Enumerates atomic refinements until `on_scenario` returns false;
    /// returns how many were reported.
    pub fn decide_all(&mut self, mut on_scenario: impl FnMut(&AtomicScenario) -> bool) -> usize {
        let mut store = std::mem::take(&mut self.store);
        let count = store.solve_all(VarOrder::SmallestDomain, ValueOrder::Ascending, |s| {
            on_scenario(&self.solution_report(s))
        });
        self.store = store;
        count
    }
}

/// Builds and propagates `scenario`.
pub fn check(scenario: &Scenario) -> Result<CheckOutcome, ScenarioError> {
    Ok(build(scenario)?.check())
}

/// Builds `scenario` and searches for an atomic refinement.
pub fn decide(scenario: &Scenario) -> Result<Decision, ScenarioError> {
    Ok(build(scenario)?.decide())
}

/// Builds `scenario` and enumerates its atomic refinements.
pub fn decide_all(
    scenario: &Scenario,
    on_scenario: impl FnMut(&AtomicScenario) -> bool,
) -> Result<usize, ScenarioError> {
    Ok(build(scenario)?.decide_all(on_scenario))
}
