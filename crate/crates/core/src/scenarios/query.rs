use super::network::{ConstraintKind, Network};
use super::ScenarioError;
use crate::bitset::ValueSet;
use crate::engine::{ArrayCell, FiniteDomain};

/// `Rel[x, y] ∈ allowed` where `x`, `y` range over the objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectQuery {
    pub aspect: String,
    /// Object variables indexing the relation array, one per aspect arity.
    pub indices: Vec<String>,
    pub allowed: Vec<String>,
    pub time: usize,
}

impl ObjectQuery {
    pub fn new(aspect: &str, indices: &[&str], allowed: &[&str]) -> Self {
        ObjectQuery {
            aspect: aspect.to_string(),
            indices: indices.iter().map(|s| s.to_string()).collect(),
            allowed: allowed.iter().map(|s| s.to_string()).collect(),
            time: 0,
        }
    }

    pub fn at(mut self, time: usize) -> Self {
        self.time = time;
        self
    }
}

/// Declares object variables over the network's objects and posts one
/// array constraint per query.
///
/// Diagonal cells of a binary aspect hold the identity relation; cells of
/// a ternary aspect with repeated objects hold no relation and so can never
/// be selected.
pub fn post_object_query(
    net: &mut Network,
    object_vars: &[&str],
    queries: &[ObjectQuery],
) -> Result<(), ScenarioError> {
    let n = net.objects.len();
    for &name in object_vars {
        if net.object_vars.contains_key(name) || net.objects.iter().any(|o| o == name) {
            return Err(ScenarioError::DuplicateObjectVar(name.to_string()));
        }
        let v = net.store.new_var(FiniteDomain::full(n))?;
        net.object_vars.insert(name.to_string(), v);
    }

    for q in queries {
        let a = net
            .aspects
            .iter()
            .position(|d| d.name == q.aspect)
            .ok_or_else(|| ScenarioError::UnknownAspect(q.aspect.clone()))?;
        let decl = net.aspects[a].clone();
        if q.indices.len() != decl.arity() {
            return Err(ScenarioError::ArityMismatch {
                aspect: decl.name.clone(),
                expected: decl.arity(),
                found: q.indices.len(),
            });
        }
        if q.time >= net.steps {
            return Err(ScenarioError::TimeOutOfRange {
                step: q.time,
                steps: net.steps,
            });
        }
        let named = q
            .indices
            .iter()
            .map(|name| net.object_vars.get(name).copied().ok_or_else(|| ScenarioError::UnknownObject(name.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        // A repeated variable must select the same object at each of its
        // positions, so the array is laid out over the distinct variables.
        let mut index_vars = Vec::new();
        for v in &named {
            if !index_vars.contains(v) {
                index_vars.push(*v);
            }
        }
        let position: Vec<usize> = named.iter().map(|v| index_vars.iter().position(|w| w == v).unwrap()).collect();
        let target: ValueSet = q
            .allowed
            .iter()
            .map(|s| {
                decl.index_of(s).ok_or_else(|| ScenarioError::UnknownRelation {
                    aspect: decl.name.clone(),
                    symbol: s.clone(),
                })
            })
            .collect::<Result<_, _>>()?;

        let dims = vec![n; index_vars.len()];
        let mut cells = Vec::with_capacity(n.pow(index_vars.len() as u32));
        let mut choice = vec![0; index_vars.len()];
        loop {
            let objs: Vec<usize> = position.iter().map(|&p| choice[p]).collect();
            cells.push(match net.var_at(q.time, a, &objs) {
                Some(v) => ArrayCell::Var(v),
                None => match decl.identity() {
                    Some(id) if objs.iter().all(|&o| o == objs[0]) => ArrayCell::Const(ValueSet::singleton(id)),
                    _ => ArrayCell::Const(ValueSet::EMPTY),
                },
            });
            // row-major odometer
            let mut i = choice.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < n {
                    break;
                }
                choice[i] = 0;
            }
            if choice.iter().all(|&o| o == 0) {
                break;
            }
        }
        net.store.post_array_constraint(&index_vars, &dims, cells, target)?;
        net.bump(ConstraintKind::Query, None);
    }
    Ok(())
}
