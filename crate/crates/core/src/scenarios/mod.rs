//! Qualitative scenarios and their relation-variable networks.
//!
//! A [`Scenario`] names objects, declares aspects (each backed by a
//! calculus), restricts relations of object tuples, links aspects and
//! optionally unrolls over discrete time steps. [`build`] turns it into a
//! constraint [`Network`] with one relation variable per object tuple,
//! aspect and step; [`check`] propagates it, [`decide`] searches it.

mod links;
mod network;
mod query;

use std::sync::Arc;

use thiserror::Error;

use crate::bitset::ValueSet;
use crate::calculi::{derive_valid_direction_sets, Calculus, DirectionUniverse, TernaryCalculus};
use crate::engine::EngineError;

pub use links::{link_topo_dir, link_topo_size, neighbour_rcc8, LinkSlot, LinkTable, NeighbourTable};
pub use network::{
    build, check, decide, decide_all, AtomicScenario, CheckOutcome, ConstraintKind, Decision, Network, RelationEntry,
    RelationReport,
};
pub use query::{post_object_query, ObjectQuery};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario declares no objects")]
    NoObjects,
    #[error("object `{0}` declared twice")]
    DuplicateObject(String),
    #[error("aspect `{0}` declared twice")]
    DuplicateAspect(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown aspect `{0}`")]
    UnknownAspect(String),
    #[error("`{symbol}` is not a relation of aspect `{aspect}`")]
    UnknownRelation { aspect: String, symbol: String },
    #[error("empty relation set for aspect `{0}`")]
    EmptyRestriction(String),
    #[error("aspect `{aspect}` relates {expected} objects, got {found}")]
    ArityMismatch { aspect: String, expected: usize, found: usize },
    #[error("aspect `{0}` has no variables for tuples with repeated objects")]
    RepeatedObjects(String),
    #[error("time step {step} outside 0..{steps}")]
    TimeOutOfRange { step: usize, steps: usize },
    #[error("time steps must be positive")]
    NoTimeSteps,
    #[error("link `{table}`: {message}")]
    LinkMismatch { table: String, message: String },
    #[error("aspect `{aspect}`: {message}")]
    BadAspect { aspect: String, message: String },
    #[error("object variable `{0}` already names an object or variable")]
    DuplicateObjectVar(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Relation symbols without converse or composition tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationUniverse {
    pub name: String,
    pub symbols: Vec<String>,
}

/// The calculus behind an aspect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AspectCalculus {
    Binary(Arc<Calculus>),
    Ternary(Arc<TernaryCalculus>),
    Universe(Arc<RelationUniverse>),
}

/// One aspect of space (topology, size, direction, orientation, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectDecl {
    pub name: String,
    pub calculus: AspectCalculus,
    /// Relations are sets of direction tiles; each relation variable then
    /// also gets a subset-bounds view.
    pub set_valued: bool,
}

impl AspectDecl {
    pub fn binary(name: impl Into<String>, calculus: Arc<Calculus>) -> Self {
        AspectDecl {
            name: name.into(),
            calculus: AspectCalculus::Binary(calculus),
            set_valued: false,
        }
    }

    pub fn ternary(name: impl Into<String>, calculus: Arc<TernaryCalculus>) -> Self {
        AspectDecl {
            name: name.into(),
            calculus: AspectCalculus::Ternary(calculus),
            set_valued: false,
        }
    }

    /// Region directions over the connected tile sets, set-valued, with no
    /// converse/composition tables.
    pub fn directions(name: impl Into<String>) -> Self {
        let universe = derive_valid_direction_sets();
        AspectDecl {
            name: name.into(),
            calculus: AspectCalculus::Universe(Arc::new(RelationUniverse {
                name: "dirsets".into(),
                symbols: universe.symbols(),
            })),
            set_valued: true,
        }
    }

    pub fn arity(&self) -> usize {
        match self.calculus {
            AspectCalculus::Ternary(_) => 3,
            _ => 2,
        }
    }

    pub fn symbols(&self) -> &[String] {
        match &self.calculus {
            AspectCalculus::Binary(c) => c.symbols(),
            AspectCalculus::Ternary(c) => c.symbols(),
            AspectCalculus::Universe(u) => &u.symbols,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.symbols().len()
    }

    pub fn calculus_name(&self) -> &str {
        match &self.calculus {
            AspectCalculus::Binary(c) => c.name(),
            AspectCalculus::Ternary(c) => c.name(),
            AspectCalculus::Universe(u) => &u.name,
        }
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols().iter().position(|s| s == symbol)
    }

    /// The relation on the diagonal `(a, a)`, if the calculus has an identity.
    pub fn identity(&self) -> Option<usize> {
        match &self.calculus {
            AspectCalculus::Binary(c) => Some(c.identity()),
            _ => None,
        }
    }

    /// Tile masks of a set-valued aspect, indexed like its symbols.
    pub(crate) fn tile_sets(&self) -> Result<Vec<u16>, ScenarioError> {
        self.symbols()
            .iter()
            .map(|s| {
                DirectionUniverse::parse_set(s).ok_or_else(|| ScenarioError::BadAspect {
                    aspect: self.name.clone(),
                    message: format!("`{s}` is not a set of direction tiles"),
                })
            })
            .collect()
    }

    fn relation_set(&self, symbols: &[impl AsRef<str>]) -> Result<ValueSet, ScenarioError> {
        symbols
            .iter()
            .map(|s| {
                self.index_of(s.as_ref()).ok_or_else(|| ScenarioError::UnknownRelation {
                    aspect: self.name.clone(),
                    symbol: s.as_ref().to_string(),
                })
            })
            .collect()
    }
}

/// Allowed relations for one object tuple of one aspect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub aspect: usize,
    pub objects: Vec<usize>,
    /// `None` restricts every time step.
    pub time: Option<usize>,
    pub allowed: ValueSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDecl {
    pub table: Arc<LinkTable>,
    /// Aspect index bound to each slot of the table.
    pub aspects: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourDecl {
    pub aspect: usize,
    pub table: Arc<NeighbourTable>,
}

/// A possibly partial, possibly multi-aspect, possibly temporal scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    objects: Vec<String>,
    aspects: Vec<AspectDecl>,
    restrictions: Vec<Restriction>,
    links: Vec<LinkDecl>,
    neighbours: Vec<NeighbourDecl>,
    time_steps: Option<usize>,
}

impl Scenario {
    pub fn new<S: Into<String>>(objects: impl IntoIterator<Item = S>) -> Result<Self, ScenarioError> {
        let objects: Vec<String> = objects.into_iter().map(Into::into).collect();
        if objects.is_empty() {
            return Err(ScenarioError::NoObjects);
        }
        for (i, o) in objects.iter().enumerate() {
            if objects[..i].contains(o) {
                return Err(ScenarioError::DuplicateObject(o.clone()));
            }
        }
        Ok(Scenario {
            objects,
            aspects: Vec::new(),
            restrictions: Vec::new(),
            links: Vec::new(),
            neighbours: Vec::new(),
            time_steps: None,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn aspects(&self) -> &[AspectDecl] {
        &self.aspects
    }

    pub fn restrictions(&self) -> &[Restriction] {
        &self.restrictions
    }

    pub fn links(&self) -> &[LinkDecl] {
        &self.links
    }

    pub fn neighbours(&self) -> &[NeighbourDecl] {
        &self.neighbours
    }

    pub fn time_steps(&self) -> Option<usize> {
        self.time_steps
    }

    /// Number of steps the network is unrolled over (1 when untimed).
    pub fn steps(&self) -> usize {
        self.time_steps.unwrap_or(1)
    }

    pub fn object_index(&self, name: &str) -> Result<usize, ScenarioError> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| ScenarioError::UnknownObject(name.to_string()))
    }

    pub fn aspect_index(&self, name: &str) -> Result<usize, ScenarioError> {
        self.aspects
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ScenarioError::UnknownAspect(name.to_string()))
    }

    pub fn aspect(&self, name: &str) -> Result<&AspectDecl, ScenarioError> {
        Ok(&self.aspects[self.aspect_index(name)?])
    }

    pub fn add_aspect(&mut self, aspect: AspectDecl) -> Result<&mut Self, ScenarioError> {
        if self.aspects.iter().any(|a| a.name == aspect.name) {
            return Err(ScenarioError::DuplicateAspect(aspect.name));
        }
        if aspect.set_valued {
            aspect.tile_sets()?;
        }
        self.aspects.push(aspect);
        Ok(self)
    }

    pub fn set_time_steps(&mut self, steps: usize) -> Result<&mut Self, ScenarioError> {
        if steps == 0 {
            return Err(ScenarioError::NoTimeSteps);
        }
        if let Some(bad) = self.restrictions.iter().filter_map(|r| r.time).find(|&t| t >= steps) {
            return Err(ScenarioError::TimeOutOfRange { step: bad, steps });
        }
        self.time_steps = Some(steps);
        Ok(self)
    }

    /// Restricts `aspect` on `objects` to `allowed` at every time step.
    pub fn restrict(
        &mut self,
        aspect: &str,
        objects: &[&str],
        allowed: &[impl AsRef<str>],
    ) -> Result<&mut Self, ScenarioError> {
        self.restrict_at(aspect, objects, None, allowed)
    }

    /// Restricts `aspect` on `objects` to `allowed`, at one step or all.
    pub fn restrict_at(
        &mut self,
        aspect: &str,
        objects: &[&str],
        time: Option<usize>,
        allowed: &[impl AsRef<str>],
    ) -> Result<&mut Self, ScenarioError> {
        let a = self.aspect_index(aspect)?;
        let decl = &self.aspects[a];
        let set = decl.relation_set(allowed)?;
        let objs = objects
            .iter()
            .map(|o| self.object_index(o))
            .collect::<Result<Vec<_>, _>>()?;
        self.restrict_indices(a, objs, time, set)
    }

    /// Index-level form of [`Scenario::restrict_at`].
    pub fn restrict_indices(
        &mut self,
        aspect: usize,
        objects: Vec<usize>,
        time: Option<usize>,
        allowed: ValueSet,
    ) -> Result<&mut Self, ScenarioError> {
        let decl = self
            .aspects
            .get(aspect)
            .ok_or_else(|| ScenarioError::UnknownAspect(format!("#{aspect}")))?;
        if objects.len() != decl.arity() {
            return Err(ScenarioError::ArityMismatch {
                aspect: decl.name.clone(),
                expected: decl.arity(),
                found: objects.len(),
            });
        }
        if let Some(&o) = objects.iter().find(|&&o| o >= self.objects.len()) {
            return Err(ScenarioError::UnknownObject(format!("#{o}")));
        }
        if allowed.is_empty() {
            return Err(ScenarioError::EmptyRestriction(decl.name.clone()));
        }
        if !allowed.is_subset(&ValueSet::full(decl.universe_size())) {
            return Err(ScenarioError::UnknownRelation {
                aspect: decl.name.clone(),
                symbol: format!("#{:?}", allowed.last()),
            });
        }
        if has_repeats(&objects) && decl.identity().is_none() {
            return Err(ScenarioError::RepeatedObjects(decl.name.clone()));
        }
        if let Some(t) = time {
            if t >= self.steps() {
                return Err(ScenarioError::TimeOutOfRange { step: t, steps: self.steps() });
            }
        }
        self.restrictions.push(Restriction {
            aspect,
            objects,
            time,
            allowed,
        });
        Ok(self)
    }

    /// States `table` over the named aspects, one per slot.
    pub fn link(&mut self, table: Arc<LinkTable>, aspects: &[&str]) -> Result<&mut Self, ScenarioError> {
        let mismatch = |message: String| ScenarioError::LinkMismatch {
            table: table.name().to_string(),
            message,
        };
        if aspects.len() != table.slots().len() {
            return Err(mismatch(format!(
                "{} slots but {} aspects given",
                table.slots().len(),
                aspects.len()
            )));
        }
        let mut bound = Vec::new();
        for (slot, name) in table.slots().iter().zip(aspects) {
            let a = self.aspect_index(name)?;
            let decl = &self.aspects[a];
            if decl.arity() != slot.shape.len() {
                return Err(mismatch(format!("aspect `{name}` has arity {}", decl.arity())));
            }
            if decl.symbols() != slot.symbols.as_slice() {
                return Err(mismatch(format!("aspect `{name}` has a different relation universe")));
            }
            bound.push(a);
        }
        self.links.push(LinkDecl {
            table,
            aspects: bound,
        });
        Ok(self)
    }

    /// Constrains consecutive time steps of `aspect` by `table`.
    pub fn neighbour(&mut self, aspect: &str, table: Arc<NeighbourTable>) -> Result<&mut Self, ScenarioError> {
        let a = self.aspect_index(aspect)?;
        if self.aspects[a].symbols() != table.symbols() {
            return Err(ScenarioError::BadAspect {
                aspect: aspect.to_string(),
                message: "neighbourhood table is over a different relation universe".into(),
            });
        }
        self.neighbours.push(NeighbourDecl { aspect: a, table });
        Ok(self)
    }
}

pub(crate) fn has_repeats(objects: &[usize]) -> bool {
    objects.iter().enumerate().any(|(i, o)| objects[..i].contains(o))
}
