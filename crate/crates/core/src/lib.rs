//! Qualitative spatial reasoning with relation variables.
//!
//! Spatial relations between objects are modelled as finite-domain
//! variables; calculus semantics (converse, composition, rotation,
//! aspect links, conceptual neighbourhood) become extensional table
//! constraints handled by one generic GAC propagator plus search.
//!
//! * [`engine`] – finite-domain store, table/set/array constraints, search.
//! * [`calculi`] – qualitative calculi: RCC-8, size, point directions,
//!   cyclic orientations and connected direction-tile sets.
//! * [`scenarios`] – scenario model and the network builder.
//! * [`pc_oracle`] – reference path consistency and atomic enumeration.

pub mod bitset;
pub mod calculi;
pub mod engine;
pub mod pc_oracle;
pub mod scenarios;

pub use bitset::ValueSet;
pub use calculi::{Calculus, DirectionUniverse, TernaryCalculus};

pub use engine::{FiniteDomain, Propagation, SetDomain, Store, VarId};
pub use scenarios::{AspectDecl, Network, Scenario};

