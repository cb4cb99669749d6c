//! Finite inquisitive modal and epistemic models: support semantics,
//! bisimulation games, characteristic formulae, relational encodings with a
//! standard translation into two-sorted first-order logic, and
//! bisimilarity-preserving model transformations.
//!
//! Everything is a pure function over immutable values; memo tables are
//! local to a single query or synthesis context, so concurrent use from
//! multiple threads needs no coordination.

pub mod bisim;
pub mod charform;
pub mod dot;
pub mod epistemic;
pub mod fixtures;
pub mod fo;
pub mod formula;
pub mod gen;
pub mod inqstate;
pub mod model;
pub mod relational;
pub mod semantics;
pub mod textio;
pub mod transforms;
pub mod validate;
pub mod worldset;

pub use formula::Formula;
pub use inqstate::InqState;
pub use model::{InqModel, KripkeModel, ModelBuilder, Point, Pointed};
pub use relational::{
    decode_relational, disjoint_sum, encode_relational, EncodeMode, RelationalModel, Structure,
};
pub use worldset::WorldSet;
