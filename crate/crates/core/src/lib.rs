//! Exact computation with U-equivalence spaces on finite carriers.
//!
//! A U-equivalence space is a set with a family of equivalence relations
//! closed under finite intersections. This crate builds such families
//! (generated, induced, relative and product classes), the topologies they
//! induce, predicates on maps between them, and the classes generated by
//! transitive pseudo-metrics. Everything is computed exactly on carriers
//! `0..n`.

pub mod class;
pub mod enumerate;
pub mod error;
pub mod map;
pub mod metric;
pub mod relation;
pub mod set;
pub mod topology;

pub use class::{induced_class, product, CoverWitness, ProductSpace, RelativeSpace, UeqClass};
pub use error::{Error, Result};
pub use map::{
    coincidence_set, has_block_inside, inclusion_map, is_transverse, is_u_open_subset, kernel,
    left_inverse_embedding_check, refines_within, SpaceMap,
};
pub use metric::{
    is_equivalently_uniformisable_via, uniformising_class, EvaluationEmbedding, MetricFamily,
    PseudoMetric, Rational, TransitivePseudoMetric,
};
pub use relation::{Carrier, EquivRel, ProductShape, MAX_PRODUCT_SIZE};
pub use set::ElementSet;
pub use topology::{
    induce_topology, is_connected, is_continuous_between, is_dense, is_topological_embedding,
    product_topology, subspace_topology, topologies_equal, FiniteTopology, Subspace,
};
