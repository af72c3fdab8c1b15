//! Term enumeration, reduction graphs and the executable property catalog.

mod gen;
mod graph;
mod properties;

pub use gen::{closed_terms, closed_values, enumerate_terms, GenMode, GuardError, TermGen, MAX_EXHAUSTIVE_SIZE};
pub use graph::{reduction_graph, Edge, ReductionGraph};
pub use properties::{
    check_term, conservativity_extra, run_property, run_property_jobs, summary_table, Check, Failure, PropertyId,
    PropertyReport,
};
