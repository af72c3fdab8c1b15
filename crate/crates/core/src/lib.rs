//! Rewriting engine for the call-by-value λ-calculus extended with the
//! σ-rules that shuffle applications past stuck β-redexes.

pub mod analysis;
pub mod harness;
pub mod parallel;
pub mod reduction;
pub mod standardization;
pub mod syntax;

pub use reduction::{Outcome, RelationId, Rule, RuleSet, Step, Strategy, Trace};
pub use syntax::{parse, Path, Term};
