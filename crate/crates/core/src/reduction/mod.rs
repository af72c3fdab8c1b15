//! The rules βv, σ1 and σ3, their closures, and bounded normalization.

mod head;
mod normalize;
mod relation;
mod rules;
mod trace;

pub use head::{head_betav_run, head_sigma_closure, HeadRun, RunEnd};
pub use normalize::{normalize, Outcome, Strategy};
pub use relation::{head_result_keys, is_step, successors, RelationId, Step};
pub use rules::{
    contract, head_betav_redex, head_redexes, is_redex, match_rule, redex_positions, redexes, step_head_betav,
    RedexError, Rule, RuleSet,
};
pub use trace::{Trace, TraceError};
