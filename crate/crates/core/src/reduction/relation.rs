use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rules::{contract, head_redexes, is_redex, redexes, Rule, RuleSet};
use crate::syntax::{Path, Term, TermKey};

/// A one-step reduction relation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum RelationId {
    /// Contextual closure of the given rules.
    Full(RuleSet),
    HeadBetaV,
    HeadSigma,
    HeadV,
    /// Steps of `Full(rules)` whose result no head v-step reaches.
    /// `Internal(RuleSet::V)` is the internal v-reduction.
    Internal(RuleSet),
    /// Steps of `Full(rules)` at an occurrence that is not a head redex,
    /// whatever their result.
    OffHead(RuleSet),
    Weak,
    Stratified,
}

impl RelationId {
    pub const INTERNAL_V: RelationId = RelationId::Internal(RuleSet::V);
    pub const FULL_V: RelationId = RelationId::Full(RuleSet::V);

    pub fn is_head(self) -> bool {
        matches!(self, RelationId::HeadBetaV | RelationId::HeadSigma | RelationId::HeadV)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationId::Full(rs) => write!(f, "{}", rs),
            RelationId::HeadBetaV => f.write_str("head-betav"),
            RelationId::HeadSigma => f.write_str("head-sigma"),
            RelationId::HeadV => f.write_str("head-v"),
            RelationId::Internal(rs) => write!(f, "int-{}", rs),
            RelationId::OffHead(rs) => write!(f, "offhead-{}", rs),
            RelationId::Weak => f.write_str("weak"),
            RelationId::Stratified => f.write_str("stratified"),
        }
    }
}

impl FromStr for RelationId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rules = |s: &str| -> Option<RuleSet> {
            match s {
                "v" => Some(RuleSet::V),
                "sigma" => Some(RuleSet::SIGMA),
                "betav" => Some(RuleSet::BETA_V),
                "sigma1" => Some(RuleSet::SIGMA1),
                "sigma3" => Some(RuleSet::SIGMA3),
                _ => None,
            }
        };
        match s {
            "head-betav" => Ok(RelationId::HeadBetaV),
            "head-sigma" => Ok(RelationId::HeadSigma),
            "head-v" => Ok(RelationId::HeadV),
            "weak" => Ok(RelationId::Weak),
            "stratified" => Ok(RelationId::Stratified),
            _ => {
                if let Some(r) = s.strip_prefix("int-").and_then(rules) {
                    Ok(RelationId::Internal(r))
                } else if let Some(r) = s.strip_prefix("offhead-").and_then(rules) {
                    Ok(RelationId::OffHead(r))
                } else if let Some(r) = rules(s) {
                    Ok(RelationId::Full(r))
                } else {
                    Err(format!("unknown relation '{}'", s))
                }
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub rule: Rule,
    pub path: Path,
    pub result: Term,
}

fn fire(t: &Term, occ: Vec<(Path, Rule)>) -> Vec<Step> {
    occ.into_iter()
        .map(|(path, rule)| {
            let result = contract(t, &path, rule).expect("enumerated redex");
            Step { rule, path, result }
        })
        .collect()
}

/// One-step reducts of `t` under `rel`, ordered by (path, rule).
pub fn successors(t: &Term, rel: RelationId) -> Vec<Step> {
    match rel {
        RelationId::Full(rs) => fire(t, redexes(t, rs)),
        RelationId::HeadBetaV => fire(t, head_redexes(t).into_iter().filter(|(_, r)| *r == Rule::BetaV).collect()),
        RelationId::HeadSigma => fire(t, head_redexes(t).into_iter().filter(|(_, r)| r.is_sigma()).collect()),
        RelationId::HeadV => fire(t, head_redexes(t)),
        RelationId::Internal(rs) => {
            let head: Vec<TermKey> = successors(t, RelationId::HeadV).iter().map(|s| s.result.key()).collect();
            successors(t, RelationId::Full(rs)).into_iter().filter(|s| !head.contains(&s.result.key())).collect()
        }
        RelationId::OffHead(rs) => {
            let head = head_redexes(t);
            fire(t, redexes(t, rs).into_iter().filter(|o| !head.contains(o)).collect())
        }
        RelationId::Weak => fire(t, zone_redexes(t, Zone::Weak)),
        RelationId::Stratified => fire(t, zone_redexes(t, Zone::Strat)),
    }
}

/// Result keys of head v-steps from `t`, for pair-level classification.
pub fn head_result_keys(t: &Term, rel: RelationId) -> Vec<TermKey> {
    successors(t, rel).iter().map(|s| s.result.key()).collect()
}

/// Pair-level membership: does some `rel` step lead from `from` to a term
/// α-equal to `to`?
pub fn is_step(from: &Term, to: &Term, rel: RelationId) -> bool {
    let k = to.key();
    successors(from, rel).iter().any(|s| s.result.key() == k)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Zone {
    /// Weak position; an abstraction here keeps its body closed.
    Weak,
    /// Weak position directly in function position of an application,
    /// so an abstraction here opens its body: `(λx.W)M`.
    WeakFun,
    Strat,
}

fn zone_redexes(t: &Term, zone: Zone) -> Vec<(Path, Rule)> {
    let mut out = Vec::new();
    zone_into(t, zone, &mut Vec::new(), &mut out);
    out
}

fn zone_into(t: &Term, zone: Zone, path: &mut Vec<u8>, out: &mut Vec<(Path, Rule)>) {
    for r in Rule::ALL {
        if is_redex(t, r) {
            out.push((Path(path.clone()), r));
        }
    }
    match t {
        Term::Var(_) => {}
        Term::Abs(_, b) => {
            let inner = match zone {
                Zone::Weak => return,
                Zone::WeakFun => Zone::Weak,
                Zone::Strat => Zone::Strat,
            };
            path.push(0);
            zone_into(b, inner, path, out);
            path.pop();
        }
        Term::App(f, a) => {
            let fz = match zone {
                Zone::Weak | Zone::WeakFun => Zone::WeakFun,
                Zone::Strat => Zone::Strat,
            };
            path.push(0);
            zone_into(f, fz, path, out);
            path.pop();
            path.push(1);
            zone_into(a, Zone::Weak, path, out);
            path.pop();
        }
    }
}
