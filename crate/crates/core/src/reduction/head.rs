use std::collections::{HashMap, VecDeque};

use super::normalize::{follow, Outcome};
use super::relation::{successors, RelationId, Step};
use super::rules::{head_betav_redex, match_rule};
use super::trace::Trace;
use crate::syntax::{Term, TermKey};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RunEnd {
    Normal,
    Cycle,
    Fuel,
}

/// The deterministic head βv sequence from a term, up to its normal form,
/// the first repeated term, or `fuel` steps.
#[derive(Clone, Debug)]
pub struct HeadRun {
    pub trace: Trace,
    pub end: RunEnd,
}

impl HeadRun {
    /// Prefix of the run with `i` steps.
    pub fn prefix(&self, i: usize) -> Trace {
        Trace { start: self.trace.start.clone(), steps: self.trace.steps[..i].to_vec() }
    }

    /// Distinct terms visited: on a cycle the repeated last term is dropped.
    pub fn distinct_len(&self) -> usize {
        match self.end {
            RunEnd::Cycle => self.trace.len(),
            _ => self.trace.len() + 1,
        }
    }
}

pub fn head_betav_run(t: &Term, fuel: usize) -> HeadRun {
    let out = follow(t, fuel, |u| {
        let (path, rule) = head_betav_redex(u)?;
        let sub = u.subterm_at(&path).expect("head redex path");
        let result = u.replace_at(&path, match_rule(sub, rule).expect("head redex")).expect("path");
        Some(Step { rule, path, result })
    });
    match out {
        Outcome::NormalForm { trace, .. } => HeadRun { trace, end: RunEnd::Normal },
        Outcome::CycleDetected { trace, .. } => HeadRun { trace, end: RunEnd::Cycle },
        Outcome::FuelExhausted { trace } => HeadRun { trace, end: RunEnd::Fuel },
    }
}

/// All terms reachable by head σ-steps, breadth-first, each with a trace
/// from `t`. The first entry is `t` itself. The flag is set if the
/// exploration stopped at `cap` nodes.
pub fn head_sigma_closure(t: &Term, cap: usize) -> (Vec<Trace>, bool) {
    let mut parent: Vec<Option<(usize, Step)>> = vec![None];
    let mut terms = vec![t.clone()];
    let mut seen: HashMap<TermKey, usize> = HashMap::from([(t.key(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    while let Some(i) = queue.pop_front() {
        for s in successors(&terms[i], RelationId::HeadSigma) {
            let k = s.result.key();
            if seen.contains_key(&k) {
                continue;
            }
            if terms.len() >= cap {
                truncated = true;
                break;
            }
            seen.insert(k, terms.len());
            terms.push(s.result.clone());
            parent.push(Some((i, s)));
            queue.push_back(terms.len() - 1);
        }
    }
    let traces = (0..terms.len())
        .map(|mut i| {
            let mut steps = Vec::new();
            while let Some((p, s)) = &parent[i] {
                steps.push(s.clone());
                i = *p;
            }
            steps.reverse();
            Trace { start: t.clone(), steps }
        })
        .collect();
    (traces, truncated)
}
