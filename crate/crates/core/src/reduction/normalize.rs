use std::collections::{HashMap, HashSet, VecDeque};

use super::relation::{successors, RelationId, Step};
use super::trace::Trace;
use crate::syntax::{Term, TermKey};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Always fire the first successor.
    Leftmost,
    /// Breadth-first search of the reduction graph for a normal form.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    NormalForm {
        term: Term,
        trace: Trace,
    },
    /// `entry` occurred earlier on the path and was reached again as the
    /// trace's last term.
    CycleDetected {
        trace: Trace,
        entry: Term,
    },
    FuelExhausted {
        trace: Trace,
    },
}

impl Outcome {
    pub fn trace(&self) -> &Trace {
        match self {
            Outcome::NormalForm { trace, .. }
            | Outcome::CycleDetected { trace, .. }
            | Outcome::FuelExhausted { trace } => trace,
        }
    }

    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            Outcome::NormalForm { term, .. } => Some(term),
            _ => None,
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, Outcome::CycleDetected { .. })
    }

    pub fn is_fuel_exhausted(&self) -> bool {
        matches!(self, Outcome::FuelExhausted { .. })
    }
}

/// Bounded normalization. Leftmost spends one unit of fuel per step,
/// Exhaustive one per expanded node.
pub fn normalize(t: &Term, rel: RelationId, strategy: Strategy, fuel: usize) -> Outcome {
    match strategy {
        Strategy::Leftmost => leftmost(t, rel, fuel),
        Strategy::Exhaustive => exhaustive(t, rel, fuel),
    }
}

fn leftmost(t: &Term, rel: RelationId, fuel: usize) -> Outcome {
    follow(t, fuel, |u| successors(u, rel).into_iter().next())
}

/// Runs a deterministic stepping function with cycle detection.
pub(crate) fn follow(t: &Term, fuel: usize, mut next: impl FnMut(&Term) -> Option<Step>) -> Outcome {
    let mut trace = Trace::new(t.clone());
    let mut seen: HashSet<TermKey> = HashSet::from([t.key()]);
    loop {
        let Some(step) = next(trace.end()) else {
            return Outcome::NormalForm { term: trace.end().clone(), trace };
        };
        if trace.len() >= fuel {
            return Outcome::FuelExhausted { trace };
        }
        let again = !seen.insert(step.result.key());
        trace.push(step);
        if again {
            let entry = trace.end().clone();
            return Outcome::CycleDetected { trace, entry };
        }
    }
}

fn exhaustive(t: &Term, rel: RelationId, fuel: usize) -> Outcome {
    // node index -> (parent index, step into node)
    let mut nodes: Vec<(Term, Option<(usize, Step)>)> = vec![(t.clone(), None)];
    let mut index: HashMap<TermKey, usize> = HashMap::from([(t.key(), 0)]);
    let mut first_succ: Vec<Option<usize>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0usize;
    while let Some(i) = queue.pop_front() {
        if expanded >= fuel {
            return Outcome::FuelExhausted { trace: path_to(&nodes, i) };
        }
        expanded += 1;
        let succ = successors(&nodes[i].0, rel);
        if succ.is_empty() {
            let trace = path_to(&nodes, i);
            return Outcome::NormalForm { term: nodes[i].0.clone(), trace };
        }
        for (n, s) in succ.into_iter().enumerate() {
            let k = s.result.key();
            let j = match index.get(&k) {
                Some(&j) => j,
                None => {
                    let j = nodes.len();
                    index.insert(k, j);
                    nodes.push((s.result.clone(), Some((i, s))));
                    first_succ.push(None);
                    queue.push_back(j);
                    j
                }
            };
            if n == 0 {
                first_succ[i] = Some(j);
            }
        }
    }
    // The whole graph is explored and has no sink, so following first
    // successors from the root must revisit a node.
    let mut trace = Trace::new(t.clone());
    let mut on_path = HashSet::from([0usize]);
    let mut cur = 0usize;
    loop {
        let j = first_succ[cur].expect("every node has a successor");
        let step = successors(&nodes[cur].0, rel).into_iter().next().expect("non-empty");
        trace.push(Step { result: nodes[j].0.clone(), ..step });
        if !on_path.insert(j) {
            return Outcome::CycleDetected { entry: nodes[j].0.clone(), trace };
        }
        cur = j;
    }
}

fn path_to(nodes: &[(Term, Option<(usize, Step)>)], mut i: usize) -> Trace {
    let mut steps = Vec::new();
    while let Some((p, s)) = &nodes[i].1 {
        steps.push(s.clone());
        i = *p;
    }
    steps.reverse();
    Trace { start: nodes[0].0.clone(), steps }
}
