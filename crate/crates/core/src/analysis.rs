//! Halting, observational equivalence sampling, potential valuability and
//! solvability, each as a bounded semi-decision.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::harness::{closed_terms, closed_values, enumerate_terms, TermGen};
use crate::reduction::{
    head_betav_run, normalize, successors, Outcome, RelationId, RuleSet, RunEnd, Step, Strategy, Trace, TraceError,
};
use crate::syntax::{print, Path, Term, TermKey};

/// Placeholder variable marking the hole of a context.
pub const HOLE: &str = "[]";

/// A one-hole context: `frame` has the placeholder at `hole`.
#[derive(Clone, Debug)]
pub struct Context {
    pub frame: Term,
    pub hole: Path,
}

impl Context {
    /// Plugs `m` in, capturing its free variables.
    pub fn fill(&self, m: &Term) -> Term {
        self.frame.replace_at(&self.hole, m.clone()).expect("hole path")
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.frame)
    }
}

#[derive(Clone, Debug)]
pub enum Witness {
    /// A run ending at the term that settles the question.
    Trace(Trace),
    /// A run whose last term already occurs earlier.
    Cycle { trace: Trace, entry: Term },
    /// A context plugging the two terms into runs with different outcomes.
    Context { context: Context, left: Box<Verdict3>, right: Box<Verdict3> },
    /// Values substituted for the free variables, or arguments applied to
    /// the closure, with the run of the resulting term.
    Instance { args: Vec<Term>, trace: Trace },
}

impl Witness {
    /// Re-checks every step of the recorded runs.
    pub fn replay(&self) -> Result<(), TraceError> {
        match self {
            Witness::Trace(t) | Witness::Instance { trace: t, .. } => t.validate(),
            Witness::Cycle { trace, entry } => {
                trace.validate()?;
                let k = entry.key();
                let earlier = trace.terms()[..trace.len()].iter().any(|t| t.key() == k);
                if trace.end().key() == k && earlier {
                    Ok(())
                } else {
                    Err(TraceError::Format { line: 0, msg: "cycle entry is not repeated".into() })
                }
            }
            Witness::Context { left, right, .. } => {
                for v in [left, right] {
                    if let Some(w) = v.witness() {
                        w.replay()?;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Witness::Trace(t) => json!({ "kind": "trace", "trace": t.to_text(false) }),
            Witness::Cycle { trace, entry } => {
                json!({ "kind": "cycle", "trace": trace.to_text(false), "entry": print(entry) })
            }
            Witness::Context { context, left, right } => json!({
                "kind": "context",
                "context": print(&context.frame),
                "left": left.label(),
                "right": right.label(),
            }),
            Witness::Instance { args, trace } => json!({
                "kind": "instance",
                "args": args.iter().map(print).collect::<Vec<_>>(),
                "trace": trace.to_text(false),
            }),
        }
    }
}

/// Three-valued answer. `spent` is the fuel used: steps, expanded nodes,
/// or candidates tried, depending on the query.
#[derive(Clone, Debug)]
pub enum Verdict3 {
    Yes { witness: Witness, spent: usize },
    No { witness: Witness, spent: usize },
    Unknown { spent: usize },
}

impl Verdict3 {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict3::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict3::No { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict3::Unknown { .. })
    }

    pub fn decided(&self) -> Option<bool> {
        match self {
            Verdict3::Yes { .. } => Some(true),
            Verdict3::No { .. } => Some(false),
            Verdict3::Unknown { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict3::Yes { witness, .. } | Verdict3::No { witness, .. } => Some(witness),
            Verdict3::Unknown { .. } => None,
        }
    }

    pub fn spent(&self) -> usize {
        match self {
            Verdict3::Yes { spent, .. } | Verdict3::No { spent, .. } | Verdict3::Unknown { spent } => *spent,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict3::Yes { .. } => "yes",
            Verdict3::No { .. } => "no",
            Verdict3::Unknown { .. } => "unknown",
        }
    }

    /// The value reached, for a `Yes` carried by a run.
    pub fn value(&self) -> Option<&Term> {
        match self {
            Verdict3::Yes { witness: Witness::Trace(t), .. } => Some(t.end()),
            _ => None,
        }
    }
}

/// One line of the JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub term: String,
    pub query: String,
    pub verdict: &'static str,
    pub witness: Option<serde_json::Value>,
    pub fuel_spent: usize,
}

impl Report {
    pub fn new(term: &Term, query: &str, v: &Verdict3) -> Report {
        Report {
            term: print(term),
            query: query.to_string(),
            verdict: v.label(),
            witness: v.witness().map(Witness::to_json),
            fuel_spent: v.spent(),
        }
    }
}

fn from_outcome(o: Outcome, yes: impl Fn(&Term) -> bool) -> Verdict3 {
    let spent = o.trace().len();
    match o {
        Outcome::NormalForm { term, trace } => {
            if yes(&term) {
                Verdict3::Yes { witness: Witness::Trace(trace), spent }
            } else {
                Verdict3::No { witness: Witness::Trace(trace), spent }
            }
        }
        Outcome::CycleDetected { trace, entry } => Verdict3::No { witness: Witness::Cycle { trace, entry }, spent },
        Outcome::FuelExhausted { .. } => Verdict3::Unknown { spent },
    }
}

/// Whether head βv evaluation reaches a value. A stuck non-value or a
/// repeated term is a `No`.
pub fn halts(m: &Term, fuel: usize) -> Verdict3 {
    let run = head_betav_run(m, fuel);
    let spent = run.trace.len();
    match run.end {
        RunEnd::Normal if run.trace.end().is_value() => Verdict3::Yes { witness: Witness::Trace(run.trace), spent },
        RunEnd::Normal => Verdict3::No { witness: Witness::Trace(run.trace), spent },
        RunEnd::Cycle => {
            let entry = run.trace.end().clone();
            Verdict3::No { witness: Witness::Cycle { trace: run.trace, entry }, spent }
        }
        RunEnd::Fuel => Verdict3::Unknown { spent },
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ConsistencyError {
    #[error("head v reaches {head_v} but head βv evaluation gives {betav}")]
    ValueMismatch { head_v: String, betav: String },
    #[error("head v reaches the value {value} and also the normal form {other}")]
    NotUnique { value: String, other: String },
}

/// Breadth-first search of the head v graph for a value. The result is
/// checked against `halts`: a decided head βv answer must give the same
/// value.
pub fn head_v_eval(m: &Term, fuel: usize) -> Result<Verdict3, ConsistencyError> {
    let graph = explore(m, RelationId::HeadV, fuel, |t| t.is_value());
    let verdict = match &graph.end {
        Explored::Goal(i) => Verdict3::Yes { witness: Witness::Trace(graph.path_to(*i)), spent: graph.expanded },
        Explored::Complete => {
            let witness = match graph.sinks.first() {
                Some(&i) => Witness::Trace(graph.path_to(i)),
                None => {
                    let Outcome::CycleDetected { trace, entry } =
                        normalize(m, RelationId::HeadV, Strategy::Exhaustive, fuel.max(graph.nodes.len() + 1))
                    else {
                        unreachable!("a finite graph without sinks has a cycle")
                    };
                    Witness::Cycle { trace, entry }
                }
            };
            Verdict3::No { witness, spent: graph.expanded }
        }
        Explored::Fuel => Verdict3::Unknown { spent: graph.expanded },
    };
    if let Some(v) = verdict.value() {
        for &i in &graph.sinks {
            if !graph.nodes[i].0.alpha_eq(v) {
                return Err(ConsistencyError::NotUnique { value: print(v), other: print(&graph.nodes[i].0) });
            }
        }
    }
    let ev = halts(m, fuel);
    let agree = match (&verdict, &ev) {
        (_, Verdict3::Unknown { .. }) => true,
        (Verdict3::Yes { .. }, Verdict3::Yes { .. }) => verdict.value().unwrap().alpha_eq(ev.value().unwrap()),
        (Verdict3::Yes { .. }, Verdict3::No { .. }) | (Verdict3::No { .. }, Verdict3::Yes { .. }) => false,
        _ => true,
    };
    if !agree {
        let show = |v: &Verdict3| v.value().map(print).unwrap_or_else(|| v.label().to_string());
        return Err(ConsistencyError::ValueMismatch { head_v: show(&verdict), betav: show(&ev) });
    }
    Ok(verdict)
}

enum Explored {
    Goal(usize),
    Complete,
    Fuel,
}

struct Graph {
    nodes: Vec<(Term, Option<(usize, Step)>)>,
    sinks: Vec<usize>,
    expanded: usize,
    end: Explored,
}

impl Graph {
    fn path_to(&self, mut i: usize) -> Trace {
        let mut steps = Vec::new();
        while let Some((p, s)) = &self.nodes[i].1 {
            steps.push(s.clone());
            i = *p;
        }
        steps.reverse();
        Trace { start: self.nodes[0].0.clone(), steps }
    }
}

/// Breadth-first exploration stopping at the first goal node, recording
/// the sinks met on the way. Fuel counts expanded nodes.
fn explore(m: &Term, rel: RelationId, fuel: usize, goal: impl Fn(&Term) -> bool) -> Graph {
    let mut g = Graph { nodes: vec![(m.clone(), None)], sinks: Vec::new(), expanded: 0, end: Explored::Complete };
    let mut index: HashMap<TermKey, usize> = HashMap::from([(m.key(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if goal(&g.nodes[i].0) {
            g.end = Explored::Goal(i);
            return g;
        }
        if g.expanded >= fuel {
            g.end = Explored::Fuel;
            return g;
        }
        g.expanded += 1;
        let succ = successors(&g.nodes[i].0, rel);
        if succ.is_empty() {
            g.sinks.push(i);
        }
        for s in succ {
            let k = s.result.key();
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
                e.insert(g.nodes.len());
                g.nodes.push((s.result.clone(), Some((i, s))));
                queue.push_back(g.nodes.len() - 1);
            }
        }
    }
    g
}

/// Looks for a context of size ≤ `size` in which exactly one of `m`, `n`
/// halts, trying at most `contexts` of them. Never answers `Yes`.
pub fn obs_equiv_sample(m: &Term, n: &Term, contexts: usize, size: usize, fuel: usize) -> Verdict3 {
    let mut pool: Vec<String> = m.free_vars().union(&n.free_vars()).map(|x| x.to_string()).collect();
    pool.push(HOLE.to_string());
    let pool: Vec<&str> = pool.iter().map(String::as_str).collect();
    let gen = TermGen::exhaustive(size.min(crate::harness::MAX_EXHAUSTIVE_SIZE), &pool);
    let frames: Vec<Context> = enumerate_terms(&gen)
        .expect("size is capped")
        .filter_map(|t| {
            let holes = hole_paths(&t);
            (holes.len() == 1).then(|| Context { frame: t, hole: holes[0].clone() })
        })
        .take(contexts)
        .collect();
    let tried = frames.len();
    let found = frames.into_par_iter().find_map_first(|c| {
        let l = halts(&c.fill(m), fuel);
        let r = halts(&c.fill(n), fuel);
        match (l.decided(), r.decided()) {
            (Some(a), Some(b)) if a != b => Some((c, l, r)),
            _ => None,
        }
    });
    match found {
        Some((context, l, r)) => {
            Verdict3::No { witness: Witness::Context { context, left: Box::new(l), right: Box::new(r) }, spent: tried }
        }
        None => Verdict3::Unknown { spent: tried },
    }
}

fn hole_paths(t: &Term) -> Vec<Path> {
    fn go(t: &Term, here: &mut Vec<u8>, out: &mut Vec<Path>) {
        match t {
            Term::Var(x) if &**x == HOLE => out.push(Path(here.clone())),
            Term::Var(_) => {}
            Term::Abs(_, b) => {
                here.push(0);
                go(b, here, out);
                here.pop();
            }
            Term::App(f, a) => {
                for (i, c) in [f, a].into_iter().enumerate() {
                    here.push(i as u8);
                    go(c, here, out);
                    here.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Leftmost weak normalization. Since weak normalization and strong weak
/// normalization coincide, a cycle disproves.
pub fn potentially_valuable(m: &Term, fuel: usize) -> Verdict3 {
    from_outcome(normalize(m, RelationId::Weak, Strategy::Leftmost, fuel), |_| true)
}

/// Leftmost stratified normalization, with the same protocol.
pub fn solvable(m: &Term, fuel: usize) -> Verdict3 {
    from_outcome(normalize(m, RelationId::Stratified, Strategy::Leftmost, fuel), |_| true)
}

const BETA_V: RelationId = RelationId::Full(RuleSet::BETA_V);

/// Shared by both oracles: `Some(No)` when `m` is closed and its whole βv
/// graph holds no value. Then neither `m` nor any application `m M1…Mn`
/// can reach a value, since `m` is never an abstraction.
fn closed_disproof(m: &Term, fuel: usize) -> Option<Verdict3> {
    if !m.is_closed() {
        return None;
    }
    let g = explore(m, BETA_V, fuel, |t| t.is_value());
    if !matches!(g.end, Explored::Complete) {
        return None;
    }
    let witness = match g.sinks.first() {
        Some(&i) => Witness::Trace(g.path_to(i)),
        None => match normalize(m, BETA_V, Strategy::Exhaustive, g.nodes.len() + 1) {
            Outcome::CycleDetected { trace, entry } => Witness::Cycle { trace, entry },
            _ => unreachable!("a finite graph without sinks has a cycle"),
        },
    };
    Some(Verdict3::No { witness, spent: g.expanded })
}

/// Brute-force βv potential valuability: tries every assignment of closed
/// values of size ≤ `val_size` to the free variables and searches the βv
/// graph of each instance for a value.
pub fn betav_pv_oracle(m: &Term, val_size: usize, fuel: usize) -> Verdict3 {
    let vars: Vec<_> = m.free_vars().into_iter().collect();
    if vars.is_empty() {
        if let Some(no) = closed_disproof(m, fuel) {
            return no;
        }
    }
    let values = closed_values(val_size);
    let tuples = tuples(values.len(), vars.len());
    let tried = tuples.len();
    let hit = tuples.into_par_iter().enumerate().find_map_first(|(n, idx)| {
        let args: Vec<Term> = idx.iter().map(|&i| values[i].clone()).collect();
        let inst = vars.iter().zip(&args).fold(m.clone(), |t, (x, v)| t.substitute(x, v));
        let g = explore(&inst, BETA_V, fuel, |t| t.is_value());
        match g.end {
            Explored::Goal(i) => Some((n + 1, args, g.path_to(i))),
            _ => None,
        }
    });
    match hit {
        Some((spent, args, trace)) => Verdict3::Yes { witness: Witness::Instance { args, trace }, spent },
        None => Verdict3::Unknown { spent: tried },
    }
}

/// Brute-force βv solvability: applies the closure of `m` to up to
/// `arg_count` closed terms of size ≤ `arg_size` and searches for `I`.
pub fn betav_solv_oracle(m: &Term, arg_count: usize, arg_size: usize, fuel: usize) -> Verdict3 {
    let closure = m.free_vars().into_iter().rev().fold(m.clone(), |b, x| Term::abs_n(x, b));
    if let Some(no) = closed_disproof(&closure, fuel) {
        return no;
    }
    let args = closed_terms(arg_size, false);
    let id = Term::id();
    let all: Vec<Vec<usize>> = (0..=arg_count).flat_map(|n| tuples(args.len(), n)).collect();
    let tried = all.len();
    let hit = all.into_par_iter().enumerate().find_map_first(|(n, idx)| {
        let chosen: Vec<Term> = idx.iter().map(|&i| args[i].clone()).collect();
        let t = Term::apps(closure.clone(), chosen.iter().cloned());
        let g = explore(&t, BETA_V, fuel, |u| u.alpha_eq(&id));
        match g.end {
            Explored::Goal(i) => Some((n + 1, chosen, g.path_to(i))),
            _ => None,
        }
    });
    match hit {
        Some((spent, args, trace)) => Verdict3::Yes { witness: Witness::Instance { args, trace }, spent },
        None => Verdict3::Unknown { spent: tried },
    }
}

/// Index tuples of length `len` over `0..n`, in odometer order with the
/// last position varying fastest.
fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|p| (0..n).map(move |i| [p.clone(), vec![i]].concat())).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    const STUCK: &str = "(\\y.D)(x I) D";

    #[test]
    fn halting() {
        let v = halts(&p("I I"), 10);
        assert!(v.value().unwrap().alpha_eq(&Term::id()));
        let v = halts(&p("D D"), 10);
        assert!(matches!(v, Verdict3::No { witness: Witness::Cycle { .. }, .. }));
        v.witness().unwrap().replay().unwrap();
        let v = halts(&p(STUCK), 10);
        let Verdict3::No { witness: Witness::Trace(t), .. } = &v else { panic!("{:?}", v) };
        assert!(t.is_empty());
        assert!(halts(&p("(\\x.x x x)(\\x.x x x)"), 5).is_unknown());
    }

    #[test]
    fn head_v() {
        let v = head_v_eval(&p("I (D I) I"), 100).unwrap();
        assert!(v.value().unwrap().alpha_eq(&Term::id()));
        v.witness().unwrap().replay().unwrap();
        let v = head_v_eval(&p("\\x.x y"), 100).unwrap();
        assert_eq!(v.witness().map(|w| matches!(w, Witness::Trace(t) if t.is_empty())), Some(true));
        assert!(head_v_eval(&p(STUCK), 100).unwrap().is_no());
        let v = head_v_eval(&p("D D"), 100).unwrap();
        assert!(matches!(v, Verdict3::No { witness: Witness::Cycle { .. }, .. }));
    }

    #[test]
    fn observational() {
        let v = obs_equiv_sample(&Term::id(), &p("D D"), 50, 3, 100);
        let Verdict3::No { witness: Witness::Context { context, .. }, .. } = &v else { panic!() };
        assert_eq!(context.hole, Path::root());
        let m = p(STUCK);
        assert!(obs_equiv_sample(&m, &m, 200, 5, 100).is_unknown());
        assert!(obs_equiv_sample(&m, &p("D D"), 200, 5, 100).is_unknown());
    }

    #[test]
    fn weak_and_stratified() {
        assert!(potentially_valuable(&p("x"), 100).is_yes());
        let v = potentially_valuable(&p(STUCK), 100);
        let Verdict3::No { witness: Witness::Cycle { entry, .. }, .. } = &v else { panic!("{:?}", v) };
        assert!(entry.alpha_eq(&p("(\\y.D D)(x I)")));
        assert!(potentially_valuable(&p("\\x.D D"), 100).is_yes());
        assert!(solvable(&Term::id(), 100).is_yes());
        assert!(solvable(&p("\\x.D D"), 100).is_no());
        assert!(solvable(&p("\\z.(\\u.z)(z z)"), 100).is_yes());
    }

    #[test]
    fn oracles() {
        let v = betav_pv_oracle(&p("x I"), 5, 200);
        let Verdict3::Yes { witness: Witness::Instance { args, trace }, .. } = &v else { panic!() };
        assert_eq!(args, &vec![Term::id()]);
        assert!(trace.end().is_value());
        let v = betav_pv_oracle(&Term::id(), 5, 200);
        let Verdict3::Yes { witness: Witness::Instance { args, .. }, .. } = &v else { panic!() };
        assert!(args.is_empty());
        assert!(betav_pv_oracle(&p(STUCK), 4, 200).is_unknown());
        assert!(betav_pv_oracle(&p("D D"), 4, 200).is_no());
        assert!(betav_solv_oracle(&p("x"), 1, 2, 200).is_yes());
        assert!(betav_solv_oracle(&p("D D"), 2, 3, 200).is_no());
        assert!(betav_solv_oracle(&p(STUCK), 1, 3, 200).is_unknown());
    }

    #[test]
    fn tuple_order() {
        assert_eq!(tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn report_json() {
        let r = Report::new(&p("I I"), "halts", &halts(&p("I I"), 10));
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "yes");
        assert_eq!(v["fuel_spent"], 1);
        assert_eq!(v["witness"]["kind"], "trace");
    }
}
