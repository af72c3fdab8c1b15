//! Standard sequences: checkers, sequentialization, standardization and the
//! strict standard normalizing strategy.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::parallel::head_factor_search;
use crate::reduction::{
    head_betav_run, head_redexes, head_sigma_closure, is_step, step_head_betav, successors, Outcome, RelationId,
    RunEnd, Step, Trace, TraceError,
};
use crate::syntax::{fresh_name, Name, Path, Term, TermKey};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StdVerdict {
    /// Steps before `k` are head βv, the rest head σ.
    StandardHead(usize),
    Standard,
    StandardInner,
    StrictStandardHead(usize),
    StrictStandard,
    NotStandard {
        step: usize,
        reason: String,
    },
}

impl StdVerdict {
    pub fn is_accepted(&self) -> bool {
        !matches!(self, StdVerdict::NotStandard { .. })
    }
}

impl fmt::Display for StdVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StdVerdict::StandardHead(k) => write!(f, "STANDARD-HEAD k={}", k),
            StdVerdict::Standard => f.write_str("STANDARD"),
            StdVerdict::StandardInner => f.write_str("STANDARD-INNER"),
            StdVerdict::StrictStandardHead(k) => write!(f, "STRICT-STANDARD-HEAD k={}", k),
            StdVerdict::StrictStandard => f.write_str("STRICT-STANDARD"),
            StdVerdict::NotStandard { step, reason } => write!(f, "NOT-STANDARD @ step {}: {}", step, reason),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Pred {
    Std,
    In,
}

/// Membership in the standard / standard inner sequence families, decided
/// by memoized recursion over the mutual inductive definition. Steps are
/// classified at the pair level.
struct Checker {
    strict: bool,
    memo: HashMap<(Pred, Vec<TermKey>), bool>,
}

impl Checker {
    fn new(strict: bool) -> Self {
        Checker { strict, memo: HashMap::new() }
    }

    /// Least split of a standard head sequence, if any.
    fn head_split(&self, seq: &[Term]) -> Option<usize> {
        let m = seq.len() - 1;
        let hb: Vec<bool> = (0..m).map(|i| is_step(&seq[i], &seq[i + 1], RelationId::HeadBetaV)).collect();
        let hs: Vec<bool> = (0..m).map(|i| is_step(&seq[i], &seq[i + 1], RelationId::HeadSigma)).collect();
        if self.strict && !head_redexes(&seq[m]).is_empty() {
            return None;
        }
        (0..=m).find(|&k| {
            hb[..k].iter().all(|b| *b)
                && hs[k..].iter().all(|b| *b)
                && (!self.strict || step_head_betav(&seq[k]).is_none())
        })
    }

    fn holds(&mut self, pred: Pred, seq: &[Term]) -> bool {
        let key = (pred, seq.iter().map(Term::key).collect::<Vec<_>>());
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let r = match pred {
            Pred::Std => {
                (0..seq.len()).any(|j| self.head_split(&seq[..=j]).is_some() && self.holds(Pred::In, &seq[j..]))
            }
            Pred::In => self.inner(seq),
        };
        self.memo.insert(key, r);
        r
    }

    fn inner(&mut self, seq: &[Term]) -> bool {
        if seq.len() == 1 {
            return true;
        }
        if seq.iter().all(Term::is_abs) {
            let bodies = open_all(seq);
            return self.holds(Pred::Std, &bodies);
        }
        if !seq.iter().all(Term::is_app) {
            return false;
        }
        let (funs, args): (Vec<Term>, Vec<Term>) = seq
            .iter()
            .map(|t| match t {
                Term::App(f, a) => ((**f).clone(), (**a).clone()),
                _ => unreachable!(),
            })
            .unzip();
        let n = seq.len();
        if funs[0].is_value() {
            // V0 M0 .. Vh M0 .. Vh Mm
            for h in 0..n {
                if !args[..=h].iter().all(|a| a.alpha_eq(&args[0])) {
                    break;
                }
                if !funs[h..].iter().all(|f| f.alpha_eq(&funs[h])) {
                    continue;
                }
                if self.holds(Pred::Std, &funs[..=h]) && self.holds(Pred::In, &args[h..]) {
                    return true;
                }
            }
        } else {
            // M0 L0 .. Mm L0 .. Mm Ll
            for h in 0..n {
                if !args[..=h].iter().all(|a| a.alpha_eq(&args[0])) {
                    break;
                }
                if !funs[h..].iter().all(|f| f.alpha_eq(&funs[h])) {
                    continue;
                }
                if self.holds(Pred::In, &funs[..=h]) && self.holds(Pred::Std, &args[h..]) {
                    return true;
                }
            }
        }
        false
    }
}

/// Bodies of a sequence of abstractions, renamed to a common binder.
fn open_all(seq: &[Term]) -> Vec<Term> {
    let Term::Abs(x0, _) = &seq[0] else { unreachable!() };
    let clash = |c: &str| seq.iter().any(|t| t.has_free(c));
    let z: Name = if clash(x0) { fresh_name(x0, clash) } else { x0.clone() };
    seq.iter()
        .map(|t| match t {
            Term::Abs(x, b) => b.rename_free(x, &z),
            _ => unreachable!(),
        })
        .collect()
}

fn failing_step(tr: &Trace, mut ok: impl FnMut(&[Term]) -> bool) -> StdVerdict {
    let terms = tr.terms();
    for i in 0..tr.len() {
        if !ok(&terms[..i + 2]) {
            let s = &tr.steps[i];
            let kind = if is_step(tr.term(i), &s.result, RelationId::HeadV) { "head" } else { "internal" };
            return StdVerdict::NotStandard {
                step: i,
                reason: format!("{} {} step @ {} breaks the standard order", kind, s.rule, s.path),
            };
        }
    }
    StdVerdict::NotStandard {
        step: tr.len().saturating_sub(1),
        reason: "head phase does not end in a head normal form".into(),
    }
}

pub fn check_standard_head(tr: &Trace) -> Result<StdVerdict, TraceError> {
    head_verdict(tr, false)
}

pub fn check_strict_standard_head(tr: &Trace) -> Result<StdVerdict, TraceError> {
    head_verdict(tr, true)
}

fn head_verdict(tr: &Trace, strict: bool) -> Result<StdVerdict, TraceError> {
    tr.validate()?;
    let c = Checker::new(strict);
    let terms = tr.terms();
    Ok(match c.head_split(&terms) {
        Some(k) if strict => StdVerdict::StrictStandardHead(k),
        Some(k) => StdVerdict::StandardHead(k),
        None => {
            let lax = Checker::new(false);
            failing_step(tr, |s| lax.head_split(s).is_some())
        }
    })
}

pub fn check_standard(tr: &Trace) -> Result<StdVerdict, TraceError> {
    verdict(tr, Pred::Std, false, StdVerdict::Standard)
}

pub fn check_standard_inner(tr: &Trace) -> Result<StdVerdict, TraceError> {
    verdict(tr, Pred::In, false, StdVerdict::StandardInner)
}

pub fn check_strict_standard(tr: &Trace) -> Result<StdVerdict, TraceError> {
    verdict(tr, Pred::Std, true, StdVerdict::StrictStandard)
}

fn verdict(tr: &Trace, pred: Pred, strict: bool, yes: StdVerdict) -> Result<StdVerdict, TraceError> {
    tr.validate()?;
    let mut c = Checker::new(strict);
    if c.holds(pred, &tr.terms()) {
        return Ok(yes);
    }
    let mut lax = Checker::new(false);
    Ok(failing_step(tr, |s| lax.holds(pred, s)))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StdError {
    #[error("invalid trace: {0}")]
    Trace(#[from] TraceError),
    #[error("no factorization of {from} ->* {to} found within bounds (depth {depth}, fuel {fuel})")]
    NotFound { from: String, to: String, depth: usize, fuel: usize },
}

/// The three phases `m ⊸βv* l ⊸σ* n ->int* m2`.
#[derive(Clone, Debug)]
pub struct Sequentialization {
    pub head_betav: Trace,
    pub head_sigma: Trace,
    pub internal: Trace,
}

impl Sequentialization {
    pub fn concat(&self) -> Trace {
        let mut t = self.head_betav.clone();
        t.append(self.head_sigma.clone());
        t.append(self.internal.clone());
        t
    }
}

/// Searches for a factorization of `m ->v* m2` into head βv steps, head σ
/// steps and at most `len_bound` internal steps. `fuel` bounds the head βv
/// prefix and the nodes of each search.
pub fn sequentialize(m: &Term, m2: &Term, len_bound: usize, fuel: usize) -> Result<Sequentialization, StdError> {
    let mut unknown = false;
    let target = m2.key();
    let found = head_factor_search(m, 0, fuel, &mut unknown, |q| internal_path(q, &target, len_bound, fuel));
    match found {
        Some((head_betav, head_sigma, internal)) => Ok(Sequentialization { head_betav, head_sigma, internal }),
        None => Err(StdError::NotFound { from: m.to_string(), to: m2.to_string(), depth: len_bound, fuel }),
    }
}

/// Term, the step that reached it from its parent, depth.
type Node = (Term, Option<(usize, Step)>, usize);

/// Breadth-first search along internal v-steps.
fn internal_path(from: &Term, target: &TermKey, depth: usize, fuel: usize) -> Option<Trace> {
    let mut nodes: Vec<Node> = vec![(from.clone(), None, 0)];
    let mut seen: HashSet<TermKey> = HashSet::from([from.key()]);
    let mut queue = VecDeque::from([0usize]);
    let mut hit = (&from.key() == target).then_some(0);
    while hit.is_none() {
        let Some(i) = queue.pop_front() else { break };
        if nodes[i].2 >= depth {
            continue;
        }
        for s in successors(&nodes[i].0, RelationId::INTERNAL_V) {
            let k = s.result.key();
            if !seen.insert(k.clone()) {
                continue;
            }
            let d = nodes[i].2 + 1;
            nodes.push((s.result.clone(), Some((i, s)), d));
            if &k == target {
                hit = Some(nodes.len() - 1);
                break;
            }
            queue.push_back(nodes.len() - 1);
            if nodes.len() >= fuel {
                return None;
            }
        }
    }
    let mut i = hit?;
    let mut steps = Vec::new();
    while let Some((p, s)) = &nodes[i].1 {
        steps.push(s.clone());
        i = *p;
    }
    steps.reverse();
    Some(Trace { start: from.clone(), steps })
}

/// Rearranges a reduction sequence into a standard one with the same
/// endpoints, following the inductive construction: sequentialize, then
/// recurse into the internal part by the shape of the target.
pub fn standardize(tr: &Trace, fuel: usize) -> Result<Trace, StdError> {
    tr.validate()?;
    let bound = 4 * tr.len().max(1);
    let mut s = Standardizer { bound, fuel };
    let terms = s.std_seq(&tr.start, tr.end())?;
    let mut out = Trace::from_terms(&terms)?;
    out.start = tr.start.clone();
    Ok(out)
}

struct Standardizer {
    bound: usize,
    fuel: usize,
}

impl Standardizer {
    fn not_found(&self, a: &Term, b: &Term) -> StdError {
        StdError::NotFound { from: a.to_string(), to: b.to_string(), depth: self.bound, fuel: self.fuel }
    }

    fn std_seq(&mut self, m: &Term, m2: &Term) -> Result<Vec<Term>, StdError> {
        let sq = sequentialize(m, m2, self.bound, self.fuel)?;
        let mut terms = sq.head_betav.terms();
        terms.extend(sq.head_sigma.terms().into_iter().skip(1));
        let inner = self.inner_seq(sq.internal.start.clone(), m2)?;
        terms.extend(inner.into_iter().skip(1));
        Ok(terms)
    }

    fn inner_seq(&mut self, n: Term, m2: &Term) -> Result<Vec<Term>, StdError> {
        if n.alpha_eq(m2) {
            return Ok(vec![n]);
        }
        match (&n, m2) {
            (Term::Abs(..), Term::Abs(..)) => {
                let pair = [n.clone(), m2.clone()];
                let bodies = open_all(&pair);
                let z = common_binder(&pair);
                let seq = self.std_seq(&bodies[0], &bodies[1])?;
                Ok(seq.into_iter().map(|b| Term::abs_n(z.clone(), b)).collect())
            }
            (Term::App(a, b), Term::App(a2, b2)) => {
                let (fseq, aseq) = if a.is_value() {
                    (self.inner_seq((**a).clone(), a2)?, self.inner_seq((**b).clone(), b2)?)
                } else {
                    (self.inner_seq((**a).clone(), a2)?, self.std_seq(b, b2)?)
                };
                let mut out: Vec<Term> = fseq.iter().map(|f| Term::app(f.clone(), (**b).clone())).collect();
                let last = fseq.last().expect("non-empty").clone();
                out.extend(aseq.into_iter().skip(1).map(|x| Term::app(last.clone(), x)));
                Ok(out)
            }
            _ => Err(self.not_found(&n, m2)),
        }
    }
}

fn common_binder(seq: &[Term]) -> Name {
    let Term::Abs(x0, _) = &seq[0] else { unreachable!() };
    let clash = |c: &str| seq.iter().any(|t| t.has_free(c));
    if clash(x0) {
        fresh_name(x0, clash)
    } else {
        x0.clone()
    }
}

/// Outcome of an exact existence search that may run out of fuel.
#[derive(Clone, Debug)]
pub enum Search<T> {
    Found(T),
    Absent,
    Unknown,
}

impl<T> Search<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Search::Absent)
    }
}

/// Decides whether a strict standard sequence from `m` to `n` exists. The
/// head βv phase is deterministic and must reach a head βv-normal form, and
/// head σ terminates, so the only freedom is the choice of head v-normal
/// form, after which the inner part decomposes by the shape of `n`.
pub fn strict_standard_exists(m: &Term, n: &Term, fuel: usize) -> Search<Trace> {
    match strict_std_seq(m, n, fuel) {
        Search::Found(terms) => {
            let mut tr = Trace::from_terms(&terms).expect("sequence of v-steps");
            tr.start = m.clone();
            Search::Found(tr)
        }
        Search::Absent => Search::Absent,
        Search::Unknown => Search::Unknown,
    }
}

fn strict_std_seq(m: &Term, n: &Term, fuel: usize) -> Search<Vec<Term>> {
    let run = head_betav_run(m, fuel);
    match run.end {
        RunEnd::Normal => {}
        RunEnd::Cycle => return Search::Absent,
        RunEnd::Fuel => return Search::Unknown,
    }
    let (closure, truncated) = head_sigma_closure(run.trace.end(), fuel);
    let mut unknown = truncated;
    for st in closure {
        if !head_redexes(st.end()).is_empty() {
            continue;
        }
        match strict_in_seq(st.end(), n, fuel) {
            Search::Found(rest) => {
                let mut terms = run.trace.terms();
                terms.extend(st.terms().into_iter().skip(1));
                terms.extend(rest.into_iter().skip(1));
                return Search::Found(terms);
            }
            Search::Unknown => unknown = true,
            Search::Absent => {}
        }
    }
    if unknown {
        Search::Unknown
    } else {
        Search::Absent
    }
}

fn strict_in_seq(l: &Term, n: &Term, fuel: usize) -> Search<Vec<Term>> {
    if l.alpha_eq(n) {
        return Search::Found(vec![l.clone()]);
    }
    match (l, n) {
        (Term::Abs(..), Term::Abs(..)) => {
            let pair = [l.clone(), n.clone()];
            let bodies = open_all(&pair);
            let z = common_binder(&pair);
            match strict_std_seq(&bodies[0], &bodies[1], fuel) {
                Search::Found(seq) => Search::Found(seq.into_iter().map(|b| Term::abs_n(z.clone(), b)).collect()),
                other => other,
            }
        }
        (Term::App(a, b), Term::App(a2, b2)) => {
            let (fs, xs) = if a.is_value() {
                (strict_std_seq(a, a2, fuel), strict_in_seq(b, b2, fuel))
            } else {
                (strict_in_seq(a, a2, fuel), strict_std_seq(b, b2, fuel))
            };
            match (fs, xs) {
                (Search::Found(fseq), Search::Found(aseq)) => {
                    let mut out: Vec<Term> = fseq.iter().map(|f| Term::app(f.clone(), (**b).clone())).collect();
                    let last = fseq.last().expect("non-empty").clone();
                    out.extend(aseq.into_iter().skip(1).map(|x| Term::app(last.clone(), x)));
                    Search::Found(out)
                }
                (Search::Absent, _) | (_, Search::Absent) => Search::Absent,
                _ => Search::Unknown,
            }
        }
        _ => Search::Absent,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    Normal,
    Cycle,
    Fuel,
}

/// The strict standard strategy: head βv to head βv-normal form, head σ
/// (first redex first) to head v-normal form, then the subterms left to
/// right. `fuel` bounds the total number of steps.
pub fn normalize_strict(m: &Term, fuel: usize) -> Outcome {
    let mut left = fuel;
    let (trace, stop) = strict_run(m, &mut left);
    match stop {
        Stop::Normal => Outcome::NormalForm { term: trace.end().clone(), trace },
        Stop::Cycle => Outcome::CycleDetected { entry: trace.end().clone(), trace },
        Stop::Fuel => Outcome::FuelExhausted { trace },
    }
}

fn strict_run(t: &Term, fuel: &mut usize) -> (Trace, Stop) {
    let mut tr = Trace::new(t.clone());
    let mut seen: HashSet<TermKey> = HashSet::from([t.key()]);
    while let Some(s) = successors(tr.end(), RelationId::HeadBetaV).into_iter().next() {
        if *fuel == 0 {
            return (tr, Stop::Fuel);
        }
        *fuel -= 1;
        let again = !seen.insert(s.result.key());
        tr.push(s);
        if again {
            return (tr, Stop::Cycle);
        }
    }
    while let Some(s) = successors(tr.end(), RelationId::HeadSigma).into_iter().next() {
        if *fuel == 0 {
            return (tr, Stop::Fuel);
        }
        *fuel -= 1;
        tr.push(s);
    }
    let children: Vec<(u8, Term)> = match tr.end() {
        Term::Var(_) => vec![],
        Term::Abs(_, b) => vec![(0, (**b).clone())],
        Term::App(f, a) => vec![(0, (**f).clone()), (1, (**a).clone())],
    };
    for (i, _) in children {
        let ctx = tr.end().clone();
        let prefix = Path(vec![i]);
        let sub = ctx.subterm_at(&prefix).expect("child").clone();
        let (st, stop) = strict_run(&sub, fuel);
        tr.append(st.lift(&ctx, &prefix));
        if stop != Stop::Normal {
            return (tr, stop);
        }
    }
    (tr, Stop::Normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{normalize, Rule, Strategy};
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn tr(ts: &[&str]) -> Trace {
        let terms: Vec<Term> = ts.iter().map(|s| p(s)).collect();
        Trace::from_terms(&terms).unwrap()
    }

    #[test]
    fn head_sequences() {
        assert_eq!(check_standard_head(&tr(&["D D"])).unwrap(), StdVerdict::StandardHead(0));
        let t = tr(&["I (D D) I", "I (D D) I", "(\\x.x I)(D D)"]);
        assert_eq!(check_standard_head(&t).unwrap(), StdVerdict::StandardHead(1));
        let t = tr(&["I (D D) I", "(\\x.x I)(D D)"]);
        assert_eq!(check_standard_head(&t).unwrap(), StdVerdict::StandardHead(0));
        // σ then βv
        let t = tr(&["I (D I) I", "(\\x.x I)(D I)", "(\\x.x I)(I I)"]);
        assert!(matches!(check_standard_head(&t).unwrap(), StdVerdict::NotStandard { step: 1, .. }));
    }

    #[test]
    fn standard_and_non_standard_sequences() {
        let l = "(\\y.I x)(z (D I))(I I)";
        let good = tr(&[l, "(\\y.I x)(z (D I)) I"]);
        assert_eq!(check_standard(&good).unwrap(), StdVerdict::Standard);
        let good = tr(&[
            l,
            "(\\y.I x)(z (I I))(I I)",
            "(\\y.I x)(z I)(I I)",
            "(\\y.I x (I I))(z I)",
            "(\\y.x (I I))(z I)",
            "(\\y.x I)(z I)",
        ]);
        assert_eq!(check_standard(&good).unwrap(), StdVerdict::Standard);
        let bad = tr(&[l, "(\\y.I x)(z (D I)) I", "(\\y.x)(z (D I)) I"]);
        assert!(!check_standard(&bad).unwrap().is_accepted());
        let bad = tr(&[l, "(\\y.I x (I I))(z (D I))", "(\\y.I x (I I))(z (I I))"]);
        assert!(matches!(check_standard(&bad).unwrap(), StdVerdict::NotStandard { step: 1, .. }));
    }

    #[test]
    fn plotkin_comparison() {
        let ours = tr(&["(\\z.I I)(I I)", "(\\z.I I) I", "(\\z.I) I"]);
        assert_eq!(check_standard(&ours).unwrap(), StdVerdict::Standard);
        let theirs = tr(&["(\\z.I I)(I I)", "(\\z.I)(I I)", "(\\z.I) I"]);
        assert!(!check_standard(&theirs).unwrap().is_accepted());
    }

    #[test]
    fn values_std_iff_inner() {
        let t = tr(&["\\x.I (I x)", "\\x.I x", "\\x.x"]);
        assert_eq!(check_standard(&t).unwrap(), StdVerdict::Standard);
        assert_eq!(check_standard_inner(&t).unwrap(), StdVerdict::StandardInner);
    }

    #[test]
    fn strict_examples() {
        let t = tr(&["I D I", "D I", "I I", "I"]);
        assert_eq!(check_strict_standard(&t).unwrap(), StdVerdict::StrictStandard);
        let t = tr(&["I D I", "(\\x.x I) D"]);
        assert_eq!(check_standard(&t).unwrap(), StdVerdict::Standard);
        assert!(!check_strict_standard(&t).unwrap().is_accepted());
        assert_eq!(check_strict_standard(&tr(&["\\x.D D"])).unwrap(), StdVerdict::StrictStandard);
        assert!(!check_strict_standard(&tr(&["D D"])).unwrap().is_accepted());
    }

    #[test]
    fn strict_existence() {
        assert!(strict_standard_exists(&p("I D I"), &p("(\\x.x I) D"), 100).is_absent());
        assert!(strict_standard_exists(&p("(D D)(I I)"), &p("(D D) I"), 100).is_absent());
        let Search::Found(t) = strict_standard_exists(&p("I D I"), &Term::id(), 100) else { panic!() };
        assert_eq!(t.len(), 3);
        assert_eq!(check_strict_standard(&t).unwrap(), StdVerdict::StrictStandard);
    }

    #[test]
    fn verdict_strings() {
        assert_eq!(StdVerdict::StandardHead(2).to_string(), "STANDARD-HEAD k=2");
        assert_eq!(StdVerdict::Standard.to_string(), "STANDARD");
        assert_eq!(StdVerdict::StrictStandard.to_string(), "STRICT-STANDARD");
        let v = StdVerdict::NotStandard { step: 1, reason: "x".into() };
        assert_eq!(v.to_string(), "NOT-STANDARD @ step 1: x");
    }

    #[test]
    fn sequentialize_examples() {
        let s = sequentialize(&p("(\\z.I I)(I I)"), &p("(\\z.I) I"), 4, 1000).unwrap();
        assert_eq!(s.head_betav.len(), 1);
        assert!(s.head_sigma.is_empty());
        assert_eq!(s.internal.len(), 1);
        let s = sequentialize(&p("x"), &p("x"), 4, 100).unwrap();
        assert!(s.head_betav.is_empty() && s.head_sigma.is_empty() && s.internal.is_empty());
        let n = p("(\\y.y')(D(x I)) I");
        let s = sequentialize(&n, &p("(\\z.(\\y.y' I)(z z))(x I)"), 4, 1000).unwrap();
        assert!(s.head_betav.is_empty() && s.internal.is_empty());
        assert_eq!(s.head_sigma.len(), 2);
        assert_eq!(s.head_sigma.steps[0].rule, Rule::Sigma1);
        s.concat().validate().unwrap();
    }

    #[test]
    fn standardize_examples() {
        let input = tr(&["I (D I) I", "(\\z.I (z z)) I I", "(\\z.I (z z) I) I", "(\\z.(\\x.x I)(z z)) I"]);
        let out = standardize(&input, 10_000).unwrap();
        assert!(out.end().alpha_eq(input.end()));
        assert_eq!(out.start, input.start);
        assert_eq!(check_standard(&out).unwrap(), StdVerdict::Standard);

        let input = tr(&["(\\z.I I)(I I)", "(\\z.I)(I I)", "(\\z.I) I"]);
        let out = standardize(&input, 10_000).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.steps[0].path, Path::root().child(1));
        assert_eq!(check_standard(&out).unwrap(), StdVerdict::Standard);

        let single = Trace::new(p("D D"));
        assert_eq!(standardize(&single, 100).unwrap(), single);
    }

    #[test]
    fn strict_strategy() {
        let o = normalize_strict(&p("I D I"), 100);
        let Outcome::NormalForm { term, trace } = o else { panic!() };
        assert_eq!(term, Term::id());
        assert_eq!(trace.terms(), vec![p("I D I"), p("D I"), p("I I"), p("I")]);
        assert!(normalize_strict(&p("(D D)(I I)"), 100).is_cycle());
        let Outcome::NormalForm { term, trace } = normalize_strict(&p("x"), 10) else { panic!() };
        assert_eq!(term, p("x"));
        assert!(trace.is_empty());
    }

    #[test]
    fn strict_strategy_reaches_the_normal_form() {
        for t in ["(\\y.I x)(z (D I))(I I)", "\\x.x (I (I x))", "x ((\\y.z)(z I)) D", "(\\y.y')(D(x I)) I"] {
            let Outcome::NormalForm { term, trace } = normalize_strict(&p(t), 1000) else { panic!("{}", t) };
            trace.validate().unwrap();
            assert!(successors(&term, RelationId::FULL_V).is_empty());
            assert_eq!(check_strict_standard(&trace).unwrap(), StdVerdict::StrictStandard, "{}", t);
            let ex = normalize(&p(t), RelationId::FULL_V, Strategy::Exhaustive, 10_000);
            assert!(ex.normal_form().unwrap().alpha_eq(&term));
        }
    }
}
