//! Parallel reduction `=>`, internal parallel reduction `=>int` and strong
//! parallel reduction.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::reduction::{head_betav_run, head_sigma_closure, RunEnd, Trace};
use crate::syntax::{fresh_name, Name, Term, TermKey, TermSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParRule {
    BetaV,
    Sigma1,
    Sigma3,
    Lambda,
    Var,
    LambdaInt,
    VarInt,
    RightInt,
}

impl ParRule {
    pub fn name(self) -> &'static str {
        match self {
            ParRule::BetaV => "betav",
            ParRule::Sigma1 => "sigma1",
            ParRule::Sigma3 => "sigma3",
            ParRule::Lambda => "lambda",
            ParRule::Var => "var",
            ParRule::LambdaInt => "lambda-int",
            ParRule::VarInt => "var-int",
            ParRule::RightInt => "right-int",
        }
    }

    pub fn is_internal(self) -> bool {
        matches!(self, ParRule::LambdaInt | ParRule::VarInt | ParRule::RightInt)
    }
}

/// A derivation tree of `from => to` (or `from =>int to`).
#[derive(Clone, Debug)]
pub struct ParDerivation {
    pub rule: ParRule,
    pub premises: Vec<ParDerivation>,
    pub from: Term,
    pub to: Term,
}

impl ParDerivation {
    fn new(rule: ParRule, from: &Term, to: &Term, premises: Vec<ParDerivation>) -> Self {
        ParDerivation { rule, premises, from: from.clone(), to: to.clone() }
    }

    /// Re-checks the shape of every node against its rule, with the
    /// number of premises each rule demands.
    pub fn well_formed(&self) -> bool {
        let (v, args) = self.from.spine();
        let k = args.len();
        let arity_ok = match self.rule {
            ParRule::BetaV => k >= 1 && self.premises.len() == k + 1,
            ParRule::Sigma1 => k >= 2 && self.premises.len() == k + 1,
            ParRule::Sigma3 => k >= 1 && self.premises.len() == k + 2,
            ParRule::Lambda => v.is_abs() && self.premises.len() == k + 1,
            ParRule::Var => matches!(v, Term::Var(_)) && self.premises.len() == k,
            ParRule::LambdaInt => self.from.is_abs() && self.premises.len() == 1,
            ParRule::VarInt => matches!(self.from, Term::Var(_)) && self.premises.is_empty(),
            ParRule::RightInt => k >= 1 && self.premises.len() == k + 1,
        };
        let internal_ok = match self.rule {
            ParRule::RightInt => self.premises.get(1).is_some_and(|d| d.rule.is_internal()),
            _ => self.premises.iter().all(|d| !d.rule.is_internal()),
        };
        arity_ok && internal_ok && self.premises.iter().all(ParDerivation::well_formed)
    }
}

impl fmt::Display for ParDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &ParDerivation, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let arrow = if d.rule.is_internal() { "=>int" } else { "=>" };
            writeln!(f, "{}[{}] {} {} {}", "  ".repeat(depth), d.rule.name(), d.from, arrow, d.to)?;
            for p in &d.premises {
                go(p, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// Splits off the last `j` arguments: `t = P B1 ... Bj`.
fn peel(t: &Term, j: usize) -> Option<(&Term, Vec<&Term>)> {
    let mut args = Vec::with_capacity(j);
    let mut cur = t;
    for _ in 0..j {
        let Term::App(f, a) = cur else { return None };
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    Some((cur, args))
}

/// Bodies of `λx.m` and `λy.n` opened with one common binder name.
fn open_pair(x: &Name, m: &Term, y: &Name, n: &Term) -> (Term, Term) {
    if x == y {
        (m.clone(), n.clone())
    } else if !n.has_free(x) {
        (m.clone(), n.rename_free(y, x))
    } else {
        let fm = m.free_vars();
        let fnn = n.free_vars();
        let z = fresh_name(x, |c| fm.contains(c) || fnn.contains(c));
        (m.rename_free(x, &z), n.rename_free(y, &z))
    }
}

fn check_args(ms: &[&Term], ns: &[&Term]) -> Option<Vec<ParDerivation>> {
    if ms.len() != ns.len() {
        return None;
    }
    ms.iter().zip(ns).map(|(m, n)| par_check(m, n)).collect()
}

/// Finds a derivation of `m => n`, trying the rules βv, σ1, σ3, λ, var in
/// that order.
pub fn par_check(m: &Term, n: &Term) -> Option<ParDerivation> {
    let (v, args) = m.spine();
    let k = args.len();
    if let Term::Abs(x, m0) = v {
        if k >= 1 && args[0].is_value() {
            if let Some(d) = try_betav(m, n, x, m0, &args) {
                return Some(d);
            }
        }
        if k >= 2 {
            if let Some(d) = try_sigma1(m, n, x, m0, &args) {
                return Some(d);
            }
        }
    }
    if k >= 1 {
        if let Some(d) = try_sigma3(m, n, v, &args) {
            return Some(d);
        }
    }
    match v {
        Term::Abs(x, m0) => {
            let (p, rest) = peel(n, k)?;
            let Term::Abs(y, q0) = p else { return None };
            let mut prem = check_args(&args, &rest)?;
            let (mb, nb) = open_pair(x, m0, y, q0);
            prem.insert(0, par_check(&mb, &nb)?);
            Some(ParDerivation::new(ParRule::Lambda, m, n, prem))
        }
        Term::Var(x) => {
            let (p, rest) = peel(n, k)?;
            if !matches!(p, Term::Var(y) if y == x) {
                return None;
            }
            let prem = check_args(&args, &rest)?;
            Some(ParDerivation::new(ParRule::Var, m, n, prem))
        }
        Term::App(..) => unreachable!("spine head is a value"),
    }
}

// (λx.M0) V M1..Mm => M0'{V'/x} M1'..Mm'
fn try_betav(m: &Term, n: &Term, x: &Name, m0: &Term, args: &[&Term]) -> Option<ParDerivation> {
    let (p, rest) = peel(n, args.len() - 1)?;
    let tail = check_args(&args[1..], &rest)?;
    let mut en = ParEnum::new(usize::MAX);
    let vs = en.reducts(args[0]).ok()?;
    let bodies = en.reducts(m0).ok()?;
    for v2 in vs.iter() {
        for b in bodies.iter() {
            if b.substitute(x, v2).alpha_eq(p) {
                let mut prem = vec![par_check(m0, b)?, par_check(args[0], v2)?];
                prem.extend(tail);
                return Some(ParDerivation::new(ParRule::BetaV, m, n, prem));
            }
        }
    }
    None
}

// (λx.M0) N L M1..Mm => (λx.M0' L') N' M1'..Mm'
fn try_sigma1(m: &Term, n: &Term, x: &Name, m0: &Term, args: &[&Term]) -> Option<ParDerivation> {
    let (p, rest) = peel(n, args.len() - 2)?;
    let tail = check_args(&args[2..], &rest)?;
    let Term::App(lam, n2) = p else { return None };
    let Term::Abs(y, body) = &**lam else { return None };
    let Term::App(q0, l2) = &**body else { return None };
    if l2.has_free(y) {
        return None;
    }
    let (mb, nb) = open_pair(x, m0, y, q0);
    let mut prem = vec![par_check(&mb, &nb)?, par_check(args[0], n2)?, par_check(args[1], l2)?];
    prem.extend(tail);
    Some(ParDerivation::new(ParRule::Sigma1, m, n, prem))
}

// V((λx.L)N) M1..Mm => (λx.V' L')N' M1'..Mm'
fn try_sigma3(m: &Term, n: &Term, v: &Term, args: &[&Term]) -> Option<ParDerivation> {
    let Term::App(lam, narg) = args[0] else { return None };
    let Term::Abs(x, l) = &**lam else { return None };
    let (p, rest) = peel(n, args.len() - 1)?;
    let tail = check_args(&args[1..], &rest)?;
    let Term::App(lam2, n2) = p else { return None };
    let Term::Abs(y, body) = &**lam2 else { return None };
    let Term::App(v2, l2) = &**body else { return None };
    if !v2.is_value() || v2.has_free(y) {
        return None;
    }
    let (lb, nb) = open_pair(x, l, y, l2);
    let mut prem = vec![par_check(v, v2)?, par_check(narg, n2)?, par_check(&lb, &nb)?];
    prem.extend(tail);
    Some(ParDerivation::new(ParRule::Sigma3, m, n, prem))
}

/// Finds a derivation of `m =>int n`.
pub fn par_int_check(m: &Term, n: &Term) -> Option<ParDerivation> {
    match (m, n) {
        (Term::Abs(x, mb), Term::Abs(y, nb)) => {
            let (a, b) = open_pair(x, mb, y, nb);
            let d = par_check(&a, &b)?;
            Some(ParDerivation::new(ParRule::LambdaInt, m, n, vec![d]))
        }
        (Term::Var(x), Term::Var(y)) if x == y => Some(ParDerivation::new(ParRule::VarInt, m, n, vec![])),
        (Term::App(..), Term::App(..)) => {
            let (v, args) = m.spine();
            let (w, nargs) = n.spine();
            if args.len() != nargs.len() {
                return None;
            }
            let mut prem = vec![par_check(v, w)?, par_int_check(args[0], nargs[0])?];
            prem.extend(check_args(&args[1..], &nargs[1..])?);
            Some(ParDerivation::new(ParRule::RightInt, m, n, prem))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("more than {cap} reducts")]
pub struct CapExceeded {
    pub cap: usize,
}

/// All `n` with `m => n`, up to α-equivalence, in a deterministic order.
pub fn par_reducts(m: &Term, cap: usize) -> Result<Vec<Term>, CapExceeded> {
    Ok(ParEnum::new(cap).reducts(m)?.to_vec())
}

/// All `n` with `m =>int n`.
pub fn par_int_reducts(m: &Term, cap: usize) -> Result<Vec<Term>, CapExceeded> {
    Ok(ParEnum::new(cap).int_reducts(m)?.to_vec())
}

type Reducts = Arc<Vec<Term>>;

struct ParEnum {
    cap: usize,
    memo: HashMap<TermKey, Reducts>,
    int_memo: HashMap<TermKey, Reducts>,
}

impl ParEnum {
    fn new(cap: usize) -> Self {
        ParEnum { cap, memo: HashMap::new(), int_memo: HashMap::new() }
    }

    fn add(&self, out: &mut TermSet, t: Term) -> Result<(), CapExceeded> {
        out.insert(t);
        if out.len() > self.cap {
            return Err(CapExceeded { cap: self.cap });
        }
        Ok(())
    }

    /// Every choice of reducts for `args`, applied to each head.
    fn with_args(&mut self, heads: Vec<Term>, args: &[&Term], out: &mut TermSet) -> Result<(), CapExceeded> {
        let mut acc = heads;
        for a in args {
            let ra = self.reducts(a)?;
            let mut next = Vec::with_capacity(acc.len() * ra.len());
            for h in &acc {
                for r in ra.iter() {
                    next.push(Term::app(h.clone(), r.clone()));
                }
            }
            if next.len() > self.cap {
                return Err(CapExceeded { cap: self.cap });
            }
            acc = next;
        }
        for t in acc {
            self.add(out, t)?;
        }
        Ok(())
    }

    fn reducts(&mut self, m: &Term) -> Result<Reducts, CapExceeded> {
        let key = m.key();
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let mut out = TermSet::new();
        let (v, args) = m.spine();
        let k = args.len();
        match v {
            Term::Var(_) => self.with_args(vec![v.clone()], &args, &mut out)?,
            Term::Abs(x, m0) => {
                let bodies = self.reducts(m0)?;
                if k >= 1 && args[0].is_value() {
                    let vs = self.reducts(args[0])?;
                    let mut heads = Vec::new();
                    for b in bodies.iter() {
                        for v2 in vs.iter() {
                            heads.push(b.substitute(x, v2));
                        }
                    }
                    self.with_args(heads, &args[1..], &mut out)?;
                }
                if k >= 2 {
                    let ns = self.reducts(args[0])?;
                    let ls = self.reducts(args[1])?;
                    let mut heads = Vec::new();
                    for b in bodies.iter() {
                        for l2 in ls.iter() {
                            let (y, b2) = avoid(x, b, l2);
                            let lam = Term::abs_n(y, Term::app(b2, l2.clone()));
                            for n2 in ns.iter() {
                                heads.push(Term::app(lam.clone(), n2.clone()));
                            }
                        }
                    }
                    self.with_args(heads, &args[2..], &mut out)?;
                }
                let lams: Vec<Term> = bodies.iter().map(|b| Term::abs_n(x.clone(), b.clone())).collect();
                self.sigma3(v, &args, &mut out)?;
                self.with_args(lams, &args, &mut out)?;
            }
            Term::App(..) => unreachable!(),
        }
        if matches!(v, Term::Var(_)) {
            self.sigma3(v, &args, &mut out)?;
        }
        let r: Reducts = Arc::new(out.into_vec());
        self.memo.insert(key, r.clone());
        Ok(r)
    }

    fn sigma3(&mut self, v: &Term, args: &[&Term], out: &mut TermSet) -> Result<(), CapExceeded> {
        let Some(Term::App(lam, n)) = args.first() else { return Ok(()) };
        let Term::Abs(x, l) = &**lam else { return Ok(()) };
        let vs = self.reducts(v)?;
        let ls = self.reducts(l)?;
        let ns = self.reducts(n)?;
        let mut heads = Vec::new();
        for v2 in vs.iter() {
            for l2 in ls.iter() {
                let (y, l3) = avoid(x, l2, v2);
                let lam = Term::abs_n(y, Term::app(v2.clone(), l3));
                for n2 in ns.iter() {
                    heads.push(Term::app(lam.clone(), n2.clone()));
                }
            }
        }
        self.with_args(heads, &args[1..], out)
    }

    fn int_reducts(&mut self, m: &Term) -> Result<Reducts, CapExceeded> {
        let key = m.key();
        if let Some(r) = self.int_memo.get(&key) {
            return Ok(r.clone());
        }
        let mut out = TermSet::new();
        match m {
            Term::Var(_) => {
                out.insert(m.clone());
            }
            Term::Abs(x, b) => {
                for b2 in self.reducts(b)?.iter() {
                    self.add(&mut out, Term::abs_n(x.clone(), b2.clone()))?;
                }
            }
            Term::App(..) => {
                let (v, args) = m.spine();
                let vs = self.reducts(v)?;
                let firsts = self.int_reducts(args[0])?;
                let mut heads = Vec::new();
                for v2 in vs.iter() {
                    for a in firsts.iter() {
                        heads.push(Term::app(v2.clone(), a.clone()));
                    }
                }
                self.with_args(heads, &args[1..], &mut out)?;
            }
        }
        let r: Reducts = Arc::new(out.into_vec());
        self.int_memo.insert(key, r.clone());
        Ok(r)
    }
}

/// Renames binder `x` of `body` away from the free variables of `other`.
fn avoid(x: &Name, body: &Term, other: &Term) -> (Name, Term) {
    if !other.has_free(x) {
        return (x.clone(), body.clone());
    }
    let fo = other.free_vars();
    let fb = body.free_vars();
    let y = fresh_name(x, |c| fo.contains(c) || fb.contains(c));
    (y.clone(), body.rename_free(x, &y))
}

/// The factorization `m ⊸βv* m' ⊸σ* m'' =>int n`.
#[derive(Clone, Debug)]
pub struct StrongParWitness {
    pub head_betav: Trace,
    pub head_sigma: Trace,
    pub internal: ParDerivation,
}

#[derive(Clone, Debug)]
pub enum StrongPar {
    Yes(Box<StrongParWitness>),
    No,
    Unknown,
}

impl StrongPar {
    pub fn is_yes(&self) -> bool {
        matches!(self, StrongPar::Yes(_))
    }
}

/// Decides strong parallel reduction. `fuel` bounds the head βv prefix and
/// each head σ exploration.
pub fn strong_par_check(m: &Term, n: &Term, fuel: usize) -> StrongPar {
    if par_check(m, n).is_none() {
        return StrongPar::No;
    }
    let mut unknown = false;
    let found = head_factor_search(m, 0, fuel, &mut unknown, |q| par_int_check(q, n));
    match found {
        Some((head_betav, head_sigma, internal)) => {
            StrongPar::Yes(Box::new(StrongParWitness { head_betav, head_sigma, internal }))
        }
        None if unknown => StrongPar::Unknown,
        None => StrongPar::No,
    }
}

/// Walks the head βv sequence of `m` from its `min_beta`-th term on and,
/// from each term, every head σ-reduct, returning the first one accepted by
/// `accept` together with the two head traces. Sets `unknown` if a bound
/// was hit.
pub(crate) fn head_factor_search<R>(
    m: &Term,
    min_beta: usize,
    fuel: usize,
    unknown: &mut bool,
    mut accept: impl FnMut(&Term) -> Option<R>,
) -> Option<(Trace, Trace, R)> {
    let run = head_betav_run(m, fuel);
    if run.end == RunEnd::Fuel {
        *unknown = true;
    }
    for i in min_beta..run.distinct_len() {
        let p = run.trace.term(i);
        let (closure, truncated) = head_sigma_closure(p, fuel);
        *unknown |= truncated;
        for st in closure {
            if let Some(r) = accept(st.end()) {
                return Some((run.prefix(i), st, r));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn set(v: Vec<Term>) -> TermSet {
        v.into_iter().collect()
    }

    #[test]
    fn reflexive() {
        for t in ["x", "D D", "(\\y.D)(x I) D", "\\x.x (I I)", "x ((\\y.z)(z I)) D"] {
            let d = par_check(&p(t), &p(t)).unwrap();
            assert!(d.well_formed());
            assert!(par_int_check(&p(t), &p(t)).unwrap().well_formed());
        }
    }

    #[test]
    fn betav_rule() {
        let d = par_check(&p("D I"), &p("I I")).unwrap();
        assert_eq!(d.rule, ParRule::BetaV);
        assert!(d.well_formed());
        assert!(par_check(&p("D I"), &p("I")).is_none());
        // simultaneous: body and argument both reduced
        let d = par_check(&p("(\\z.z (I I))(\\w.I w)"), &p("(\\w.w) I")).unwrap();
        assert_eq!(d.rule, ParRule::BetaV);
    }

    #[test]
    fn sigma_rules() {
        let m = p("(\\x.a)((\\y.b)(z z)) c");
        let d = par_check(&m, &p("(\\x.a c)((\\y.b)(z z))")).unwrap();
        assert_eq!(d.rule, ParRule::Sigma1);
        assert_eq!(d.premises.len(), 3);
        let d = par_check(&m, &p("(\\y.(\\x.a) b)(z z) c")).unwrap();
        assert_eq!(d.rule, ParRule::Sigma3);
        assert_eq!(d.premises.len(), 4);
        assert!(d.well_formed());
    }

    #[test]
    fn diamond_pair_not_one_step() {
        let a = p("(\\x.a c)((\\y.b)(z z))");
        let b = p("(\\y.(\\x.a) b)(z z) c");
        assert!(par_check(&a, &b).is_none());
        assert!(par_check(&b, &a).is_none());
    }

    #[test]
    fn internal_checks() {
        assert_eq!(par_int_check(&p("x"), &p("x")).unwrap().rule, ParRule::VarInt);
        assert!(par_int_check(&p("I I"), &p("I")).is_none());
        let d = par_int_check(&p("\\x.D I"), &p("\\x.I I")).unwrap();
        assert_eq!(d.rule, ParRule::LambdaInt);
        assert!(par_int_check(&p("x (I D)"), &p("x D")).is_none());
        assert!(par_int_check(&p("x (I D) (I D)"), &p("x (I D) D")).is_some());
    }

    #[test]
    fn reduct_sets() {
        assert_eq!(par_reducts(&p("x"), 10).unwrap(), vec![p("x")]);
        let r = set(par_reducts(&p("D I"), 10).unwrap());
        assert_eq!(r.len(), 2);
        assert!(r.contains(&p("D I")) && r.contains(&p("I I")));
        let r = set(par_reducts(&p("(\\x.a)((\\y.b)(z z)) c"), 100).unwrap());
        assert!(r.contains(&p("(\\x.a c)((\\y.b)(z z))")));
        assert!(r.contains(&p("(\\y.(\\x.a) b)(z z) c")));
        assert!(par_reducts(&p("(\\x.a)((\\y.b)(z z)) c"), 2).is_err());
    }

    #[test]
    fn reducts_agree_with_check() {
        for t in ["I (D I) I", "(\\x.x x)((\\y.y)(z z)) (I I)", "x ((\\y.z)(z I)) D", "(\\y.D)(x I) D"] {
            let m = p(t);
            for n in par_reducts(&m, 10_000).unwrap() {
                assert!(par_check(&m, &n).is_some_and(|d| d.well_formed()), "{} => {}", m, n);
            }
            for n in par_int_reducts(&m, 10_000).unwrap() {
                assert!(par_int_check(&m, &n).is_some_and(|d| d.well_formed()), "{} =>int {}", m, n);
            }
        }
    }

    #[test]
    fn strong_parallel() {
        let StrongPar::Yes(w) = strong_par_check(&p("I I"), &Term::id(), 100) else { panic!() };
        assert_eq!(w.head_betav.len(), 1);
        assert!(w.head_sigma.is_empty());
        let StrongPar::Yes(w) = strong_par_check(&p("\\x.D I"), &p("\\x.I I"), 100) else { panic!() };
        assert!(w.head_betav.is_empty() && w.head_sigma.is_empty());
        assert!(strong_par_check(&p("x"), &p("x"), 10).is_yes());
        assert!(matches!(strong_par_check(&p("I I"), &p("x"), 10), StrongPar::No));
    }

    #[test]
    fn derivation_prints_as_tree() {
        let d = par_check(&p("D I"), &p("I I")).unwrap();
        let s = d.to_string();
        assert!(s.starts_with("[betav] (\\x.x x) (\\x.x) => (\\x.x) (\\x.x)\n"));
        assert!(s.lines().nth(1).unwrap().starts_with("  ["));
    }
}
