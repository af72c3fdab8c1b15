use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::syntax::{fresh_name, Path, Term};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Rule {
    BetaV,
    Sigma1,
    Sigma3,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::BetaV, Rule::Sigma1, Rule::Sigma3];

    pub fn name(self) -> &'static str {
        match self {
            Rule::BetaV => "betav",
            Rule::Sigma1 => "sigma1",
            Rule::Sigma3 => "sigma3",
        }
    }

    pub fn is_sigma(self) -> bool {
        self != Rule::BetaV
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "betav" => Ok(Rule::BetaV),
            "sigma1" => Ok(Rule::Sigma1),
            "sigma3" => Ok(Rule::Sigma3),
            _ => Err(format!("unknown rule '{}'", s)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct RuleSet(u8);

impl RuleSet {
    pub const NONE: RuleSet = RuleSet(0);
    pub const BETA_V: RuleSet = RuleSet(1);
    pub const SIGMA1: RuleSet = RuleSet(2);
    pub const SIGMA3: RuleSet = RuleSet(4);
    pub const SIGMA: RuleSet = RuleSet(6);
    pub const V: RuleSet = RuleSet(7);

    pub fn of(r: Rule) -> RuleSet {
        match r {
            Rule::BetaV => Self::BETA_V,
            Rule::Sigma1 => Self::SIGMA1,
            Rule::Sigma3 => Self::SIGMA3,
        }
    }

    pub fn contains(self, r: Rule) -> bool {
        self.0 & Self::of(r).0 != 0
    }

    pub fn union(self, other: RuleSet) -> RuleSet {
        RuleSet(self.0 | other.0)
    }

    pub fn rules(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RuleSet::V => f.write_str("v"),
            RuleSet::SIGMA => f.write_str("sigma"),
            _ => {
                let names: Vec<_> = self.rules().map(Rule::name).collect();
                f.write_str(&names.join("+"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no {rule} redex at {path}")]
pub struct RedexError {
    pub rule: Rule,
    pub path: Path,
}

/// Root contraction. Binders are renamed only when a side condition
/// would otherwise be violated.
pub fn match_rule(t: &Term, r: Rule) -> Option<Term> {
    match r {
        Rule::BetaV => match t {
            Term::App(f, v) if v.is_value() => match &**f {
                Term::Abs(x, m) => Some(m.substitute(x, v)),
                _ => None,
            },
            _ => None,
        },
        // (λx.M)N L -> (λx.M L)N
        Rule::Sigma1 => {
            let Term::App(fnl, l) = t else { return None };
            let Term::App(lam, n) = &**fnl else { return None };
            let Term::Abs(x, m) = &**lam else { return None };
            let (x, m) = avoid_binder(x, m, l);
            Some(Term::app(Term::abs_n(x, Term::app(m, (**l).clone())), (**n).clone()))
        }
        // V((λx.L)N) -> (λx.V L)N
        Rule::Sigma3 => {
            let Term::App(v, redex) = t else { return None };
            if !v.is_value() {
                return None;
            }
            let Term::App(lam, n) = &**redex else { return None };
            let Term::Abs(x, l) = &**lam else { return None };
            let (x, l) = avoid_binder(x, l, v);
            Some(Term::app(Term::abs_n(x, Term::app((**v).clone(), l)), (**n).clone()))
        }
    }
}

/// Renames binder `x` of body `m` if it occurs free in `other`.
fn avoid_binder(x: &crate::syntax::Name, m: &Term, other: &Term) -> (crate::syntax::Name, Term) {
    if !other.has_free(x) {
        return (x.clone(), m.clone());
    }
    let fv_other = other.free_vars();
    let fv_m = m.free_vars();
    let y = fresh_name(x, |n| fv_other.contains(n) || fv_m.contains(n));
    let m2 = m.rename_free(x, &y);
    (y, m2)
}

pub fn contract(t: &Term, p: &Path, r: Rule) -> Result<Term, RedexError> {
    let err = || RedexError { rule: r, path: p.clone() };
    let sub = t.subterm_at(p).map_err(|_| err())?;
    let res = match_rule(sub, r).ok_or_else(err)?;
    Ok(t.replace_at(p, res).expect("path resolved above"))
}

/// Every redex occurrence of the given rules, in pre-order, with rules
/// at the same position ordered BetaV < Sigma1 < Sigma3.
pub fn redexes(t: &Term, rules: RuleSet) -> Vec<(Path, Rule)> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_all(t, rules, &mut path, &mut out);
    out
}

fn collect_all(t: &Term, rules: RuleSet, path: &mut Vec<u8>, out: &mut Vec<(Path, Rule)>) {
    for r in rules.rules() {
        if is_redex(t, r) {
            out.push((Path(path.clone()), r));
        }
    }
    match t {
        Term::Var(_) => {}
        Term::Abs(_, b) => {
            path.push(0);
            collect_all(b, rules, path, out);
            path.pop();
        }
        Term::App(f, a) => {
            path.push(0);
            collect_all(f, rules, path, out);
            path.pop();
            path.push(1);
            collect_all(a, rules, path, out);
            path.pop();
        }
    }
}

/// Shape test for a root redex, without building the contractum.
pub fn is_redex(t: &Term, r: Rule) -> bool {
    let Term::App(f, a) = t else { return false };
    match r {
        Rule::BetaV => f.is_abs() && a.is_value(),
        Rule::Sigma1 => matches!(&**f, Term::App(g, _) if g.is_abs()),
        Rule::Sigma3 => f.is_value() && matches!(&**a, Term::App(g, _) if g.is_abs()),
    }
}

pub fn redex_positions(t: &Term, r: Rule) -> Vec<Path> {
    redexes(t, RuleSet::of(r)).into_iter().map(|(p, _)| p).collect()
}

/// Redex occurrences fireable by the inductive head rules: βv and σ on the
/// applicative spine `V N1 ... Nn`, and recursion into `N1` (rule right).
pub fn head_redexes(t: &Term) -> Vec<(Path, Rule)> {
    let mut out = Vec::new();
    head_into(t, Vec::new(), &mut out);
    out.sort();
    out
}

fn head_into(t: &Term, prefix: Vec<u8>, out: &mut Vec<(Path, Rule)>) {
    let (v, args) = t.spine();
    let n = args.len();
    if n == 0 {
        return;
    }
    let at = |k: usize| {
        let mut p = prefix.clone();
        p.extend(std::iter::repeat_n(0, k));
        Path(p)
    };
    if v.is_abs() && args[0].is_value() {
        out.push((at(n - 1), Rule::BetaV));
    }
    if v.is_abs() && n >= 2 {
        out.push((at(n - 2), Rule::Sigma1));
    }
    if let Term::App(g, _) = args[0] {
        if g.is_abs() {
            out.push((at(n - 1), Rule::Sigma3));
        }
    }
    let mut p = at(n - 1).0;
    p.push(1);
    head_into(args[0], p, out);
}

/// The unique head βv successor, if any.
pub fn step_head_betav(t: &Term) -> Option<Term> {
    let (p, r) = head_betav_redex(t)?;
    Some(contract(t, &p, r).expect("head redex"))
}

pub fn head_betav_redex(t: &Term) -> Option<(Path, Rule)> {
    let mut prefix = Vec::new();
    let mut cur = t;
    loop {
        let (v, args) = cur.spine();
        let n = args.len();
        if n == 0 {
            return None;
        }
        if v.is_abs() && args[0].is_value() {
            prefix.extend(std::iter::repeat_n(0, n - 1));
            return Some((Path(prefix), Rule::BetaV));
        }
        prefix.extend(std::iter::repeat_n(0, n - 1));
        prefix.push(1);
        cur = args[0];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn path(v: &[u8]) -> Path {
        Path(v.to_vec())
    }

    #[test]
    fn root_rules() {
        let r = match_rule(&p("(\\x.x)(z z) y"), Rule::Sigma1).unwrap();
        assert_eq!(r, p("(\\x.x y)(z z)"));
        let r = match_rule(&p("I((\\x.x)(z z))"), Rule::Sigma3).unwrap();
        assert_eq!(r, p("(\\x.I x)(z z)"));
        assert!(match_rule(&p("(\\x.z)(y I)"), Rule::BetaV).is_none());
    }

    #[test]
    fn side_conditions_rename() {
        // x free in L
        let r = match_rule(&p("(\\x.x)(z z) x"), Rule::Sigma1).unwrap();
        assert_eq!(r.to_string(), "(\\x'.x' x) (z z)");
        // x free in V
        let r = match_rule(&p("(\\u.x)((\\x.x) y)"), Rule::Sigma3).unwrap();
        assert_eq!(r.to_string(), "(\\x'.(\\u.x) x') y");
    }

    #[test]
    fn positions() {
        let t = p("D I D");
        assert_eq!(redex_positions(&t, Rule::Sigma1), vec![path(&[])]);
        assert_eq!(redex_positions(&t, Rule::BetaV), vec![path(&[0])]);
        let t = p("D (I D) (x I)");
        assert_eq!(redex_positions(&t, Rule::Sigma1), vec![path(&[])]);
        assert_eq!(redex_positions(&t, Rule::Sigma3), vec![path(&[0])]);
        assert_eq!(redex_positions(&t, Rule::BetaV), vec![path(&[0, 1])]);
        assert!(redexes(&p("x"), RuleSet::V).is_empty());
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(contract(&p("D I"), &Path::root(), Rule::BetaV).unwrap(), p("I I"));
        let m = p("(\\y.D)(x I) D");
        assert!(contract(&m, &Path::root(), Rule::Sigma1).unwrap().alpha_eq(&p("(\\y.D D)(x I)")));
        let n = p("D((\\y.D)(x I))");
        assert!(contract(&n, &Path::root(), Rule::Sigma3).unwrap().alpha_eq(&p("(\\y.D D)(x I)")));
        assert_eq!(contract(&m, &Path::root(), Rule::BetaV), Err(RedexError { rule: Rule::BetaV, path: Path::root() }));
    }

    #[test]
    fn head_redex_examples() {
        assert_eq!(head_redexes(&p("(\\y.y')(D(x I)) I")), vec![(path(&[]), Rule::Sigma1), (path(&[0]), Rule::Sigma3)]);
        assert_eq!(
            head_redexes(&p("I (D I) I")),
            vec![(path(&[]), Rule::Sigma1), (path(&[0]), Rule::Sigma3), (path(&[0, 1]), Rule::BetaV)]
        );
        assert!(head_redexes(&p("\\x.D D")).is_empty());
    }

    #[test]
    fn head_betav_steps() {
        assert_eq!(step_head_betav(&p("D I")), Some(p("I I")));
        assert_eq!(step_head_betav(&p("I (D I) I")), Some(p("I (I I) I")));
        assert_eq!(step_head_betav(&p("(\\y.D)(x I) D")), None);
    }

    #[test]
    fn head_redexes_are_redexes() {
        let t = p("x ((\\y.z)(z I)) D (I I)");
        for (path, r) in head_redexes(&t) {
            assert!(is_redex(t.subterm_at(&path).unwrap(), r));
        }
    }
}
