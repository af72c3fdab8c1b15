use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

pub type Name = Arc<str>;

/// A λ-term with named binders. Children are reference counted, so cloning
/// is cheap and terms can be shared between threads.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Abs(Name, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(Arc::from(x))
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(Arc::from(x), Arc::new(body))
    }

    pub fn abs_n(x: Name, body: Term) -> Term {
        Term::Abs(x, Arc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// `head a1 a2 ... an`, associating to the left.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// λx.x
    pub fn id() -> Term {
        Term::abs("x", Term::var("x"))
    }

    /// λx.xx
    pub fn delta() -> Term {
        Term::abs("x", Term::app(Term::var("x"), Term::var("x")))
    }

    pub fn is_value(&self) -> bool {
        !matches!(self, Term::App(..))
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, Term::Abs(..))
    }

    pub fn is_app(&self) -> bool {
        matches!(self, Term::App(..))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Abs(y, b) => &**y != x && b.has_free(x),
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding substitution `self{v/x}`.
    pub fn substitute(&self, x: &str, v: &Term) -> Term {
        let fv = v.free_vars();
        subst(self, x, v, &fv)
    }

    /// Renames the free occurrences of `x` to `y`, avoiding capture.
    pub fn rename_free(&self, x: &str, y: &Name) -> Term {
        if x == &**y {
            return self.clone();
        }
        self.substitute(x, &Term::Var(y.clone()))
    }

    /// Splits `V N1 ... Nn` into its value head and argument list.
    pub fn decompose_applicative(&self) -> (Term, Vec<Term>) {
        let (head, args) = self.spine();
        (head.clone(), args.into_iter().cloned().collect())
    }

    /// Borrowing form of [`Term::decompose_applicative`].
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn key(&self) -> TermKey {
        let mut toks = Vec::with_capacity(self.size());
        let mut env: Vec<&str> = Vec::new();
        key_into(self, &mut env, &mut toks);
        TermKey(toks)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        let mut ea = Vec::new();
        let mut eb = Vec::new();
        alpha_rec(self, other, &mut ea, &mut eb)
    }
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.iter().any(|b| *b == &**x) {
                out.insert(x.clone());
            }
        }
        Term::Abs(x, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
    }
}

fn subst(t: &Term, x: &str, v: &Term, fv_v: &BTreeSet<Name>) -> Term {
    match t {
        Term::Var(y) => {
            if &**y == x {
                v.clone()
            } else {
                t.clone()
            }
        }
        Term::App(f, a) => {
            if !t.has_free(x) {
                return t.clone();
            }
            Term::app(subst(f, x, v, fv_v), subst(a, x, v, fv_v))
        }
        Term::Abs(y, body) => {
            if &**y == x || !body.has_free(x) {
                return t.clone();
            }
            if fv_v.contains(y) {
                let mut avoid = body.free_vars();
                avoid.extend(fv_v.iter().cloned());
                avoid.insert(Arc::from(x));
                let y2 = fresh_name(y, |n| avoid.contains(n));
                let body2 = subst(body, y, &Term::Var(y2.clone()), &BTreeSet::from([y2.clone()]));
                Term::abs_n(y2, subst(&body2, x, v, fv_v))
            } else {
                Term::abs_n(y.clone(), subst(body, x, v, fv_v))
            }
        }
    }
}

/// First of `x'`, `x''`, `x'''`, `x4`, `x5`, ... not rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    for i in 1.. {
        let cand = if i <= 3 { format!("{}{}", base, "'".repeat(i)) } else { format!("{}{}", base, i) };
        if !taken(&cand) {
            return Arc::from(cand);
        }
    }
    unreachable!()
}

fn alpha_rec<'a>(a: &'a Term, b: &'a Term, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let ix = ea.iter().rposition(|n| *n == &**x);
            let iy = eb.iter().rposition(|n| *n == &**y);
            match (ix, iy) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Abs(x, s), Term::Abs(y, t)) => {
            ea.push(x);
            eb.push(y);
            let r = alpha_rec(s, t, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Term::App(f, s), Term::App(g, t)) => alpha_rec(f, g, ea, eb) && alpha_rec(s, t, ea, eb),
        _ => false,
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum KeyTok {
    Abs,
    App,
    /// De Bruijn index of a bound variable.
    Bound(u32),
    Free(Name),
}

/// Nameless pre-order encoding; equal keys iff α-equal terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TermKey(pub Vec<KeyTok>);

fn key_into<'a>(t: &'a Term, env: &mut Vec<&'a str>, out: &mut Vec<KeyTok>) {
    match t {
        Term::Var(x) => match env.iter().rposition(|n| *n == &**x) {
            Some(i) => out.push(KeyTok::Bound((env.len() - 1 - i) as u32)),
            None => out.push(KeyTok::Free(x.clone())),
        },
        Term::Abs(x, b) => {
            out.push(KeyTok::Abs);
            env.push(x);
            key_into(b, env, out);
            env.pop();
        }
        Term::App(f, a) => {
            out.push(KeyTok::App);
            key_into(f, env, out);
            key_into(a, env, out);
        }
    }
}

/// Insertion-ordered set of terms up to α-equivalence.
#[derive(Clone, Default, Debug)]
pub struct TermSet {
    map: IndexMap<TermKey, Term>,
}

impl TermSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true if the term was not already present.
    pub fn insert(&mut self, t: Term) -> bool {
        let k = t.key();
        if self.map.contains_key(&k) {
            return false;
        }
        self.map.insert(k, t);
        true
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.map.contains_key(&t.key())
    }

    pub fn contains_key(&self, k: &TermKey) -> bool {
        self.map.contains_key(k)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.map.values()
    }

    pub fn keys(&self) -> impl Iterator<Item = &TermKey> {
        self.map.keys()
    }

    pub fn into_vec(self) -> Vec<Term> {
        self.map.into_values().collect()
    }
}

impl FromIterator<Term> for TermSet {
    fn from_iter<T: IntoIterator<Item = Term>>(iter: T) -> Self {
        let mut s = TermSet::new();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn names(v: &[&str]) -> BTreeSet<Name> {
        v.iter().map(|s| Arc::from(*s)).collect()
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(p("\\x.x y").free_vars(), names(&["y"]));
        assert!(p("D D").free_vars().is_empty());
        assert_eq!(p("(\\y.D)(z z)D").free_vars(), names(&["z"]));
    }

    #[test]
    fn values() {
        assert!(p("x").is_value());
        assert!(p("\\x.x x").is_value());
        assert!(!p("I I").is_value());
    }

    #[test]
    fn substitution() {
        let t = p("x x").substitute("x", &Term::delta());
        assert!(t.alpha_eq(&p("D D")));

        let t = p("\\y.x").substitute("x", &p("y"));
        assert_eq!(t.to_string(), "\\y'.y");

        let t = p("x").substitute("y", &Term::id());
        assert_eq!(t, p("x"));
    }

    #[test]
    fn substitution_under_shadowing_binder() {
        let t = p("\\x.x").substitute("x", &p("z"));
        assert_eq!(t.to_string(), "\\x.x");
        let t = p("\\y.\\y'.x y y'").substitute("x", &p("y"));
        assert!(t.alpha_eq(&p("\\a.\\b.y a b")));
    }

    #[test]
    fn alpha() {
        assert!(p("\\x.x").alpha_eq(&p("\\y.y")));
        assert!(p("\\x.x y").alpha_eq(&p("\\z.z y")));
        assert!(!p("\\x.x y").alpha_eq(&p("\\x.x z")));
        assert!(!p("\\x.\\y.x").alpha_eq(&p("\\x.\\y.y")));
        assert!(!p("\\x.y").alpha_eq(&p("\\y.y")));
        assert_eq!(p("\\x.\\y.x y").key(), p("\\a.\\b.a b").key());
        assert_ne!(p("\\x.y").key(), p("\\y.y").key());
    }

    #[test]
    fn decompose() {
        let (h, args) = p("x M N").decompose_applicative();
        assert_eq!(h, p("x"));
        assert_eq!(args, vec![p("M"), p("N")]);
        let (h, args) = p("\\x.x").decompose_applicative();
        assert_eq!(h, Term::id());
        assert!(args.is_empty());
        let (h, args) = p("(\\x.x) y").decompose_applicative();
        assert_eq!(h, Term::id());
        assert_eq!(args, vec![p("y")]);
    }

    #[test]
    fn fresh_names() {
        assert_eq!(&*fresh_name("x", |n| n == "x'"), "x''");
        assert_eq!(&*fresh_name("x", |n| n.len() < 4), "x'''");
        assert_eq!(&*fresh_name("x", |n| n.contains('\'')), "x4");
    }

    #[test]
    fn term_set_dedupes_alpha() {
        let s: TermSet = [p("\\x.x"), p("\\y.y"), p("y")].into_iter().collect();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&p("\\z.z")));
    }
}
