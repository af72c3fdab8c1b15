//! Randomized invariants, with contraction checked against a separate
//! de Bruijn implementation of the three rules.

use proptest::prelude::*;
use shuffle_core::parallel::par_check;
use shuffle_core::reduction::{head_redexes, successors};
use shuffle_core::syntax::{print, print_unicode};
use shuffle_core::{parse, RelationId, Term};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Db {
    Bound(usize),
    Free(String),
    Lam(Box<Db>),
    App(Box<Db>, Box<Db>),
}

fn db(t: &Term, env: &mut Vec<String>) -> Db {
    match t {
        Term::Var(x) => match env.iter().rev().position(|y| **y == **x) {
            Some(i) => Db::Bound(i),
            None => Db::Free(x.to_string()),
        },
        Term::Abs(x, b) => {
            env.push(x.to_string());
            let body = db(b, env);
            env.pop();
            Db::Lam(Box::new(body))
        }
        Term::App(f, a) => Db::App(Box::new(db(f, env)), Box::new(db(a, env))),
    }
}

fn to_db(t: &Term) -> Db {
    db(t, &mut Vec::new())
}

fn shift(t: &Db, by: usize, cutoff: usize) -> Db {
    match t {
        Db::Bound(i) if *i >= cutoff => Db::Bound(i + by),
        Db::Bound(_) | Db::Free(_) => t.clone(),
        Db::Lam(b) => Db::Lam(Box::new(shift(b, by, cutoff + 1))),
        Db::App(f, a) => Db::App(Box::new(shift(f, by, cutoff)), Box::new(shift(a, by, cutoff))),
    }
}

/// Replaces index `depth` by `v` and lowers the indices above it.
fn subst(t: &Db, depth: usize, v: &Db) -> Db {
    match t {
        Db::Bound(i) if *i == depth => shift(v, depth, 0),
        Db::Bound(i) if *i > depth => Db::Bound(i - 1),
        Db::Bound(_) | Db::Free(_) => t.clone(),
        Db::Lam(b) => Db::Lam(Box::new(subst(b, depth + 1, v))),
        Db::App(f, a) => Db::App(Box::new(subst(f, depth, v)), Box::new(subst(a, depth, v))),
    }
}

fn is_value(t: &Db) -> bool {
    !matches!(t, Db::App(..))
}

fn root_reducts(t: &Db) -> Vec<Db> {
    let mut out = Vec::new();
    if let Db::App(f, a) = t {
        if let (Db::Lam(m), true) = (&**f, is_value(a)) {
            out.push(subst(m, 0, a));
        }
        if let Db::App(g, n) = &**f {
            if let Db::Lam(m) = &**g {
                let body = Db::App(m.clone(), Box::new(shift(a, 1, 0)));
                out.push(Db::App(Box::new(Db::Lam(Box::new(body))), n.clone()));
            }
        }
        if let (true, Db::App(g, n)) = (is_value(f), &**a) {
            if let Db::Lam(l) = &**g {
                let body = Db::App(Box::new(shift(f, 1, 0)), l.clone());
                out.push(Db::App(Box::new(Db::Lam(Box::new(body))), n.clone()));
            }
        }
    }
    out
}

fn all_reducts(t: &Db) -> Vec<Db> {
    let mut out = root_reducts(t);
    match t {
        Db::Bound(_) | Db::Free(_) => {}
        Db::Lam(b) => out.extend(all_reducts(b).into_iter().map(|b| Db::Lam(Box::new(b)))),
        Db::App(f, a) => {
            out.extend(all_reducts(f).into_iter().map(|f| Db::App(Box::new(f), a.clone())));
            out.extend(all_reducts(a).into_iter().map(|a| Db::App(f.clone(), Box::new(a))));
        }
    }
    out
}

fn term() -> impl Strategy<Value = Term> {
    let name = prop::sample::select(vec!["x", "y", "z"]);
    let leaf = name.clone().prop_map(Term::var);
    leaf.prop_recursive(5, 24, 2, move |inner| {
        prop_oneof![
            (name.clone(), inner.clone()).prop_map(|(x, b)| Term::abs(x, b)),
            (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a)),
        ]
    })
}

/// Renames every binder, keeping bound structure intact.
fn rename_binders(t: &Term, env: &mut Vec<(String, String)>) -> Term {
    match t {
        Term::Var(x) => match env.iter().rev().find(|(old, _)| **old == **x) {
            Some((_, new)) => Term::var(new),
            None => t.clone(),
        },
        Term::Abs(x, b) => {
            let fresh = format!("b{}", env.len());
            env.push((x.to_string(), fresh.clone()));
            let body = rename_binders(b, env);
            env.pop();
            Term::abs(&fresh, body)
        }
        Term::App(f, a) => Term::app(rename_binders(f, env), rename_binders(a, env)),
    }
}

fn sorted(mut v: Vec<Db>) -> Vec<Db> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn print_parse_round_trip(t in term()) {
        prop_assert_eq!(to_db(&parse(&print(&t)).unwrap()), to_db(&t));
        prop_assert_eq!(to_db(&parse(&print_unicode(&t)).unwrap()), to_db(&t));
    }

    #[test]
    fn steps_match_de_bruijn_rules(t in term()) {
        let got = sorted(successors(&t, RelationId::FULL_V).iter().map(|s| to_db(&s.result)).collect());
        prop_assert_eq!(got, sorted(all_reducts(&to_db(&t))));
    }

    #[test]
    fn alpha_equal_terms_step_alike(t in term()) {
        let r = rename_binders(&t, &mut Vec::new());
        prop_assert!(r.alpha_eq(&t));
        for rel in [RelationId::FULL_V, RelationId::HeadV, RelationId::INTERNAL_V, RelationId::Weak] {
            let a = sorted(successors(&t, rel).iter().map(|s| to_db(&s.result)).collect());
            let b = sorted(successors(&r, rel).iter().map(|s| to_db(&s.result)).collect());
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn head_betav_is_deterministic(t in term()) {
        prop_assert!(successors(&t, RelationId::HeadBetaV).len() <= 1);
        if t.is_value() {
            prop_assert!(head_redexes(&t).is_empty());
        }
    }

    #[test]
    fn head_and_internal_partition_steps(t in term()) {
        let full: Vec<Db> = successors(&t, RelationId::FULL_V).iter().map(|s| to_db(&s.result)).collect();
        let head: Vec<Db> = successors(&t, RelationId::HeadV).iter().map(|s| to_db(&s.result)).collect();
        for s in successors(&t, RelationId::INTERNAL_V) {
            prop_assert!(!head.contains(&to_db(&s.result)));
        }
        for h in &head {
            prop_assert!(full.contains(h));
        }
        for d in &full {
            let internal = successors(&t, RelationId::INTERNAL_V).iter().any(|s| to_db(&s.result) == *d);
            prop_assert!(internal || head.contains(d));
        }
    }

    #[test]
    fn steps_are_parallel_steps(t in term()) {
        prop_assert!(par_check(&t, &t).is_some());
        for s in successors(&t, RelationId::FULL_V) {
            prop_assert!(par_check(&t, &s.result).is_some(), "{} -> {}", t, s.result);
        }
    }

    #[test]
    fn substitution_matches_de_bruijn(m in term(), v in term()) {
        prop_assume!(v.is_value());
        let got = to_db(&m.substitute("x", &v));
        let Db::Lam(body) = to_db(&Term::abs("x", m.clone())) else { unreachable!() };
        let want = subst(&body, 0, &to_db(&v));
        prop_assert_eq!(got, want);
    }
}
