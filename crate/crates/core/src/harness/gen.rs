use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::syntax::{print, Name, Term};

/// Largest size accepted by exhaustive enumeration.
pub const MAX_EXHAUSTIVE_SIZE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GenMode {
    Exhaustive,
    Random { seed: u64, count: usize },
}

/// Term source for the property suite. Size counts AST nodes.
#[derive(Clone, Debug, Serialize)]
pub struct TermGen {
    pub max_size: usize,
    pub free_var_pool: Vec<Name>,
    pub mode: GenMode,
}

impl TermGen {
    pub fn exhaustive(max_size: usize, pool: &[&str]) -> TermGen {
        TermGen { max_size, free_var_pool: pool.iter().map(|x| Arc::from(*x)).collect(), mode: GenMode::Exhaustive }
    }

    pub fn random(max_size: usize, pool: &[&str], seed: u64, count: usize) -> TermGen {
        TermGen {
            max_size,
            free_var_pool: pool.iter().map(|x| Arc::from(*x)).collect(),
            mode: GenMode::Random { seed, count },
        }
    }

    /// The default relational corpus: size ≤ 7 over x, y, z.
    pub fn default_corpus() -> TermGen {
        TermGen::exhaustive(7, &["x", "y", "z"])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("exhaustive enumeration is limited to size {cap}, got {requested}")]
pub struct GuardError {
    pub requested: usize,
    pub cap: usize,
}

/// Nameless shape: bound variables are de Bruijn indices, free ones index
/// the pool.
enum Shape {
    Bound(usize),
    Free(usize),
    Abs(Rc<Shape>),
    App(Rc<Shape>, Rc<Shape>),
}

struct Shapes {
    pool: usize,
    memo: HashMap<(usize, usize), Rc<Vec<Rc<Shape>>>>,
}

impl Shapes {
    /// All shapes of exactly `size` nodes under `depth` binders.
    fn of(&mut self, size: usize, depth: usize) -> Rc<Vec<Rc<Shape>>> {
        if let Some(v) = self.memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend((0..depth).map(|i| Rc::new(Shape::Bound(i))));
            out.extend((0..self.pool).map(|j| Rc::new(Shape::Free(j))));
        } else {
            for b in self.of(size - 1, depth + 1).iter() {
                out.push(Rc::new(Shape::Abs(b.clone())));
            }
            for k in 1..size.saturating_sub(1) {
                let fs = self.of(k, depth);
                let as_ = self.of(size - 1 - k, depth);
                for f in fs.iter() {
                    for a in as_.iter() {
                        out.push(Rc::new(Shape::App(f.clone(), a.clone())));
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((size, depth), out.clone());
        out
    }
}

const BINDERS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn binder_name(avoid: &BTreeSet<Name>) -> Name {
    for b in BINDERS {
        if !avoid.contains(b) {
            return Arc::from(b);
        }
    }
    (1..).map(|i| format!("x{}", i)).find(|n| !avoid.contains(n.as_str())).map(Arc::from).unwrap()
}

/// Free pool names of a shape, plus the scope names it reaches from under
/// `depth` local binders.
fn outer_names(s: &Shape, depth: usize, scope: &[Name], pool: &[Name], out: &mut BTreeSet<Name>) {
    match s {
        Shape::Bound(i) => {
            if *i >= depth {
                out.insert(scope[scope.len() - 1 - (i - depth)].clone());
            }
        }
        Shape::Free(j) => {
            out.insert(pool[*j].clone());
        }
        Shape::Abs(b) => outer_names(b, depth + 1, scope, pool, out),
        Shape::App(f, a) => {
            outer_names(f, depth, scope, pool, out);
            outer_names(a, depth, scope, pool, out);
        }
    }
}

fn name_shape(s: &Shape, scope: &mut Vec<Name>, pool: &[Name]) -> Term {
    match s {
        Shape::Bound(i) => Term::Var(scope[scope.len() - 1 - i].clone()),
        Shape::Free(j) => Term::Var(pool[*j].clone()),
        Shape::Abs(b) => {
            let mut avoid: BTreeSet<Name> = scope.iter().cloned().collect();
            outer_names(b, 1, scope, pool, &mut avoid);
            let x = binder_name(&avoid);
            scope.push(x.clone());
            let body = name_shape(b, scope, pool);
            scope.pop();
            Term::abs_n(x, body)
        }
        Shape::App(f, a) => Term::app(name_shape(f, scope, pool), name_shape(a, scope, pool)),
    }
}

/// The terms described by `gen`, in a deterministic order. Exhaustive mode
/// lists each α-class of size ≤ max_size once, smaller sizes first.
pub fn enumerate_terms(gen: &TermGen) -> Result<Box<dyn Iterator<Item = Term>>, GuardError> {
    let pool = gen.free_var_pool.clone();
    match gen.mode {
        GenMode::Exhaustive => {
            if gen.max_size > MAX_EXHAUSTIVE_SIZE {
                return Err(GuardError { requested: gen.max_size, cap: MAX_EXHAUSTIVE_SIZE });
            }
            Ok(Box::new(Exhaustive { pool, max: gen.max_size, size: 0, buf: Vec::new().into_iter() }))
        }
        GenMode::Random { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let max = gen.max_size;
            let out: Vec<Term> = (0..count)
                .filter_map(|_| {
                    let size = rng.gen_range(1..=max.max(1));
                    let s = random_shape(size, 0, pool.len(), &mut rng)?;
                    Some(name_shape(&s, &mut Vec::new(), &pool))
                })
                .collect();
            Ok(Box::new(out.into_iter()))
        }
    }
}

/// Exhaustive enumeration, one size level at a time.
struct Exhaustive {
    pool: Vec<Name>,
    max: usize,
    size: usize,
    buf: std::vec::IntoIter<Term>,
}

impl Iterator for Exhaustive {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        loop {
            if let Some(t) = self.buf.next() {
                return Some(t);
            }
            if self.size >= self.max {
                return None;
            }
            self.size += 1;
            let mut shapes = Shapes { pool: self.pool.len(), memo: HashMap::new() };
            let level: Vec<Term> =
                shapes.of(self.size, 0).iter().map(|s| name_shape(s, &mut Vec::new(), &self.pool)).collect();
            self.buf = level.into_iter();
        }
    }
}

fn random_shape(size: usize, depth: usize, pool: usize, rng: &mut ChaCha8Rng) -> Option<Shape> {
    let leaves = depth + pool;
    if size == 1 {
        if leaves == 0 {
            return None;
        }
        let i = rng.gen_range(0..leaves);
        return Some(if i < depth { Shape::Bound(i) } else { Shape::Free(i - depth) });
    }
    // with no leaves in scope an application needs two children of size ≥ 2
    let lo = if leaves == 0 { 2 } else { 1 };
    let splits = (size - 1).saturating_sub(2 * lo) + 1;
    let can_app = size > 2 * lo;
    if !can_app || rng.gen_range(0..=splits) == 0 {
        return Some(Shape::Abs(Rc::new(random_shape(size - 1, depth + 1, pool, rng)?)));
    }
    let k = rng.gen_range(lo..=size - 1 - lo);
    let f = random_shape(k, depth, pool, rng)?;
    let a = random_shape(size - 1 - k, depth, pool, rng)?;
    Some(Shape::App(Rc::new(f), Rc::new(a)))
}

/// Closed abstractions of size ≤ max_size, by size and then by printed form.
pub fn closed_values(max_size: usize) -> Vec<Term> {
    closed_terms(max_size, true)
}

/// Closed terms of size ≤ max_size, by size and then by printed form.
pub fn closed_terms(max_size: usize, values_only: bool) -> Vec<Term> {
    let mut shapes = Shapes { pool: 0, memo: HashMap::new() };
    let mut out = Vec::new();
    for size in 1..=max_size {
        let mut level: Vec<(String, Term)> = shapes
            .of(size, 0)
            .iter()
            .map(|s| name_shape(s, &mut Vec::new(), &[]))
            .filter(|t| !values_only || t.is_abs())
            .map(|t| (print(&t), t))
            .collect();
        level.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(level.into_iter().map(|(_, t)| t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, TermSet};

    fn all(gen: &TermGen) -> Vec<Term> {
        enumerate_terms(gen).unwrap().collect()
    }

    #[test]
    fn smallest_levels() {
        assert_eq!(all(&TermGen::exhaustive(1, &["x"])), vec![parse("x").unwrap()]);
        let two = all(&TermGen::exhaustive(2, &["x"]));
        let want: Vec<Term> = ["x", "\\x.x", "\\y.x"].iter().map(|s| parse(s).unwrap()).collect();
        assert_eq!(two, want);
        let three = all(&TermGen::exhaustive(3, &["x"]));
        assert!(three.contains(&parse("x x").unwrap()));
        assert!(three.contains(&parse("\\x.\\y.x").unwrap()));
    }

    // Brute-force count: all named terms over a small alphabet, deduplicated
    // modulo α.
    fn brute(size: usize, names: &[&str], free: &[&str]) -> Vec<Term> {
        fn go(size: usize, names: &[&str]) -> Vec<Term> {
            let mut out = Vec::new();
            if size == 1 {
                out.extend(names.iter().map(|n| Term::var(n)));
            }
            if size >= 2 {
                for b in go(size - 1, names) {
                    for n in names {
                        out.push(Term::abs(n, b.clone()));
                    }
                }
            }
            for k in 1..size.saturating_sub(1) {
                for f in go(k, names) {
                    for a in go(size - 1 - k, names) {
                        out.push(Term::app(f.clone(), a.clone()));
                    }
                }
            }
            out
        }
        let mut set = TermSet::new();
        for t in go(size, names) {
            if t.free_vars().iter().all(|v| free.contains(&&**v)) {
                set.insert(t);
            }
        }
        set.into_vec()
    }

    #[test]
    fn matches_brute_force() {
        // with four names and size ≤ 5 there are at most two binders, so
        // every α-class over free {x} has a representative
        for size in 1..=5 {
            let gen = TermGen::exhaustive(size, &["x"]);
            let mine: Vec<Term> = all(&gen).into_iter().filter(|t| t.size() == size).collect();
            let mut keys = TermSet::new();
            for t in &mine {
                assert!(keys.insert(t.clone()), "duplicate {}", t);
                assert_eq!(t.size(), size);
            }
            let other = brute(size, &["x", "a", "b", "c"], &["x"]);
            assert_eq!(mine.len(), other.len(), "size {}", size);
            for t in &other {
                assert!(keys.contains(t), "missing {}", t);
            }
        }
    }

    #[test]
    fn guard() {
        let g = TermGen::exhaustive(13, &["x"]);
        assert_eq!(enumerate_terms(&g).err(), Some(GuardError { requested: 13, cap: 12 }));
    }

    #[test]
    fn random_is_reproducible() {
        let g = TermGen::random(9, &["x", "y"], 7, 50);
        let a = all(&g);
        assert_eq!(a, all(&g));
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|t| t.size() <= 9));
        assert_ne!(a, all(&TermGen::random(9, &["x", "y"], 8, 50)));
    }

    #[test]
    fn closed_value_order() {
        let v = closed_values(3);
        let want: Vec<Term> = ["\\x.x", "\\x.\\y.x", "\\x.\\y.y"].iter().map(|s| parse(s).unwrap()).collect();
        assert_eq!(v, want);
        assert!(closed_values(5).iter().all(|t| t.is_closed() && t.is_abs()));
        assert!(closed_terms(5, false).iter().any(|t| t.is_app()));
    }
}
