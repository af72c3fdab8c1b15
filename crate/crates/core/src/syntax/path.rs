use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::term::Term;

/// Position of a subterm: for an application 0 is the function and 1 the
/// argument, for an abstraction 0 is the body. The empty path is the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path(pub Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path {path} does not resolve (stopped at index {at})")]
    Unresolved { path: Path, at: usize },
    #[error("malformed path '{0}'")]
    Malformed(String),
}

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u8) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn concat(&self, rest: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(&rest.0);
        Path(v)
    }

    pub fn starts_with(&self, prefix: &Path) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// `[0, 0, ..., 0]` of the given length: the spine position of an
    /// application nested `n` times on the left.
    pub fn spine(n: usize) -> Path {
        Path(vec![0; n])
    }
}

impl From<Vec<u8>> for Path {
    fn from(v: Vec<u8>) -> Self {
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self)
    }
}

impl FromStr for Path {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Path::root());
        }
        s.split('.')
            .map(|p| match p {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(PathError::Malformed(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}

impl Term {
    pub fn subterm_at(&self, p: &Path) -> Result<&Term, PathError> {
        let mut cur = self;
        for (i, &s) in p.0.iter().enumerate() {
            cur = match (cur, s) {
                (Term::Abs(_, b), 0) => b,
                (Term::App(f, _), 0) => f,
                (Term::App(_, a), 1) => a,
                _ => return Err(PathError::Unresolved { path: p.clone(), at: i }),
            };
        }
        Ok(cur)
    }

    /// Grafts `s` at `p`. Free variables of `s` may be captured, as when
    /// filling the hole of a context.
    pub fn replace_at(&self, p: &Path, s: Term) -> Result<Term, PathError> {
        self.subterm_at(p)?;
        Ok(graft(self, &p.0, s))
    }
}

fn graft(t: &Term, p: &[u8], s: Term) -> Term {
    let Some((&first, rest)) = p.split_first() else {
        return s;
    };
    match (t, first) {
        (Term::Abs(x, b), 0) => Term::Abs(x.clone(), Arc::new(graft(b, rest, s))),
        (Term::App(f, a), 0) => Term::App(Arc::new(graft(f, rest, s)), a.clone()),
        (Term::App(f, a), 1) => Term::App(f.clone(), Arc::new(graft(a, rest, s))),
        _ => unreachable!("path checked by subterm_at"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn subterm_and_replace() {
        let t = parse("D I D").unwrap();
        assert_eq!(t.subterm_at(&Path(vec![0])).unwrap(), &parse("D I").unwrap());
        let r = t.replace_at(&Path(vec![0]), parse("I I").unwrap()).unwrap();
        assert_eq!(r, parse("(I I) D").unwrap());
        let x = parse("x").unwrap();
        assert_eq!(x.subterm_at(&Path::root()).unwrap(), &x);
    }

    #[test]
    fn unresolved_paths() {
        let t = parse("\\x.x").unwrap();
        assert!(matches!(t.subterm_at(&Path(vec![1])), Err(PathError::Unresolved { at: 0, .. })));
        assert!(t.replace_at(&Path(vec![0, 0]), parse("y").unwrap()).is_err());
    }

    #[test]
    fn replace_captures() {
        let t = parse("\\x.y").unwrap();
        let r = t.replace_at(&Path(vec![0]), parse("x").unwrap()).unwrap();
        assert_eq!(r, parse("\\x.x").unwrap());
    }

    #[test]
    fn text_form() {
        assert_eq!(Path::root().to_string(), "e");
        assert_eq!(Path(vec![0, 1, 1]).to_string(), "0.1.1");
        assert_eq!("0.1".parse::<Path>().unwrap(), Path(vec![0, 1]));
        assert_eq!("e".parse::<Path>().unwrap(), Path::root());
        assert!("0.2".parse::<Path>().is_err());
    }
}
