use std::fmt;

use super::term::Term;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, "\\", &mut s);
        f.write_str(&s)
    }
}

/// Prints with minimal parentheses, using `\` for λ.
pub fn print(t: &Term) -> String {
    t.to_string()
}

pub fn print_unicode(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, "λ", &mut s);
    s
}

pub fn print_with(t: &Term, unicode: bool) -> String {
    if unicode {
        print_unicode(t)
    } else {
        print(t)
    }
}

fn write_term(t: &Term, lam: &str, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Abs(x, b) => {
            out.push_str(lam);
            out.push_str(x);
            out.push('.');
            write_term(b, lam, out);
        }
        Term::App(f, a) => {
            if f.is_abs() {
                out.push('(');
                write_term(f, lam, out);
                out.push(')');
            } else {
                write_term(f, lam, out);
            }
            out.push(' ');
            if a.is_value() && !a.is_abs() {
                write_term(a, lam, out);
            } else {
                out.push('(');
                write_term(a, lam, out);
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn printing_examples() {
        let t = Term::abs("x", Term::app(Term::var("x"), Term::var("x")));
        assert_eq!(print(&t), "\\x.x x");
        let t = Term::apps(Term::id(), [Term::var("y"), Term::var("z")]);
        assert_eq!(print(&t), "(\\x.x) y z");
        assert_eq!(print(&Term::var("x")), "x");
    }

    #[test]
    fn nested_arguments() {
        let t = parse("x (y z) (\\u.u)").unwrap();
        assert_eq!(print(&t), "x (y z) (\\u.u)");
        assert_eq!(print_unicode(&t), "x (y z) (λu.u)");
        let t = parse("(\\y.D)(x I) D").unwrap();
        assert_eq!(print(&t), "(\\y.\\x.x x) (x (\\x.x)) (\\x.x x)");
        assert_eq!(parse(&print(&t)).unwrap(), t);
    }
}
