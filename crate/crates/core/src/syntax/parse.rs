use std::sync::Arc;

use super::term::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    /// Character offset into the input.
    pub pos: usize,
    pub msg: String,
}

/// Parses a term. `\` and `λ` both introduce abstractions; `I` and `D`
/// stand for λx.x and λx.xx unless bound.
pub fn parse(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, scope: Vec::new() };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty input"));
    }
    let t = p.term()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(t)
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'λ'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '\'' || c == '_'
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    scope: Vec<Name>,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { pos: self.pos, msg: msg.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<Name, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if is_ident_start(c) => {}
            Some(c) => return Err(self.err(format!("expected identifier, found '{}'", c))),
            None => return Err(self.err("expected identifier, found end of input")),
        }
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        Ok(Arc::from(self.chars[start..self.pos].iter().collect::<String>()))
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        self.skip_ws();
        if matches!(self.peek(), Some('\\') | Some('λ')) {
            self.abs()
        } else {
            self.app()
        }
    }

    fn abs(&mut self) -> Result<Term, SyntaxError> {
        self.pos += 1;
        let x = self.ident()?;
        self.skip_ws();
        if self.peek() != Some('.') {
            return Err(self.err("expected '.' after binder"));
        }
        self.pos += 1;
        self.scope.push(x.clone());
        let body = self.term();
        self.scope.pop();
        Ok(Term::abs_n(x, body?))
    }

    fn app(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('(') => acc = Term::app(acc, self.atom()?),
                Some(c) if is_ident_start(c) => acc = Term::app(acc, self.atom()?),
                // a trailing abstraction argument extends to the right
                Some('\\') | Some('λ') => acc = Term::app(acc, self.abs()?),
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if is_ident_start(c) => {
                let x = self.ident()?;
                let bound = self.scope.contains(&x);
                Ok(match &*x {
                    "I" if !bound => Term::id(),
                    "D" if !bound => Term::delta(),
                    _ => Term::Var(x),
                })
            }
            Some(c) => Err(self.err(format!("unexpected '{}'", c))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("\\x.x x").unwrap(), Term::abs("x", Term::app(Term::var("x"), Term::var("x"))));
        assert_eq!(parse("(\\x.x) y z").unwrap(), Term::apps(Term::id(), [Term::var("y"), Term::var("z")]));
        assert_eq!(parse("\\x.\\y.x").unwrap(), Term::abs("x", Term::abs("y", Term::var("x"))));
    }

    #[test]
    fn unicode_lambda_and_primes() {
        assert_eq!(parse("λy.y'").unwrap(), Term::abs("y", Term::var("y'")));
        assert_eq!(parse("λx1.x1").unwrap(), Term::abs("x1", Term::var("x1")));
    }

    #[test]
    fn abbreviations() {
        assert_eq!(parse("I").unwrap(), Term::id());
        assert_eq!(parse("D").unwrap(), Term::delta());
        assert_eq!(parse("\\I.I").unwrap(), Term::abs("I", Term::var("I")));
        assert_eq!(parse("Id").unwrap(), Term::var("Id"));
    }

    #[test]
    fn trailing_abstraction_argument() {
        assert_eq!(
            parse("f \\x.x y").unwrap(),
            Term::app(Term::var("f"), Term::abs("x", Term::app(Term::var("x"), Term::var("y"))))
        );
    }

    #[test]
    fn errors_carry_position() {
        assert_eq!(parse("(x y").unwrap_err().pos, 4);
        assert_eq!(parse("\\.x").unwrap_err().pos, 1);
        assert_eq!(parse("x )").unwrap_err().pos, 2);
        assert!(parse("").is_err());
        assert!(parse("\\x x").is_err());
    }
}
