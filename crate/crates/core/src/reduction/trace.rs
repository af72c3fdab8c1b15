use std::fmt::Write as _;

use super::relation::{successors, RelationId, Step};
use super::rules::{contract, Rule};
use crate::syntax::{parse, print_with, Path, Term};

/// A reduction sequence: a start term and the steps taken from it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("step {index}: {rule} @ {path} is not a redex of the previous term")]
    NotARedex { index: usize, rule: Rule, path: Path },
    #[error("step {index}: recorded result {recorded} differs from contractum {expected}")]
    WrongResult { index: usize, recorded: String, expected: String },
    #[error("terms {index} and {next} are not related by a single v-step")]
    NoStep { index: usize, next: usize },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

impl Trace {
    pub fn new(start: Term) -> Trace {
        Trace { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    /// The `i`-th term of the sequence; term 0 is the start.
    pub fn term(&self, i: usize) -> &Term {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].result
        }
    }

    pub fn terms(&self) -> Vec<Term> {
        std::iter::once(self.start.clone()).chain(self.steps.iter().map(|s| s.result.clone())).collect()
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    /// Contracts the given redex of the current end term and records it.
    pub fn fire(&mut self, path: Path, rule: Rule) -> Result<(), super::RedexError> {
        let result = contract(self.end(), &path, rule)?;
        self.steps.push(Step { rule, path, result });
        Ok(())
    }

    /// Appends `other`, whose start must be α-equal to our end.
    pub fn append(&mut self, other: Trace) {
        debug_assert!(self.end().alpha_eq(&other.start));
        self.steps.extend(other.steps);
    }

    /// Lifts a trace of a subterm at `prefix` into the context `ctx`
    /// (whose subterm at `prefix` is `self.start`).
    pub fn lift(&self, ctx: &Term, prefix: &Path) -> Trace {
        let mut out = Trace::new(ctx.clone());
        for s in &self.steps {
            let result = out.end().replace_at(prefix, s.result.clone()).expect("prefix resolves");
            out.steps.push(Step { rule: s.rule, path: prefix.concat(&s.path), result });
        }
        out
    }

    /// Checks that every step is a contraction of the previous term.
    pub fn validate(&self) -> Result<(), TraceError> {
        let mut prev = &self.start;
        for (index, s) in self.steps.iter().enumerate() {
            let expected = contract(prev, &s.path, s.rule).map_err(|_| TraceError::NotARedex {
                index,
                rule: s.rule,
                path: s.path.clone(),
            })?;
            if !expected.alpha_eq(&s.result) {
                return Err(TraceError::WrongResult {
                    index,
                    recorded: s.result.to_string(),
                    expected: expected.to_string(),
                });
            }
            prev = &s.result;
        }
        Ok(())
    }

    /// Rebuilds step annotations for a list of terms, each related to the
    /// next by one v-step. Recorded results are exactly the given terms.
    pub fn from_terms(terms: &[Term]) -> Result<Trace, TraceError> {
        let mut tr = Trace::new(terms[0].clone());
        for i in 1..terms.len() {
            let k = terms[i].key();
            let step = successors(&terms[i - 1], RelationId::FULL_V)
                .into_iter()
                .find(|s| s.result.key() == k)
                .ok_or(TraceError::NoStep { index: i - 1, next: i })?;
            tr.steps.push(Step { result: terms[i].clone(), ..step });
        }
        Ok(tr)
    }

    pub fn to_text(&self, unicode: bool) -> String {
        let mut s = String::new();
        writeln!(s, "term: {}", print_with(&self.start, unicode)).unwrap();
        for st in &self.steps {
            writeln!(s, "step: {} @ {} -> {}", st.rule, st.path, print_with(&st.result, unicode)).unwrap();
        }
        s
    }

    /// Parses the line format written by [`Trace::to_text`]. Blank lines and
    /// lines starting with `#` are ignored. Steps are not validated.
    pub fn parse_text(text: &str) -> Result<Trace, TraceError> {
        let mut start = None;
        let mut steps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let fmt_err = |msg: String| TraceError::Format { line: line_no, msg };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("term:") {
                if start.is_some() {
                    return Err(fmt_err("duplicate 'term:' line".into()));
                }
                start = Some(parse(rest.trim()).map_err(|e| fmt_err(e.to_string()))?);
            } else if let Some(rest) = line.strip_prefix("step:") {
                if start.is_none() {
                    return Err(fmt_err("'step:' before 'term:'".into()));
                }
                let (lhs, rhs) = rest.split_once("->").ok_or_else(|| fmt_err("missing '->'".into()))?;
                let (rule, path) = lhs.split_once('@').ok_or_else(|| fmt_err("missing '@'".into()))?;
                let rule: Rule = rule.trim().parse().map_err(fmt_err)?;
                let path: Path = path.trim().parse().map_err(|e: crate::syntax::PathError| fmt_err(e.to_string()))?;
                let result = parse(rhs.trim()).map_err(|e| fmt_err(e.to_string()))?;
                steps.push(Step { rule, path, result });
            } else {
                return Err(fmt_err(format!("unrecognized line '{}'", line)));
            }
        }
        let start = start.ok_or(TraceError::Format { line: 0, msg: "no 'term:' line".into() })?;
        Ok(Trace { start, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let mut tr = Trace::new(p("I D I"));
        tr.fire(Path(vec![0]), Rule::BetaV).unwrap();
        tr.fire(Path::root(), Rule::BetaV).unwrap();
        let text = tr.to_text(false);
        assert_eq!(
            text,
            "term: (\\x.x) (\\x.x x) (\\x.x)\nstep: betav @ 0 -> (\\x.x x) (\\x.x)\nstep: betav @ e -> (\\x.x) (\\x.x)\n"
        );
        let back = Trace::parse_text(&text).unwrap();
        assert_eq!(back, tr);
        back.validate().unwrap();
        let uni = Trace::parse_text(&tr.to_text(true)).unwrap();
        assert_eq!(uni, tr);
    }

    #[test]
    fn validation_errors() {
        let mut tr = Trace::new(p("D I"));
        tr.steps.push(Step { rule: Rule::Sigma1, path: Path::root(), result: p("I I") });
        assert!(matches!(tr.validate(), Err(TraceError::NotARedex { index: 0, .. })));
        tr.steps[0].rule = Rule::BetaV;
        tr.steps[0].result = p("I");
        assert!(matches!(tr.validate(), Err(TraceError::WrongResult { index: 0, .. })));
    }

    #[test]
    fn from_terms_annotates() {
        let tr = Trace::from_terms(&[p("I D I"), p("D I"), p("I I"), p("I")]).unwrap();
        assert_eq!(tr.len(), 3);
        tr.validate().unwrap();
        assert!(Trace::from_terms(&[p("I D I"), p("I")]).is_err());
    }

    #[test]
    fn lifting() {
        let mut inner = Trace::new(p("I I"));
        inner.fire(Path::root(), Rule::BetaV).unwrap();
        let ctx = p("\\z.z (I I)");
        let lifted = inner.lift(&ctx, &Path(vec![0, 1]));
        lifted.validate().unwrap();
        assert_eq!(lifted.end(), &p("\\z.z I"));
        assert_eq!(lifted.steps[0].path, Path(vec![0, 1]));
    }

    #[test]
    fn parse_errors() {
        assert!(Trace::parse_text("step: betav @ e -> x").is_err());
        assert!(Trace::parse_text("term: x\nstep: beta @ e -> x").is_err());
        assert!(Trace::parse_text("term: x\nbogus").is_err());
        let t = Trace::parse_text("# comment\nterm: x\n\n").unwrap();
        assert!(t.is_empty());
    }
}
