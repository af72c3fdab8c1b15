use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use serde::Serialize;

use crate::reduction::{is_step, successors, RelationId, Rule, Step, Trace};
use crate::syntax::{print_with, Path, Term, TermKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rule: Rule,
    #[serde(serialize_with = "path_str")]
    pub path: Path,
    /// Whether the pair is a head v step; the others are internal.
    pub head: bool,
}

fn path_str<S: serde::Serializer>(p: &Path, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Terms reachable from a root under a union of relations, one node per
/// α-class. Node 0 is the root.
#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub nodes: Vec<Term>,
    pub edges: Vec<Edge>,
    pub truncated: bool,
    index: HashMap<TermKey, usize>,
}

/// Breadth-first construction. At most `node_cap` nodes are kept, and
/// edges leading outside them are dropped with `truncated` set.
pub fn reduction_graph(m: &Term, rels: &[RelationId], node_cap: usize) -> ReductionGraph {
    let mut g = ReductionGraph {
        nodes: vec![m.clone()],
        edges: Vec::new(),
        truncated: false,
        index: HashMap::from([(m.key(), 0)]),
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let from = g.nodes[i].clone();
        let mut steps: Vec<Step> = rels.iter().flat_map(|&r| successors(&from, r)).collect();
        steps.sort_by(|a, b| (&a.path.0, a.rule).cmp(&(&b.path.0, b.rule)));
        steps.dedup_by(|a, b| a.path == b.path && a.rule == b.rule);
        for s in steps {
            let k = s.result.key();
            let j = match g.index.get(&k) {
                Some(&j) => j,
                None if g.nodes.len() >= node_cap => {
                    g.truncated = true;
                    continue;
                }
                None => {
                    g.index.insert(k, g.nodes.len());
                    g.nodes.push(s.result.clone());
                    queue.push_back(g.nodes.len() - 1);
                    g.nodes.len() - 1
                }
            };
            let head = is_step(&from, &s.result, RelationId::HeadV);
            g.edges.push(Edge { from: i, to: j, rule: s.rule, path: s.path, head });
        }
    }
    g
}

impl ReductionGraph {
    pub fn node_of(&self, t: &Term) -> Option<usize> {
        self.index.get(&t.key()).copied()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }

    /// Nodes without outgoing edges. Meaningless when truncated.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| !self.edges.iter().any(|e| e.from == i)).collect()
    }

    /// A shortest trace from the root to node `to`.
    pub fn path_to(&self, to: usize) -> Option<Trace> {
        let mut prev: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if i == to {
                break;
            }
            for (k, e) in self.edges.iter().enumerate() {
                if e.from == i && !seen[e.to] {
                    seen[e.to] = true;
                    prev[e.to] = Some(k);
                    queue.push_back(e.to);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut steps = Vec::new();
        let mut cur = to;
        while let Some(k) = prev[cur] {
            let e = &self.edges[k];
            steps.push(Step { rule: e.rule, path: e.path.clone(), result: self.nodes[e.to].clone() });
            cur = e.from;
        }
        steps.reverse();
        Some(Trace { start: self.nodes[0].clone(), steps })
    }

    /// Graphviz rendering: head steps solid, internal steps dashed.
    pub fn to_dot(&self, unicode: bool) -> String {
        let mut out = String::from("digraph reduction {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, t) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{} [label=\"{}\"];", i, escape(&print_with(t, unicode)));
        }
        for e in &self.edges {
            let style = if e.head { "solid" } else { "dashed" };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{} @ {}\", style={}];",
                e.from,
                e.to,
                e.rule.name(),
                e.path,
                style
            );
        }
        if self.truncated {
            out.push_str("  truncated [shape=plaintext, label=\"(truncated)\"];\n");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().map(|t| print_with(t, false)).collect::<Vec<_>>(),
            "edges": self.edges,
            "truncated": self.truncated,
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::RuleSet;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn omega_self_loop() {
        let g = reduction_graph(&p("D D"), &[RelationId::FULL_V], 10);
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.edges.len(), 1);
        assert!(g.has_edge(0, 0));
        assert!(g.edges[0].head);
    }

    #[test]
    fn value_has_no_head_steps() {
        let g = reduction_graph(&p("\\x.I x"), &[RelationId::HeadV], 10);
        assert_eq!((g.nodes.len(), g.edges.len()), (1, 0));
    }

    #[test]
    fn sigma_branching() {
        let n = p("(\\y.y')(D(x I)) I");
        let g = reduction_graph(&n, &[RelationId::HeadSigma, RelationId::Internal(RuleSet::SIGMA1)], 50);
        assert!(!g.truncated);
        assert_eq!(g.nodes.len(), 5);
        assert_eq!(g.edges.len(), 5);
        let n1 = g.node_of(&p("(\\z.(\\y.y') (z z) I)(x I)")).unwrap();
        let n0 = g.node_of(&p("(\\z.(\\y.y' I) (z z))(x I)")).unwrap();
        let e = g.edges.iter().find(|e| e.from == n1 && e.to == n0).unwrap();
        assert!(!e.head);
        assert_eq!(e.rule, Rule::Sigma1);
        assert_eq!(g.edges.iter().filter(|e| !e.head).count(), 1);
        let dot = g.to_dot(false);
        assert_eq!(dot.matches("style=dashed").count(), 1);
        assert!(dot.contains("\\\\y.y'"));
        assert_eq!(g.path_to(n0).unwrap().len(), 2);
    }

    #[test]
    fn truncation() {
        let g = reduction_graph(&p("(\\x.x x x)(\\x.x x x)"), &[RelationId::FULL_V], 3);
        assert!(g.truncated);
        assert_eq!(g.nodes.len(), 3);
    }
}
