use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::gen::{enumerate_terms, GenMode, GuardError, TermGen};
use super::graph::{reduction_graph, ReductionGraph};
use crate::analysis::{
    betav_pv_oracle, betav_solv_oracle, halts, head_v_eval, obs_equiv_sample, potentially_valuable, solvable,
};
use crate::parallel::{
    head_factor_search, par_check, par_int_check, par_int_reducts, par_reducts, strong_par_check, ParRule, StrongPar,
};
use crate::reduction::{
    head_betav_redex, head_betav_run, is_step, normalize, redexes, step_head_betav, successors, Outcome, RelationId,
    Rule, RuleSet, RunEnd, Strategy, Trace,
};
use crate::standardization::{
    check_standard, check_strict_standard, normalize_strict, sequentialize, standardize, strict_standard_exists,
};
use crate::syntax::{parse, print, print_unicode, Term, TermKey, TermSet};

macro_rules! properties {
    ($($id:ident => $name:literal, $fixture:literal;)*) => {
        #[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
        pub enum PropertyId { $($id),* }

        impl PropertyId {
            pub const ALL: &'static [PropertyId] = &[$(PropertyId::$id),*];

            pub fn name(self) -> &'static str {
                match self { $(PropertyId::$id => $name),* }
            }

            /// Fixtures check fixed terms and ignore the corpus.
            pub fn is_fixture(self) -> bool {
                match self { $(PropertyId::$id => $fixture),* }
            }
        }
    };
}

properties! {
    Commutation => "commutation", false;
    Postponement => "postponement", false;
    KeyLemma => "key-lemma", false;
    ValueLemmas => "value-lemmas", false;
    InclusionChains => "inclusion-chains", false;
    Substitution => "substitution", false;
    Confluence => "confluence", false;
    SigmaTermination => "sigma-termination", false;
    ValuePreservation => "value-preservation", false;
    HeadDeterminism => "head-determinism", false;
    Adequacy => "adequacy", false;
    CorValue => "cor-value", false;
    HeadNormalization => "head-normalization", false;
    Conservativity => "conservativity", false;
    StrictNormalization => "strict-normalization", false;
    Soundness => "soundness", false;
    ParseRoundTrip => "parse-roundtrip", false;
    Sequentialization => "sequentialization", false;
    Standardization => "standardization", false;
    StuckCycles => "stuck-cycles", true;
    SigmaBranching => "sigma-branching", true;
    Sigma3ThenSigma1 => "sigma3-then-sigma1", true;
    Sigma1ThenSigma3 => "sigma1-then-sigma3", true;
    DiamondFailure => "diamond-failure", true;
    StrictFixtures => "strict-fixtures", true;
    HeadCoincidence => "head-coincidence", true;
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for PropertyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyId::ALL.iter().copied().find(|p| p.name() == s).ok_or_else(|| format!("unknown property '{}'", s))
    }
}

impl PropertyId {
    /// The corpus each property is meant to run on.
    pub fn default_gen(self) -> TermGen {
        match self {
            PropertyId::Sequentialization | PropertyId::Standardization => TermGen::exhaustive(5, &["x", "y", "z"]),
            PropertyId::ParseRoundTrip => TermGen::exhaustive(9, &["x", "y"]),
            _ => TermGen::default_corpus(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    /// Position in the corpus; fixtures and extra terms have none.
    pub index: Option<usize>,
    /// The offending term, printed so that it parses back.
    pub term: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub corpus_size: usize,
    /// Individual instances of the quantified statement that were checked.
    pub checked: usize,
    /// Instances a search bound left open.
    pub undecided: usize,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u128,
    pub max_size: usize,
    pub seed: Option<u64>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Aligned table with one row per report.
pub fn summary_table(reports: &[PropertyReport]) -> String {
    let mut out = format!(
        "{:<22} {:>7} {:>9} {:>9} {:>8} {:>9}  {}\n",
        "property", "corpus", "checked", "undecided", "failures", "ms", "status"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<22} {:>7} {:>9} {:>9} {:>8} {:>9}  {}\n",
            r.property.name(),
            r.corpus_size,
            r.checked,
            r.undecided,
            r.failures.len(),
            r.elapsed_ms,
            if r.passed() { "ok" } else { "FAIL" }
        ));
    }
    out
}

/// Result of checking one term.
#[derive(Clone, Debug, Default)]
pub struct Check {
    pub checked: usize,
    pub undecided: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn ok(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !cond {
            self.failures.push(msg());
        }
    }

    fn open(&mut self) {
        self.checked += 1;
        self.undecided += 1;
    }
}

/// Runs a property over the corpus of `gen`, on the current rayon pool.
/// Failures come out in corpus order.
pub fn run_property(id: PropertyId, gen: &TermGen, fuel: usize) -> Result<PropertyReport, GuardError> {
    let start = Instant::now();
    let corpus: Vec<Term> = if id.is_fixture() { Vec::new() } else { enumerate_terms(gen)?.collect() };
    let mut per_term: Vec<(Option<usize>, Check)> = if id.is_fixture() {
        vec![(None, check_fixture(id))]
    } else {
        corpus.par_iter().enumerate().map(|(i, t)| (Some(i), check_term(id, t, fuel))).collect()
    };
    if id == PropertyId::Conservativity {
        per_term.extend(conservativity_extra().iter().map(|t| (None, check_term(id, t, fuel))));
    }
    let mut total = Check::default();
    let mut failures = Vec::new();
    for (index, c) in per_term {
        total.checked += c.checked;
        total.undecided += c.undecided;
        failures.extend(c.failures.iter().map(|d| {
            let (term, detail) = split_failure(d);
            Failure { index, term, detail }
        }));
    }
    Ok(PropertyReport {
        property: id,
        corpus_size: corpus.len(),
        checked: total.checked,
        undecided: total.undecided,
        failures,
        elapsed_ms: start.elapsed().as_millis(),
        max_size: gen.max_size,
        seed: match gen.mode {
            GenMode::Random { seed, .. } => Some(seed),
            GenMode::Exhaustive => None,
        },
    })
}

/// Like `run_property` on a dedicated pool of `jobs` threads.
pub fn run_property_jobs(
    id: PropertyId,
    gen: &TermGen,
    fuel: usize,
    jobs: usize,
) -> Result<PropertyReport, GuardError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| run_property(id, gen, fuel))
}

// Failure strings are "term :: detail".
fn split_failure(s: &str) -> (String, String) {
    match s.split_once(" :: ") {
        Some((t, d)) => (t.to_string(), d.to_string()),
        None => (String::new(), s.to_string()),
    }
}

fn fail(t: &Term, detail: impl fmt::Display) -> String {
    format!("{} :: {}", print(t), detail)
}

// Bounds used inside the per-term checks.
const PAR_CAP: usize = 500;
const GRAPH_CAP: usize = 400;
const JOIN_CAP: usize = 200;
const PATH_LEN: usize = 4;

/// Checks one term against a corpus property. Replays a reported failure
/// when given its term.
pub fn check_term(id: PropertyId, t: &Term, fuel: usize) -> Check {
    let mut c = Check::default();
    match id {
        PropertyId::Commutation => commutation(t, fuel, &mut c),
        PropertyId::Postponement => postponement(t, fuel, &mut c),
        PropertyId::KeyLemma => key_lemma(t, fuel, &mut c),
        PropertyId::ValueLemmas => value_lemmas(t, fuel, &mut c),
        PropertyId::InclusionChains => inclusion_chains(t, &mut c),
        PropertyId::Substitution => substitution(t, &mut c),
        PropertyId::Confluence => confluence(t, &mut c),
        PropertyId::SigmaTermination => sigma_termination(t, &mut c),
        PropertyId::ValuePreservation => value_preservation(t, &mut c),
        PropertyId::HeadDeterminism => head_determinism(t, &mut c),
        PropertyId::Adequacy => adequacy(t, fuel, &mut c),
        PropertyId::CorValue => cor_value(t, fuel, &mut c),
        PropertyId::HeadNormalization => head_normalization(t, fuel, &mut c),
        PropertyId::Conservativity => conservativity(t, &mut c),
        PropertyId::StrictNormalization => strict_normalization(t, fuel, &mut c),
        PropertyId::Soundness => soundness(t, fuel, &mut c),
        PropertyId::ParseRoundTrip => roundtrip(t, &mut c),
        PropertyId::Sequentialization => sequentialization(t, fuel, &mut c),
        PropertyId::Standardization => standardization(t, fuel, &mut c),
        _ => c.ok(false, || fail(t, "fixture properties take no term")),
    }
    c
}

fn commutation(m: &Term, fuel: usize, c: &mut Check) {
    // one step: M ⊸σ L ⊸βv N gives M ⊸βv L' ⊸σ= N
    for s in successors(m, RelationId::HeadSigma) {
        let Some(n) = step_head_betav(&s.result) else { continue };
        let l2 = step_head_betav(m);
        let ok = l2.as_ref().is_some_and(|l2| l2.alpha_eq(&n) || is_step(l2, &n, RelationId::HeadSigma));
        c.ok(ok, || fail(m, format!("no head βv step then head σ to {}", n)));
    }
    // general form: every head v-reduct factors as ⊸βv* ⊸σ*
    let g = reduction_graph(m, &[RelationId::HeadV], 30);
    for target in g.nodes.iter().skip(1) {
        let mut unknown = false;
        let found = head_factor_search(m, 0, fuel, &mut unknown, |q| q.alpha_eq(target).then_some(()));
        match found {
            Some(_) => c.ok(true, String::new),
            None if unknown => c.open(),
            None => c.ok(false, || fail(m, format!("head reduct {} has no βv*σ* factorization", target))),
        }
    }
}

fn postponement(m: &Term, fuel: usize, c: &mut Check) {
    let Ok(ls) = par_int_reducts(m, PAR_CAP) else {
        c.open();
        return;
    };
    for l in &ls {
        let mut heads: Vec<(Term, usize)> = Vec::new();
        if let Some(n) = step_head_betav(l) {
            heads.push((n, 1));
        }
        heads.extend(successors(l, RelationId::HeadSigma).into_iter().map(|s| (s.result, 0)));
        for (n, min_beta) in heads {
            let mut unknown = false;
            let found = head_factor_search(m, min_beta, fuel, &mut unknown, |q| par_int_check(q, &n));
            match found {
                Some(_) => c.ok(true, String::new),
                None if unknown => c.open(),
                None => c.ok(false, || fail(m, format!("=>int {} then head step to {} cannot be postponed", l, n))),
            }
        }
    }
}

fn key_lemma(m: &Term, fuel: usize, c: &mut Check) {
    let Ok(ns) = par_reducts(m, PAR_CAP) else {
        c.open();
        return;
    };
    for n in &ns {
        match strong_par_check(m, n, fuel) {
            StrongPar::Yes(_) => c.ok(true, String::new),
            StrongPar::Unknown => c.open(),
            StrongPar::No => c.ok(false, || fail(m, format!("=> {} but not strongly", n))),
        }
    }
}

fn value_lemmas(m: &Term, fuel: usize, c: &mut Check) {
    if m.is_value() {
        c.ok(head_betav_redex(m).is_none(), || fail(m, "value has a head βv redex"));
        c.ok(successors(m, RelationId::HeadSigma).is_empty(), || fail(m, "value has a head σ step"));
    }
    for s in successors(m, RelationId::HeadSigma) {
        c.ok(!s.result.is_value(), || fail(m, format!("head σ step to the value {}", s.result)));
    }
    let (Ok(ps), Ok(ints)) = (par_reducts(m, PAR_CAP), par_int_reducts(m, PAR_CAP)) else {
        c.open();
        return;
    };
    for r in &ints {
        match r {
            Term::Var(_) => c.ok(m.alpha_eq(r), || fail(m, format!("=>int the variable {}", r))),
            Term::Abs(..) => c.ok(m.is_abs() && par_check(m, r).is_some_and(|d| d.rule == ParRule::Lambda), || {
                fail(m, format!("=>int the abstraction {} from a non-abstraction", r))
            }),
            Term::App(..) => {}
        }
    }
    for r in &ps {
        let (lm, lr) = (Term::abs("w", m.clone()), Term::abs("w", r.clone()));
        c.ok(par_check(&lm, &lr).is_some(), || fail(m, format!("λ-closure of => {} fails", r)));
        c.ok(par_int_check(&lm, &lr).is_some(), || fail(m, format!("λ-closure of =>int {} fails", r)));
        let strong = strong_par_check(&lm, &lr, fuel);
        c.ok(strong.is_yes(), || fail(m, format!("λ-closure of ⇛ {} fails", r)));
    }
    if m.is_value() {
        let ints: TermSet = ints.iter().cloned().collect();
        for r in &ps {
            c.ok(r.is_value() && ints.contains(r), || fail(m, format!("value => {} but not =>int", r)));
            c.ok(strong_par_check(m, r, fuel).is_yes(), || fail(m, format!("value => {} but not ⇛", r)));
        }
    }
}

/// `Some(true)` if `n` is reachable from `m`, `None` if the graph was cut.
fn reachable(m: &Term, n: &Term, rel: RelationId, cap: usize) -> Option<bool> {
    let g = reduction_graph(m, &[rel], cap);
    match g.node_of(n) {
        Some(_) => Some(true),
        None if g.truncated => None,
        None => Some(false),
    }
}

fn inclusion_chains(m: &Term, c: &mut Check) {
    for s in successors(m, RelationId::FULL_V) {
        c.ok(par_check(m, &s.result).is_some(), || fail(m, format!("->v {} is not =>", s.result)));
    }
    for s in successors(m, RelationId::INTERNAL_V) {
        c.ok(par_int_check(m, &s.result).is_some(), || fail(m, format!("->int {} is not =>int", s.result)));
    }
    let (Ok(ps), Ok(ints)) = (par_reducts(m, PAR_CAP), par_int_reducts(m, PAR_CAP)) else {
        c.open();
        return;
    };
    // A step inside the left value can coincide with the head step as a
    // pair, so internal reachability is taken by redex occurrence.
    for (rs, rel) in [(ps, RelationId::FULL_V), (ints, RelationId::OffHead(RuleSet::V))] {
        for r in &rs {
            match reachable(m, r, rel, GRAPH_CAP) {
                Some(ok) => c.ok(ok, || fail(m, format!("parallel reduct {} not reachable by {}", r, rel))),
                None => c.open(),
            }
        }
    }
}

fn substitution(m: &Term, c: &mut Check) {
    let values = ["y", "\\z.z", "\\z.x", "\\z.I z", "\\z.(\\u.u) (z z)"].map(|s| parse(s).expect("fixed value"));
    let Ok(ms) = par_reducts(m, PAR_CAP) else {
        c.open();
        return;
    };
    for v in &values {
        let vs = par_reducts(v, PAR_CAP).expect("small value");
        for m2 in &ms {
            for v2 in &vs {
                let (a, b) = (m.substitute("x", v), m2.substitute("x", v2));
                c.ok(par_check(&a, &b).is_some(), || {
                    fail(m, format!("=> {} with {} => {}: substitution fails", m2, v, v2))
                });
            }
        }
        for rel in [RelationId::HeadBetaV, RelationId::HeadSigma] {
            for s in successors(m, rel) {
                let (a, b) = (m.substitute("x", v), s.result.substitute("x", v));
                c.ok(is_step(&a, &b, rel), || {
                    fail(m, format!("{} step to {} not stable under {{{}/x}}", rel, s.result, v))
                });
            }
        }
    }
}

fn confluence(m: &Term, c: &mut Check) {
    let mut succ = TermSet::new();
    for s in successors(m, RelationId::FULL_V) {
        succ.insert(s.result);
    }
    let succ = succ.into_vec();
    let graphs: Vec<ReductionGraph> =
        succ.iter().map(|n| reduction_graph(n, &[RelationId::FULL_V], JOIN_CAP)).collect();
    for i in 0..succ.len() {
        for j in i + 1..succ.len() {
            let (a, b) = (&graphs[i], &graphs[j]);
            let joined = a.nodes.iter().any(|t| b.node_of(t).is_some());
            if joined {
                c.ok(true, String::new);
            } else if a.truncated || b.truncated {
                c.open();
            } else {
                c.ok(false, || fail(m, format!("{} and {} have no common reduct", succ[i], succ[j])));
            }
        }
    }
}

/// Whether a complete graph has a cycle.
fn has_cycle(g: &ReductionGraph) -> bool {
    let n = g.nodes.len();
    let mut indeg = vec![0usize; n];
    for e in &g.edges {
        indeg[e.to] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = queue.pop_front() {
        done += 1;
        for e in g.edges.iter().filter(|e| e.from == i) {
            indeg[e.to] -= 1;
            if indeg[e.to] == 0 {
                queue.push_back(e.to);
            }
        }
    }
    done < n
}

fn sigma_termination(m: &Term, c: &mut Check) {
    let cap = 10 * m.size() * m.size();
    let g = reduction_graph(m, &[RelationId::Full(RuleSet::SIGMA)], cap);
    c.ok(!g.truncated, || fail(m, format!("σ graph exceeds {} nodes", cap)));
    c.ok(!has_cycle(&g), || fail(m, "σ graph has a cycle"));
    let o = normalize(m, RelationId::Full(RuleSet::SIGMA), Strategy::Exhaustive, cap);
    c.ok(o.normal_form().is_some(), || fail(m, "σ normalization did not finish"));
}

fn value_preservation(m: &Term, c: &mut Check) {
    for rs in [RuleSet::BETA_V, RuleSet::SIGMA1, RuleSet::SIGMA3, RuleSet::SIGMA, RuleSet::V] {
        for s in successors(m, RelationId::Full(rs)) {
            if let Term::Abs(x, b) = m {
                let inner = match &s.result {
                    Term::Abs(y, b2) if y == x => is_step(b, b2, RelationId::Full(rs)),
                    _ => false,
                };
                c.ok(inner, || fail(m, format!("{} step to {} does not stay under the λ", rs, s.result)));
            } else if rs != RuleSet::BETA_V && rs != RuleSet::V {
                c.ok(!s.result.is_value(), || fail(m, format!("{} expansion of the value {}", rs, s.result)));
            }
        }
        if let Term::Var(_) = m {
            c.ok(successors(m, RelationId::Full(rs)).is_empty(), || fail(m, "variable reduces"));
        }
    }
}

fn head_determinism(m: &Term, c: &mut Check) {
    let hb = successors(m, RelationId::HeadBetaV);
    c.ok(hb.len() <= 1, || fail(m, format!("{} head βv steps", hb.len())));
    let hs = successors(m, RelationId::HeadSigma);
    let hv = successors(m, RelationId::HeadV);
    c.ok(hv.len() == hb.len() + hs.len(), || fail(m, "head v is not head βv plus head σ"));
    for s in &hv {
        c.ok(is_step(m, &s.result, RelationId::FULL_V), || {
            fail(m, format!("head step to {} is not a v step", s.result))
        });
        c.ok(!is_step(m, &s.result, RelationId::INTERNAL_V), || {
            fail(m, format!("{} is both head and internal", s.result))
        });
    }
}

fn adequacy(m: &Term, fuel: usize, c: &mut Check) {
    let h = halts(m, fuel).decided();
    for s in successors(m, RelationId::FULL_V) {
        match (h, halts(&s.result, fuel).decided()) {
            (Some(a), Some(b)) => c.ok(a == b, || fail(m, format!("halting differs from its reduct {}", s.result))),
            _ => c.open(),
        }
    }
}

fn cor_value(m: &Term, fuel: usize, c: &mut Check) {
    let g = reduction_graph(m, &[RelationId::FULL_V], GRAPH_CAP);
    let h = halts(m, fuel);
    for v in g.nodes.iter().filter(|t| t.is_value()) {
        match h.value() {
            Some(v0) => match reachable(v0, v, RelationId::INTERNAL_V, GRAPH_CAP) {
                Some(ok) => c.ok(ok, || fail(m, format!("{} not internal reduct of evaluation result {}", v, v0))),
                None => c.open(),
            },
            None if h.is_unknown() => c.open(),
            None => c.ok(false, || fail(m, format!("reaches the value {} but does not halt", v))),
        }
    }
    match head_v_eval(m, fuel) {
        Err(e) => c.ok(false, || fail(m, e)),
        Ok(hv) => match (hv.value(), h.value()) {
            (Some(a), Some(b)) => c.ok(a.alpha_eq(b), || fail(m, format!("head v value {} vs head βv value {}", a, b))),
            _ if hv.is_unknown() || h.is_unknown() => c.open(),
            (a, b) => c.ok(a.is_none() && b.is_none(), || fail(m, "head v and head βv disagree on reaching a value")),
        },
    }
}

fn head_normalization(m: &Term, fuel: usize, c: &mut Check) {
    let weak = match normalize(m, RelationId::HeadV, Strategy::Exhaustive, fuel) {
        Outcome::NormalForm { .. } => Some(true),
        Outcome::CycleDetected { .. } => Some(false),
        Outcome::FuelExhausted { .. } => None,
    };
    let betav = match head_betav_run(m, fuel).end {
        RunEnd::Normal => Some(true),
        RunEnd::Cycle => Some(false),
        RunEnd::Fuel => None,
    };
    let g = reduction_graph(m, &[RelationId::HeadV], GRAPH_CAP);
    let strong = if g.truncated { None } else { Some(!has_cycle(&g)) };
    let all = [weak, betav, strong];
    if all.iter().any(Option::is_none) {
        c.open();
    }
    let decided: Vec<bool> = all.iter().flatten().copied().collect();
    c.ok(decided.windows(2).all(|w| w[0] == w[1]), || {
        fail(m, format!("head normalizable {:?}, head βv {:?}, strongly {:?}", weak, betav, strong))
    });
}

const ORACLE_VAL_SIZE: usize = 5;
const ORACLE_ARGS: usize = 2;
const ORACLE_ARG_SIZE: usize = 4;
const ORACLE_FUEL: usize = 2000;

/// Larger terms whose weak or stratified reduction diverges, so that the
/// `No` side of the comparison is exercised.
pub fn conservativity_extra() -> Vec<Term> {
    [
        "(\\y.D)(x I) D",
        "D ((\\y.D)(x I))",
        "D D",
        "\\x.D D",
        "x (D D)",
        "(\\x.D D) (y I)",
        "\\x.x (D D)",
        "(\\x.x) (D D)",
    ]
    .iter()
    .map(|s| parse(s).expect("fixed term"))
    .collect()
}

fn conservativity(m: &Term, c: &mut Check) {
    let fuel = ORACLE_FUEL;
    let pv = potentially_valuable(m, fuel);
    if pv.is_unknown() {
        c.open();
    } else if pv.is_no() || m.is_closed() {
        let o = betav_pv_oracle(m, ORACLE_VAL_SIZE, fuel);
        if o.is_unknown() {
            c.open();
        } else {
            c.ok(o.decided() == pv.decided(), || {
                fail(m, format!("potentially valuable: {} but βv oracle {}", pv.label(), o.label()))
            });
        }
    }
    let sv = solvable(m, fuel);
    if sv.is_unknown() {
        c.open();
    } else if sv.is_no() || m.is_closed() {
        let o = betav_solv_oracle(m, ORACLE_ARGS, ORACLE_ARG_SIZE, fuel);
        if o.is_unknown() {
            c.open();
        } else {
            c.ok(o.decided() == sv.decided(), || {
                fail(m, format!("solvable: {} but βv oracle {}", sv.label(), o.label()))
            });
        }
    }
}

fn strict_normalization(m: &Term, fuel: usize, c: &mut Check) {
    let Outcome::NormalForm { term: nf, .. } = normalize(m, RelationId::FULL_V, Strategy::Exhaustive, fuel) else {
        return;
    };
    match normalize_strict(m, fuel) {
        Outcome::NormalForm { term, trace } => {
            c.ok(term.alpha_eq(&nf), || fail(m, format!("strict strategy ends at {}, normal form is {}", term, nf)));
            let ok = trace.validate().is_ok() && check_strict_standard(&trace).is_ok_and(|v| v.is_accepted());
            c.ok(ok, || fail(m, "strict strategy trace is not strict standard"));
        }
        Outcome::FuelExhausted { .. } => c.open(),
        Outcome::CycleDetected { .. } => c.ok(false, || fail(m, "strict strategy cycles on a normalizable term")),
    }
}

fn soundness(m: &Term, fuel: usize, c: &mut Check) {
    for s in successors(m, RelationId::FULL_V) {
        let v = obs_equiv_sample(m, &s.result, 40, 4, fuel.min(200));
        c.ok(!v.is_no(), || fail(m, format!("a context separates it from its reduct {}", s.result)));
    }
}

fn roundtrip(m: &Term, c: &mut Check) {
    for text in [print(m), print_unicode(m)] {
        c.ok(parse(&text).is_ok_and(|t| &t == m), || fail(m, format!("'{}' does not parse back", text)));
    }
}

/// Every →v path of length 1..=len from `m`.
fn paths(m: &Term, len: usize) -> Vec<Trace> {
    let mut out = Vec::new();
    let mut stack = vec![Trace::new(m.clone())];
    while let Some(tr) = stack.pop() {
        if tr.len() >= len {
            continue;
        }
        for s in successors(tr.end(), RelationId::FULL_V) {
            let mut next = tr.clone();
            next.push(s);
            out.push(next.clone());
            stack.push(next);
        }
    }
    out
}

fn sequentialization(m: &Term, fuel: usize, c: &mut Check) {
    let mut ends: HashSet<TermKey> = HashSet::new();
    for tr in paths(m, PATH_LEN) {
        if !ends.insert(tr.end().key()) {
            continue;
        }
        match sequentialize(m, tr.end(), 4 * PATH_LEN, fuel) {
            Ok(sq) => {
                let all = |t: &Trace, rel| t.terms().windows(2).all(|w| is_step(&w[0], &w[1], rel));
                let whole = sq.concat();
                let ok = whole.validate().is_ok()
                    && whole.start.alpha_eq(m)
                    && whole.end().alpha_eq(tr.end())
                    && all(&sq.head_betav, RelationId::HeadBetaV)
                    && all(&sq.head_sigma, RelationId::HeadSigma)
                    && all(&sq.internal, RelationId::INTERNAL_V);
                c.ok(ok, || fail(m, format!("bad factorization to {}", tr.end())));
            }
            Err(e) => c.ok(false, || fail(m, e)),
        }
    }
}

fn standardization(m: &Term, fuel: usize, c: &mut Check) {
    for tr in paths(m, PATH_LEN) {
        match standardize(&tr, fuel) {
            Ok(out) => {
                let ok = out.start.alpha_eq(m)
                    && out.end().alpha_eq(tr.end())
                    && check_standard(&out).is_ok_and(|v| v.is_accepted());
                c.ok(ok, || fail(m, format!("standardized trace for {} is not standard", tr.to_text(false).trim())));
            }
            Err(e) => c.ok(false, || fail(m, e)),
        }
    }
}

fn p(s: &str) -> Term {
    parse(s).expect("fixture term")
}

fn check_fixture(id: PropertyId) -> Check {
    let mut c = Check::default();
    match id {
        PropertyId::StuckCycles => {
            let target = p("(\\y.D D)(x I)");
            for s in ["(\\y.D)(x I) D", "D ((\\y.D)(x I))"] {
                let t = p(s);
                let o = normalize(&t, RelationId::FULL_V, Strategy::Leftmost, 3);
                let ok = matches!(&o, Outcome::CycleDetected { entry, trace } if entry.alpha_eq(&target) && trace.len() <= 3);
                c.ok(ok, || fail(&t, "no cycle through (λy.ΔΔ)(xI) within 3 steps"));
                c.ok(redexes(&t, RuleSet::BETA_V).is_empty(), || fail(&t, "has a βv redex"));
            }
        }
        PropertyId::SigmaBranching => sigma_branching(&mut c),
        PropertyId::Sigma3ThenSigma1 => {
            sigma_order(&mut c, "x ((\\y.z')(z I)) D", "(\\y.x z' D)(z I)", [Rule::Sigma3, Rule::Sigma1])
        }
        PropertyId::Sigma1ThenSigma3 => {
            sigma_order(&mut c, "x ((\\y.z')(z I) D)", "(\\y.x (z' D))(z I)", [Rule::Sigma1, Rule::Sigma3])
        }
        PropertyId::DiamondFailure => {
            let src = p("(\\x.a)((\\y.b)(z z)) c");
            let m1 = p("(\\x.a c)((\\y.b)(z z))");
            let m2 = p("(\\y.(\\x.a) b)(z z) c");
            c.ok(par_check(&src, &m1).is_some(), || fail(&src, "does not => its σ1 reduct"));
            c.ok(par_check(&src, &m2).is_some(), || fail(&src, "does not => its σ3 reduct"));
            let a: TermSet = par_reducts(&m1, PAR_CAP).expect("small").into_iter().collect();
            let b = par_reducts(&m2, PAR_CAP).expect("small");
            c.ok(!b.iter().any(|t| a.contains(t)), || fail(&src, "the two parallel reducts have a common => reduct"));
            let g1 = reduction_graph(&m1, &[RelationId::FULL_V], 50);
            let joined = reduction_graph(&m2, &[RelationId::FULL_V], 50).nodes.iter().any(|t| g1.node_of(t).is_some());
            c.ok(joined, || fail(&src, "the two reducts are not ->v joinable"));
        }
        PropertyId::StrictFixtures => strict_fixtures(&mut c),
        PropertyId::HeadCoincidence => {
            // =>int reduct whose only ->v step is also a head step as a pair
            let m = p("(\\x.(\\y.y) x) x");
            let n = p("(\\x.x) x");
            c.ok(par_int_check(&m, &n).is_some(), || fail(&m, "does not =>int (λx.x)x"));
            c.ok(successors(&m, RelationId::INTERNAL_V).is_empty(), || fail(&m, "has a pair-level internal step"));
            c.ok(is_step(&m, &n, RelationId::HeadBetaV), || fail(&m, "head βv step does not reach (λx.x)x"));
            c.ok(is_step(&m, &n, RelationId::OffHead(RuleSet::V)), || fail(&m, "no off-head step to (λx.x)x"));
        }
        _ => c.ok(false, || format!("{} is not a fixture", id)),
    }
    c
}

fn sigma_branching(c: &mut Check) {
    let n = p("(\\y.y')(D (x I)) I");
    let names = [
        ("N", "(\\y.y')(D (x I)) I"),
        ("N0", "(\\y.y' I)(D (x I))"),
        ("N1", "(\\x.(\\y.y')(x x))(x I) I"),
        ("N'0", "(\\x.(\\y.y' I)(x x))(x I)"),
        ("N'1", "(\\x.(\\y.y')(x x) I)(x I)"),
    ];
    // (from, to, rule, head)
    let edges = [
        ("N", "N0", Rule::Sigma1, true),
        ("N", "N1", Rule::Sigma3, true),
        ("N0", "N'0", Rule::Sigma3, true),
        ("N1", "N'1", Rule::Sigma1, true),
        ("N'1", "N'0", Rule::Sigma1, false),
    ];
    let g = reduction_graph(&n, &[RelationId::HeadSigma, RelationId::Internal(RuleSet::SIGMA1)], 100);
    let idx: HashMap<&str, Option<usize>> = names.iter().map(|(k, s)| (*k, g.node_of(&p(s)))).collect();
    c.ok(!g.truncated && g.nodes.len() == names.len(), || fail(&n, format!("{} nodes", g.nodes.len())));
    c.ok(idx.values().all(Option::is_some), || fail(&n, "an expected node is missing"));
    if idx.values().any(Option::is_none) {
        return;
    }
    let mut got: Vec<(usize, usize, Rule, bool)> = g.edges.iter().map(|e| (e.from, e.to, e.rule, e.head)).collect();
    let mut want: Vec<(usize, usize, Rule, bool)> =
        edges.iter().map(|(a, b, r, h)| (idx[a].unwrap(), idx[b].unwrap(), *r, *h)).collect();
    got.sort();
    want.sort();
    c.ok(got == want, || fail(&n, format!("edges {:?}", got)));
}

/// Head steps of a single rule.
fn head_rule_closure(t: &Term, rule: Rule) -> TermSet {
    let mut seen = TermSet::new();
    seen.insert(t.clone());
    let mut queue = VecDeque::from([t.clone()]);
    while let Some(u) = queue.pop_front() {
        for s in successors(&u, RelationId::HeadSigma).into_iter().filter(|s| s.rule == rule) {
            if seen.insert(s.result.clone()) {
                queue.push_back(s.result);
            }
        }
    }
    seen
}

fn sigma_order(c: &mut Check, m: &str, n: &str, order: [Rule; 2]) {
    let (m, n) = (p(m), p(n));
    let first = successors(&m, RelationId::HeadSigma);
    let exists = first.iter().filter(|s| s.rule == order[0]).any(|s| {
        successors(&s.result, RelationId::HeadSigma).iter().any(|s2| s2.rule == order[1] && s2.result.alpha_eq(&n))
    });
    c.ok(exists, || fail(&m, format!("no head {} then head {} sequence to {}", order[0], order[1], n)));
    let reversed = head_rule_closure(&m, order[1]).iter().any(|l| head_rule_closure(l, order[0]).contains(&n));
    c.ok(!reversed, || fail(&m, format!("head {}* then head {}* reaches {}", order[1], order[0], n)));
}

fn strict_fixtures(c: &mut Check) {
    let idi = p("I D I");
    let want = ["I D I", "D I", "I I", "I"].map(p);
    match normalize_strict(&idi, 100) {
        Outcome::NormalForm { trace, .. } => {
            let terms = trace.terms();
            let ok = terms.len() == want.len() && terms.iter().zip(&want).all(|(a, b)| a.alpha_eq(b));
            c.ok(ok, || fail(&idi, format!("strict trace {}", trace.to_text(false).trim())));
            c.ok(trace.steps.iter().all(|s| s.rule == Rule::BetaV), || fail(&idi, "strict trace uses σ"));
        }
        _ => c.ok(false, || fail(&idi, "strict strategy does not normalize")),
    }
    for (m, n) in [("I D I", "(\\x.x I) D"), ("(D D)(I I)", "(D D) I")] {
        let (m, n) = (p(m), p(n));
        let absent = strict_standard_exists(&m, &n, 1000).is_absent();
        c.ok(absent, || fail(&m, format!("a strict standard sequence to {} was not ruled out", n)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for &id in PropertyId::ALL {
            assert_eq!(id.name().parse::<PropertyId>().unwrap(), id);
        }
        assert!("nope".parse::<PropertyId>().is_err());
    }

    #[test]
    fn fixtures_pass() {
        for &id in PropertyId::ALL.iter().filter(|p| p.is_fixture()) {
            let r = run_property(id, &TermGen::exhaustive(1, &["x"]), 100).unwrap();
            assert!(r.passed(), "{}: {:?}", id, r.failures);
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn small_corpus_passes() {
        let gen = TermGen::exhaustive(4, &["x", "y"]);
        for &id in PropertyId::ALL.iter().filter(|p| !p.is_fixture()) {
            let r = run_property(id, &gen, 200).unwrap();
            assert!(r.passed(), "{}: {:?}", id, r.failures);
        }
    }

    #[test]
    fn failure_lines_split() {
        assert_eq!(split_failure("x y :: bad"), ("x y".to_string(), "bad".to_string()));
        assert_eq!(split_failure("x :: bad"), ("x".to_string(), "bad".to_string()));
    }

    #[test]
    fn report_serializes() {
        let r = run_property(PropertyId::HeadDeterminism, &TermGen::exhaustive(3, &["x"]), 10).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(v["property"], "head-determinism");
        assert!(summary_table(&[r]).contains("head-determinism"));
    }
}
