//! Rewrite rules, the untyped reduction relation, and bounded
//! breadth-first exploration of reachable states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::matching::{instantiate, MatchError, Matcher};
use crate::syntax::{check_kinds, Parser, Pattern, SyntaxError, Term, Tok, Var};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side is congruent to eps")]
    EmptyLhs,
    #[error("right-hand side variable {0} does not occur on the left")]
    UnboundRhsVar(Var),
}

/// `lhs ↦ rhs`, with a name used to label transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: Arc<str>,
    pub lhs: Pattern,
    pub rhs: Pattern,
}

impl Rule {
    /// Builds a rule and validates it.
    pub fn new(name: &str, lhs: Pattern, rhs: Pattern) -> Result<Self, RuleError> {
        let r = Rule {
            name: Arc::from(name),
            lhs,
            rhs,
        };
        validate_rule(&r)?;
        Ok(r)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} => {}", self.name, self.lhs, self.rhs)
    }
}

pub fn validate_rule(r: &Rule) -> Result<(), RuleError> {
    if r.lhs.is_empty() {
        return Err(RuleError::EmptyLhs);
    }
    let bound = r.lhs.vars();
    if let Some(v) = r.rhs.vars().into_iter().find(|v| !bound.contains(v)) {
        return Err(RuleError::UnboundRhsVar(v));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleFileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("rule {name}: {error}")]
    Invalid { name: String, error: RuleError },
    #[error("rule name `{0}` is used twice")]
    DuplicateName(String),
}

/// Parses `rule NAME: PATTERN => PATTERN ;` declarations.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, RuleFileError> {
    let mut p = Parser::new(text, true).map_err(SyntaxError::from)?;
    let mut rules: Vec<Rule> = Vec::new();
    while *p.peek() != Tok::Eof {
        if !p.is_keyword("rule") {
            return Err(SyntaxError::from(p.error(&["`rule`"])).into());
        }
        p.bump();
        let name = p.ident("rule name").map_err(SyntaxError::from)?;
        p.expect(Tok::Colon).map_err(SyntaxError::from)?;
        let lhs = p.par().map_err(SyntaxError::from)?;
        p.expect(Tok::Arrow).map_err(SyntaxError::from)?;
        let rhs = p.par().map_err(SyntaxError::from)?;
        p.expect(Tok::Semi).map_err(SyntaxError::from)?;
        check_kinds(
            lhs.var_occurrences()
                .into_iter()
                .chain(rhs.var_occurrences()),
        )?;
        if rules.iter().any(|r| *r.name == *name) {
            return Err(RuleFileError::DuplicateName(name));
        }
        let rule = Rule::new(&name, lhs, rhs).map_err(|error| RuleFileError::Invalid {
            name: name.clone(),
            error,
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

/// One labelled successor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub rule: Arc<str>,
    pub target: Term,
}

/// Successors of `t` under the untyped semantics, one per rule and
/// congruence class, ordered by rule then target.
pub fn untyped_step(rules: &[Rule], t: &Term) -> Result<Vec<Transition>, MatchError> {
    untyped_step_with(&Matcher::default(), rules, t)
}

pub fn untyped_step_with(
    matcher: &Matcher,
    rules: &[Rule],
    t: &Term,
) -> Result<Vec<Transition>, MatchError> {
    let mut out = BTreeSet::new();
    for r in rules {
        for redex in matcher.find_redexes(&r.lhs, t)? {
            let rhs = instantiate(&r.rhs, &redex.instantiation)?;
            out.insert(Transition {
                rule: r.name.clone(),
                target: redex.context.plug(&rhs),
            });
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub rule: Arc<str>,
    pub to: usize,
}

/// Reachable states in discovery order, with `root` at index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    pub states: Vec<Term>,
    pub edges: Vec<Edge>,
    pub root: usize,
    pub truncated: bool,
}

impl TransitionGraph {
    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.states.iter().position(|s| s == t)
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index_of(t).is_some()
    }

    /// Whether some edge labelled `rule` goes from `from` to `to`.
    pub fn has_edge(&self, from: &Term, rule: &str, to: &Term) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(f), Some(t)) => self
                .edges
                .iter()
                .any(|e| e.from == f && e.to == t && &*e.rule == rule),
            _ => false,
        }
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == i)
    }

    /// Graphviz rendering; node labels are canonical forms.
    /// Graphviz rendering; nodes are identified by their canonical text.
    pub fn to_dot(&self) -> String {
        let id = |i: usize| format!("\"{}\"", escape(&self.states[i].to_string()));
        let mut s = String::from("digraph cls {\n");
        for i in 0..self.states.len() {
            let shape = if i == self.root {
                " [shape=doublecircle]"
            } else {
                ""
            };
            s.push_str(&format!("  {}{shape};\n", id(i)));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  {} -> {} [label=\"{}\"];\n",
                id(e.from),
                id(e.to),
                escape(&e.rule)
            ));
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Breadth-first closure of `step` from `t0`.
///
/// States first reached at depth `max_depth` are kept but not expanded;
/// successors that would push the state count past `max_states` are
/// dropped together with their edges. Either cut sets `truncated`. Each
/// frontier layer is stepped in parallel.
pub fn explore<F, E>(
    step: F,
    t0: &Term,
    max_states: usize,
    max_depth: usize,
) -> Result<TransitionGraph, E>
where
    F: Fn(&Term) -> Result<Vec<Transition>, E> + Sync,
    E: Send,
{
    let max_states = max_states.max(1);
    let mut states = vec![t0.clone()];
    let mut index: BTreeMap<Term, usize> = BTreeMap::from([(t0.clone(), 0)]);
    let mut edges = BTreeSet::new();
    let mut truncated = false;
    let mut frontier = vec![0usize];
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth == max_depth {
            truncated = true;
            break;
        }
        let results: Vec<Vec<Transition>> = frontier
            .par_iter()
            .map(|&i| step(&states[i]))
            .collect::<Result<_, E>>()?;
        let mut next = Vec::new();
        for (&from, succs) in frontier.iter().zip(results) {
            for tr in succs {
                let to = match index.get(&tr.target) {
                    Some(&j) => j,
                    None if states.len() < max_states => {
                        let j = states.len();
                        index.insert(tr.target.clone(), j);
                        states.push(tr.target);
                        next.push(j);
                        j
                    }
                    None => {
                        truncated = true;
                        continue;
                    }
                };
                edges.insert(Edge {
                    from,
                    rule: tr.rule,
                    to,
                });
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(TransitionGraph {
        states,
        edges: edges.into_iter().collect(),
        root: 0,
        truncated,
    })
}
