//! Instantiations, complete matching modulo structural congruence, redex
//! enumeration, and contexts.

mod context;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use context::{Context, Level};

use crate::syntax::{Component, Element, PComponent, PItem, Pattern, Sequence, Term, Var, VarKind};

/// Candidate assignments a single match call may explore.
pub const DEFAULT_MATCH_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("variable {0} is not bound by the instantiation")]
    UnboundVariable(Var),
    #[error("variable {var} cannot be bound to a {found}")]
    KindMismatch { var: Var, found: &'static str },
    #[error("match enumeration exceeded its budget of {budget} candidate assignments")]
    BudgetExceeded { budget: usize },
}

/// The value a variable is instantiated with.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Binding {
    Term(Term),
    Seq(Sequence),
    Elem(Element),
}

impl Binding {
    pub fn kind(&self) -> VarKind {
        match self {
            Binding::Term(_) => VarKind::Term,
            Binding::Seq(_) => VarKind::Seq,
            Binding::Elem(_) => VarKind::Elem,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Binding::Term(_) => "term",
            Binding::Seq(_) => "sequence",
            Binding::Elem(_) => "element",
        }
    }

    /// The bound value viewed as a term.
    pub fn to_term(&self) -> Term {
        match self {
            Binding::Term(t) => t.clone(),
            Binding::Seq(s) => Term::sequence(s.clone()),
            Binding::Elem(e) => Term::sequence(Sequence::new(vec![e.clone()])),
        }
    }
}

impl fmt::Debug for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Term(t) => write!(f, "{t}"),
            Binding::Seq(s) => write!(f, "{s}"),
            Binding::Elem(e) => write!(f, "{e}"),
        }
    }
}

/// A finite, kind-respecting map from variables to values.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instantiation {
    bindings: BTreeMap<Var, Binding>,
}

impl Instantiation {
    pub fn new() -> Self {
        Instantiation::default()
    }

    pub fn insert(&mut self, var: Var, value: Binding) -> Result<(), MatchError> {
        if var.kind != value.kind() {
            return Err(MatchError::KindMismatch {
                var,
                found: value.kind_name(),
            });
        }
        self.bindings.insert(var, value);
        Ok(())
    }

    /// Builder form of [`insert`](Self::insert).
    ///
    /// # Panics
    ///
    /// On a kind mismatch.
    pub fn with(mut self, var: Var, value: Binding) -> Self {
        self.insert(var, value).expect("kind-respecting binding");
        self
    }

    pub fn get(&self, var: &Var) -> Option<&Binding> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Binding)> {
        self.bindings.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Debug for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, b)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {b}")?;
        }
        f.write_str("}")
    }
}

/// `pσ` in canonical form.
pub fn instantiate(p: &Pattern, sigma: &Instantiation) -> Result<Term, MatchError> {
    let mut comps = Vec::new();
    for c in p.components() {
        match c {
            PComponent::Seq(items) => {
                comps.extend(Component::seq(instantiate_items(items, sigma)?))
            }
            PComponent::Loop { membrane, content } => comps.extend(Component::looping(
                &instantiate_items(membrane, sigma)?,
                instantiate(content, sigma)?,
            )),
        }
    }
    for v in p.term_vars() {
        match sigma.get(v) {
            Some(Binding::Term(t)) => comps.extend(t.components().iter().cloned()),
            _ => return Err(MatchError::UnboundVariable(v.clone())),
        }
    }
    Ok(Term::from_components(comps))
}

fn instantiate_items(items: &[PItem], sigma: &Instantiation) -> Result<Sequence, MatchError> {
    let mut out = Vec::new();
    for it in items {
        match it {
            PItem::Elem(e) => out.push(e.clone()),
            PItem::Var(v) => match sigma.get(v) {
                Some(Binding::Elem(e)) => out.push(e.clone()),
                Some(Binding::Seq(s)) => out.extend(s.elements().iter().cloned()),
                _ => return Err(MatchError::UnboundVariable(v.clone())),
            },
        }
    }
    Ok(Sequence::new(out))
}

/// A place where a rule's left-hand side occurs, with the instantiation
/// that makes it occur there.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Redex {
    pub context: Context,
    pub instantiation: Instantiation,
}

/// Matching with a configurable enumeration budget.
#[derive(Clone, Copy, Debug)]
pub struct Matcher {
    budget: usize,
}

impl Default for Matcher {
    fn default() -> Self {
        Matcher {
            budget: DEFAULT_MATCH_BUDGET,
        }
    }
}

impl Matcher {
    pub fn with_budget(budget: usize) -> Self {
        Matcher { budget }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Every σ with `dom(σ) = Var(p)` and `pσ ≡ t`.
    pub fn matches(&self, p: &Pattern, t: &Term) -> Result<BTreeSet<Instantiation>, MatchError> {
        self.matches_with(p, t, true)
    }

    /// Like [`Matcher::matches`], but every loop of `p` is matched against
    /// a loop of `t`; no pattern loop is satisfied by `loop(eps){}`.
    pub fn matches_in_place(
        &self,
        p: &Pattern,
        t: &Term,
    ) -> Result<BTreeSet<Instantiation>, MatchError> {
        self.matches_with(p, t, false)
    }

    fn matches_with(
        &self,
        p: &Pattern,
        t: &Term,
        loops_vanish: bool,
    ) -> Result<BTreeSet<Instantiation>, MatchError> {
        let mut search = search::Search::new(self.budget, loops_vanish);
        let found = search.pattern(p, t.components(), BTreeMap::new())?;
        Ok(found
            .into_iter()
            .map(|bindings| Instantiation { bindings })
            .collect())
    }

    /// Every `(C, σ)` with `C[lhs σ] ≡ t` and `lhs σ ≢ ε`. Holes range over
    /// every parallel position at every nesting depth. Each loop of `lhs`
    /// occupies an actual loop of `t` (see [`Matcher::matches_in_place`]).
    pub fn find_redexes(&self, lhs: &Pattern, t: &Term) -> Result<Vec<Redex>, MatchError> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(lhs, t, &mut path, &mut out)?;
        Ok(out)
    }

    fn walk(
        &self,
        lhs: &Pattern,
        here: &Term,
        path: &mut Vec<(Term, Sequence)>,
        out: &mut Vec<Redex>,
    ) -> Result<(), MatchError> {
        let rest_var = Var::term("_rest");
        let extended = lhs.par(&Pattern::var(rest_var.clone()));
        for mut sigma in self.matches_in_place(&extended, here)? {
            let Some(Binding::Term(rest)) = sigma.bindings.remove(&rest_var) else {
                unreachable!("the residual variable is always bound");
            };
            if rest == *here {
                // lhs σ ≡ ε
                continue;
            }
            out.push(Redex {
                context: context_at(path, rest),
                instantiation: sigma,
            });
        }
        let comps = here.components();
        for (i, c) in comps.iter().enumerate() {
            if i > 0 && comps[i - 1] == *c {
                continue;
            }
            if let Component::Loop { membrane, content } = c {
                let rest = Term::from_components(comps[..i].iter().chain(&comps[i + 1..]).cloned());
                path.push((rest, membrane.clone()));
                self.walk(lhs, content, path, out)?;
                path.pop();
            }
        }
        Ok(())
    }
}

fn context_at(path: &[(Term, Sequence)], rest: Term) -> Context {
    let Some(((top, _), _)) = path.split_first() else {
        return Context::beside(rest);
    };
    let levels = path
        .iter()
        .enumerate()
        .map(|(i, (_, membrane))| {
            let residual = match path.get(i + 1) {
                Some((r, _)) => r.clone(),
                None => rest.clone(),
            };
            Level::new(membrane, residual)
        })
        .collect();
    Context::new(top.clone(), levels)
}

/// [`Matcher::matches`] with the default budget.
pub fn match_pattern(p: &Pattern, t: &Term) -> Result<BTreeSet<Instantiation>, MatchError> {
    Matcher::default().matches(p, t)
}

/// [`Matcher::find_redexes`] with the default budget.
pub fn find_redexes(lhs: &Pattern, t: &Term) -> Result<Vec<Redex>, MatchError> {
    Matcher::default().find_redexes(lhs, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_pattern, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn p(s: &str) -> Pattern {
        parse_pattern(s).unwrap()
    }

    fn seq(s: &str) -> Binding {
        Binding::Seq(t(s).as_sequence().unwrap())
    }

    #[test]
    fn instantiate_examples() {
        let s = Instantiation::new().with(Var::seq("x"), seq("b.c"));
        assert_eq!(instantiate(&p("a.~x"), &s).unwrap(), t("a.b.c"));

        let s = Instantiation::new().with(Var::term("X"), Binding::Term(Term::empty()));
        assert_eq!(instantiate(&p("$X | b"), &s).unwrap(), t("b"));

        let s = Instantiation::new()
            .with(Var::seq("x"), seq("m"))
            .with(Var::term("X"), Binding::Term(Term::empty()))
            .with(Var::elem("y"), Binding::Elem(Element::new("b")));
        assert_eq!(
            instantiate(&p("loop(~x){$X | ?y}"), &s).unwrap(),
            t("loop(m){b}")
        );
    }

    #[test]
    fn instantiate_reports_unbound() {
        let err = instantiate(&p("a | $X"), &Instantiation::new()).unwrap_err();
        assert_eq!(err, MatchError::UnboundVariable(Var::term("X")));
    }

    #[test]
    fn insert_checks_kind() {
        let mut s = Instantiation::new();
        assert!(s.insert(Var::elem("x"), seq("a")).is_err());
    }

    #[test]
    fn match_examples() {
        let r = match_pattern(&p("a.~x"), &t("a.b.c")).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.first().unwrap().get(&Var::seq("x")), Some(&seq("b.c")));

        let r = match_pattern(&p("$X"), &t("eps")).unwrap();
        assert_eq!(r.len(), 1);

        let r = match_pattern(&p("$X | $Y"), &t("a | b")).unwrap();
        assert_eq!(r.len(), 4);

        let r = match_pattern(&p("loop(~x){$X | b}"), &t("loop(m){b}")).unwrap();
        let expected = Instantiation::new()
            .with(Var::seq("x"), seq("m"))
            .with(Var::term("X"), Binding::Term(Term::empty()));
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![expected]);
    }

    #[test]
    fn loop_membrane_matches_any_rotation() {
        let r = match_pattern(&p("loop(c.~x){}"), &t("loop(a.b.c){}")).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.first().unwrap().get(&Var::seq("x")), Some(&seq("a.b")));
    }

    #[test]
    fn vanishing_components() {
        // Both the sequence variable and the loop may collapse to ε.
        let r = match_pattern(&p("~x | a"), &t("a")).unwrap();
        assert_eq!(r.len(), 1);
        let r = match_pattern(&p("loop(~x){$X}"), &t("eps")).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn repeated_variables_must_agree() {
        assert_eq!(
            match_pattern(&p("$X | $X"), &t("a | a | b")).unwrap().len(),
            0
        );
        assert_eq!(
            match_pattern(&p("$X | $X"), &t("a | a | b | b"))
                .unwrap()
                .len(),
            1
        );
        assert_eq!(match_pattern(&p("?x.?x"), &t("a.b")).unwrap().len(), 0);
        assert_eq!(
            match_pattern(&p("loop(~x){~x}"), &t("loop(a.b){b.a}"))
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn budget_is_enforced() {
        let many = t("a | a | b | b | c | c | d | d | e | e");
        let err = Matcher::with_budget(10)
            .matches(&p("$X | $Y | $Z"), &many)
            .unwrap_err();
        assert_eq!(err, MatchError::BudgetExceeded { budget: 10 });
    }

    #[test]
    fn redex_examples() {
        let r = find_redexes(&p("loop(~x){$X | b}"), &t("a | loop(m){b}")).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].context, Context::beside(t("a")));

        assert!(find_redexes(&p("a.~x"), &t("m.a.m")).unwrap().is_empty());

        let r = find_redexes(&p("a"), &t("a")).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].context.is_hole());
        assert!(r[0].instantiation.is_empty());
    }

    #[test]
    fn redexes_inside_membranes() {
        let r = find_redexes(&p("b"), &t("b | loop(m){b | loop(n){b}}")).unwrap();
        let depths: Vec<usize> = r.iter().map(|x| x.context.depth()).collect();
        assert_eq!(depths, vec![0, 1, 2]);
        for x in &r {
            assert_eq!(x.context.plug(&t("b")), t("b | loop(m){b | loop(n){b}}"));
        }
    }

    #[test]
    fn vanishing_loop_matches_but_is_not_a_redex() {
        let p = parse_pattern("a | loop(~x){$X}").unwrap();
        let t = parse_term("a").unwrap();
        let found = match_pattern(&p, &t).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(instantiate(&p, found.iter().next().unwrap()).unwrap(), t);
        assert!(find_redexes(&p, &t).unwrap().is_empty());
        let t = parse_term("a | loop(eps){b}").unwrap();
        assert_eq!(find_redexes(&p, &t).unwrap().len(), 1);
    }
}
