//! Principal typing with constraint sets, constraint evaluation, the
//! context OK relation, rule classification, and the typed step.
//!
//! Two decision procedures are provided for whether a rewrite may fire.
//! The direct one types the rewritten context with the ordinary checker;
//! the principal one evaluates constraints produced once per rule and per
//! context core. [`TypedSystem`] uses the direct procedure unless asked
//! otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::matching::{instantiate, Context, Instantiation, MatchError, Matcher, Redex};
use crate::rewrite::{Rule, Transition};
use crate::syntax::{Element, PComponent, PItem, Pattern, Term, Var, VarKind};
use crate::typesys::{
    basis_of, type_check, type_of_term, BasicType, Basis, PreType, SetDisplay, TypeEnv, TypeError,
    TypeSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeVarKind {
    /// `φ_x`, ranging over basic types.
    Elem,
    /// `φ_η`, ranging over sets of present types.
    Present,
    /// `ψ_η`, ranging over sets of required types.
    Required,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeVar {
    pub kind: TypeVarKind,
    pub owner: Var,
}

impl TypeVar {
    /// The variable standing for the present part of `owner`'s type.
    pub fn phi(owner: &Var) -> Self {
        let kind = if owner.kind == VarKind::Elem {
            TypeVarKind::Elem
        } else {
            TypeVarKind::Present
        };
        TypeVar {
            kind,
            owner: owner.clone(),
        }
    }

    pub fn psi(owner: &Var) -> Self {
        TypeVar {
            kind: TypeVarKind::Required,
            owner: owner.clone(),
        }
    }
}

impl fmt::Debug for TypeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TypeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.kind {
            TypeVarKind::Elem | TypeVarKind::Present => "phi",
            TypeVarKind::Required => "psi",
        };
        write!(f, "{head}_{}", self.owner.name())
    }
}

/// Formal unions and differences over type variables and constants.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Const(TypeSet),
    Var(TypeVar),
    Union(Arc<TypeExpr>, Arc<TypeExpr>),
    Diff(Arc<TypeExpr>, Arc<TypeExpr>),
    /// `R_φx`
    ReqOf(TypeVar),
}

impl TypeExpr {
    pub fn empty() -> Self {
        TypeExpr::Const(TypeSet::new())
    }

    pub fn var(v: TypeVar) -> Self {
        TypeExpr::Var(v)
    }

    pub fn union(a: &TypeExpr, b: &TypeExpr) -> Self {
        TypeExpr::Union(Arc::new(a.clone()), Arc::new(b.clone()))
    }

    pub fn diff(a: &TypeExpr, b: &TypeExpr) -> Self {
        TypeExpr::Diff(Arc::new(a.clone()), Arc::new(b.clone()))
    }

    pub fn type_vars(&self) -> BTreeSet<TypeVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<TypeVar>) {
        match self {
            TypeExpr::Const(_) => {}
            TypeExpr::Var(v) | TypeExpr::ReqOf(v) => {
                out.insert(v.clone());
            }
            TypeExpr::Union(a, b) | TypeExpr::Diff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Whether a type variable owned by `owner` occurs.
    pub fn mentions(&self, owner: &Var) -> bool {
        match self {
            TypeExpr::Const(_) => false,
            TypeExpr::Var(v) | TypeExpr::ReqOf(v) => &v.owner == owner,
            TypeExpr::Union(a, b) | TypeExpr::Diff(a, b) => a.mentions(owner) || b.mentions(owner),
        }
    }
}

impl fmt::Debug for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Const(s) => write!(f, "{}", SetDisplay(s)),
            TypeExpr::Var(v) => write!(f, "{v}"),
            TypeExpr::Union(a, b) => write!(f, "({a} + {b})"),
            TypeExpr::Diff(a, b) => write!(f, "({a} - {b})"),
            TypeExpr::ReqOf(v) => write!(f, "R({v})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    Eq(TypeExpr, TypeExpr),
    Ok((TypeExpr, TypeExpr), (TypeExpr, TypeExpr)),
    Subset(TypeExpr, TypeExpr),
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Eq(a, b) => write!(f, "{a} = {b}"),
            Constraint::Ok((p, r), (p2, r2)) => write!(f, "ok(({p}, {r}), ({p2}, {r2}))"),
            Constraint::Subset(a, b) => write!(f, "{a} <= {b}"),
        }
    }
}

/// `Θ; (Φ, Ψ); Ξ`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalResult {
    /// Each pattern variable with its present and required type variables.
    pub basis_scheme: BTreeMap<Var, (TypeVar, TypeVar)>,
    pub phi: TypeExpr,
    pub psi: TypeExpr,
    /// In generation order, without repeats.
    pub constraints: Vec<Constraint>,
}

impl fmt::Display for PrincipalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("scheme: {")?;
        for (i, (v, (phi, psi))) in self.basis_scheme.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} : ({phi}, {psi})")?;
        }
        writeln!(f, "}}")?;
        writeln!(f, "type: ({}, {})", self.phi, self.psi)?;
        write!(f, "constraints:")?;
        if self.constraints.is_empty() {
            write!(f, " none")?;
        }
        for c in &self.constraints {
            write!(f, "\n  {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("element `{0}` has no declared type")]
    UnknownElement(Element),
    #[error("type variable {0} is not mapped")]
    UnboundTypeVariable(TypeVar),
    #[error("element variable {var} has type {ty}, which is not ({{t}}, R_t) for a basic type t")]
    BadElementType { var: Var, ty: PreType },
    #[error(transparent)]
    Type(#[from] TypeError),
}

struct Inferrer<'a> {
    env: &'a TypeEnv,
    scheme: BTreeMap<Var, (TypeVar, TypeVar)>,
    constraints: Vec<Constraint>,
}

type Typing = (TypeExpr, TypeExpr);

impl Inferrer<'_> {
    fn add(&mut self, c: Constraint) {
        if !self.constraints.contains(&c) {
            self.constraints.push(c);
        }
    }

    fn var(&mut self, v: &Var) -> Typing {
        let phi = TypeVar::phi(v);
        let psi = TypeVar::psi(v);
        self.scheme.insert(v.clone(), (phi.clone(), psi.clone()));
        if v.kind == VarKind::Elem {
            self.add(Constraint::Eq(
                TypeExpr::Var(psi.clone()),
                TypeExpr::ReqOf(phi.clone()),
            ));
        }
        (TypeExpr::Var(phi), TypeExpr::Var(psi))
    }

    fn element(&self, e: &Element) -> Result<Typing, InferenceError> {
        let ty = self.env.element_type(e).map_err(|err| match err {
            TypeError::UnknownElement(e) => InferenceError::UnknownElement(e),
            other => InferenceError::Type(other),
        })?;
        Ok((TypeExpr::Const(ty.present), TypeExpr::Const(ty.required)))
    }

    fn combine(&mut self, acc: Option<Typing>, next: Typing) -> Typing {
        let Some((p, r)) = acc else { return next };
        let (p2, r2) = next;
        self.add(Constraint::Ok(
            (p.clone(), r.clone()),
            (p2.clone(), r2.clone()),
        ));
        let present = TypeExpr::union(&p, &p2);
        let required = TypeExpr::diff(&TypeExpr::union(&r, &r2), &present);
        (present, required)
    }

    fn items(&mut self, items: &[PItem]) -> Result<Typing, InferenceError> {
        let mut acc = None;
        for it in items {
            let ty = match it {
                PItem::Elem(e) => self.element(e)?,
                PItem::Var(v) => self.var(v),
            };
            acc = Some(self.combine(acc, ty));
        }
        Ok(acc.unwrap_or((TypeExpr::empty(), TypeExpr::empty())))
    }

    fn pattern(&mut self, p: &Pattern) -> Result<Typing, InferenceError> {
        let mut acc = None;
        for c in p.components() {
            let ty = match c {
                PComponent::Seq(items) => self.items(items)?,
                PComponent::Loop { membrane, content } => {
                    let (p, r) = self.items(membrane)?;
                    let (p2, r2) = self.pattern(content)?;
                    self.add(Constraint::Ok(
                        (p.clone(), r.clone()),
                        (p2.clone(), r2.clone()),
                    ));
                    self.add(Constraint::Subset(r2, p.clone()));
                    let required = TypeExpr::diff(&r, &p2);
                    (p, required)
                }
            };
            acc = Some(self.combine(acc, ty));
        }
        for v in p.term_vars() {
            let ty = self.var(v);
            acc = Some(self.combine(acc, ty));
        }
        Ok(acc.unwrap_or((TypeExpr::empty(), TypeExpr::empty())))
    }
}

/// The principal typing of `p`. Elements are typed from `env`; variables
/// get type variables keyed by the variable, so repeated occurrences share
/// them.
pub fn infer(p: &Pattern, env: &TypeEnv) -> Result<PrincipalResult, InferenceError> {
    let mut inf = Inferrer {
        env,
        scheme: BTreeMap::new(),
        constraints: Vec::new(),
    };
    let (phi, psi) = inf.pattern(p)?;
    Ok(PrincipalResult {
        basis_scheme: inf.scheme,
        phi,
        psi,
        constraints: inf.constraints,
    })
}

/// Assignment of basic types to e-type variables and of sets to p- and
/// r-type variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeMapping {
    elems: BTreeMap<TypeVar, BasicType>,
    sets: BTreeMap<TypeVar, TypeSet>,
}

impl TypeMapping {
    pub fn new() -> Self {
        TypeMapping::default()
    }

    /// Maps an e-type variable.
    pub fn set_elem(&mut self, v: TypeVar, t: BasicType) {
        debug_assert_eq!(v.kind, TypeVarKind::Elem);
        self.elems.insert(v, t);
    }

    /// Maps a p- or r-type variable.
    pub fn set(&mut self, v: TypeVar, s: TypeSet) {
        debug_assert_ne!(v.kind, TypeVarKind::Elem);
        self.sets.insert(v, s);
    }

    pub fn elem(&self, v: &TypeVar) -> Option<&BasicType> {
        self.elems.get(v)
    }

    pub fn get(&self, v: &TypeVar) -> Option<&TypeSet> {
        self.sets.get(v)
    }

    /// Reads a mapping off a basis: `φ_x ↦ t` for `x : ({t}, R_t)`, and
    /// `φ_η ↦ P`, `ψ_η ↦ R` for `η : (P, R)`.
    pub fn from_basis(basis: &Basis, env: &TypeEnv) -> Result<Self, InferenceError> {
        let mut m = TypeMapping::new();
        for (v, ty) in basis.iter() {
            if v.kind == VarKind::Elem {
                let t = match ty.present.iter().collect::<Vec<_>>()[..] {
                    [t] if env.required_of(t).ok() == Some(&ty.required) => t.clone(),
                    _ => {
                        return Err(InferenceError::BadElementType {
                            var: v.clone(),
                            ty: ty.clone(),
                        })
                    }
                };
                m.set_elem(TypeVar::phi(v), t);
            } else {
                m.set(TypeVar::phi(v), ty.present.clone());
            }
            m.set(TypeVar::psi(v), ty.required.clone());
        }
        Ok(m)
    }

    /// `m(Θ)`
    pub fn apply_scheme(
        &self,
        scheme: &BTreeMap<Var, (TypeVar, TypeVar)>,
        env: &TypeEnv,
    ) -> Result<Basis, InferenceError> {
        let mut basis = Basis::new();
        for (v, (phi, psi)) in scheme {
            let ty = PreType::new(
                eval_expr(&TypeExpr::Var(phi.clone()), self, env)?,
                eval_expr(&TypeExpr::Var(psi.clone()), self, env)?,
            );
            basis.insert(v.clone(), ty);
        }
        Ok(basis)
    }
}

impl fmt::Display for TypeMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if !std::mem::take(&mut first) {
                f.write_str(", ")
            } else {
                Ok(())
            }
        };
        for (v, t) in &self.elems {
            sep(f)?;
            write!(f, "{v} -> {t}")?;
        }
        for (v, s) in &self.sets {
            sep(f)?;
            write!(f, "{v} -> {}", SetDisplay(s))?;
        }
        f.write_str("}")
    }
}

/// `m(e)`
pub fn eval_expr(e: &TypeExpr, m: &TypeMapping, env: &TypeEnv) -> Result<TypeSet, InferenceError> {
    let unbound = |v: &TypeVar| InferenceError::UnboundTypeVariable(v.clone());
    Ok(match e {
        TypeExpr::Const(s) => s.clone(),
        TypeExpr::Var(v) if v.kind == TypeVarKind::Elem => {
            TypeSet::from([m.elem(v).ok_or_else(|| unbound(v))?.clone()])
        }
        TypeExpr::Var(v) => m.get(v).ok_or_else(|| unbound(v))?.clone(),
        TypeExpr::ReqOf(v) => env
            .required_of(m.elem(v).ok_or_else(|| unbound(v))?)?
            .clone(),
        TypeExpr::Union(a, b) => {
            let mut s = eval_expr(a, m, env)?;
            s.extend(eval_expr(b, m, env)?);
            s
        }
        TypeExpr::Diff(a, b) => {
            let b = eval_expr(b, m, env)?;
            eval_expr(a, m, env)?
                .into_iter()
                .filter(|t| !b.contains(t))
                .collect()
        }
    })
}

pub fn satisfies_one(
    m: &TypeMapping,
    c: &Constraint,
    env: &TypeEnv,
) -> Result<bool, InferenceError> {
    let ev = |e: &TypeExpr| eval_expr(e, m, env);
    Ok(match c {
        Constraint::Eq(a, b) => ev(a)? == ev(b)?,
        Constraint::Subset(a, b) => ev(a)?.is_subset(&ev(b)?),
        Constraint::Ok((p, r), (p2, r2)) => env.compatible(
            &PreType::new(ev(p)?, ev(r)?),
            &PreType::new(ev(p2)?, ev(r2)?),
        )?,
    })
}

/// Whether every constraint holds under `m`.
pub fn satisfies<'a>(
    m: &TypeMapping,
    constraints: impl IntoIterator<Item = &'a Constraint>,
    env: &TypeEnv,
) -> Result<bool, InferenceError> {
    for c in constraints {
        if !satisfies_one(m, c, env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The variable that stands for the hole when a context is typed as a
/// pattern. Variable names in source text start with a letter, so this
/// one cannot clash.
pub fn hole_var() -> Var {
    Var::term("_hole")
}

/// Type of `C[X]` under `X : τ`.
pub fn type_in_context(tau: &PreType, c: &Context, env: &TypeEnv) -> Result<PreType, TypeError> {
    let hole = hole_var();
    let p = c.plug_pattern(&Pattern::var(hole.clone()));
    type_check(&p, &Basis::new().with(hole, tau.clone()), env)
}

/// `τ` is OK for `c`: plugging anything of type `τ` into `c` yields a
/// term with no outstanding requirements.
pub fn ok_for_context_direct(tau: &PreType, c: &Context, env: &TypeEnv) -> bool {
    if !env.well_formed(tau).unwrap_or(false) {
        return false;
    }
    matches!(type_in_context(tau, c, env), Ok(ty) if ty.required.is_empty())
}

/// Constraints deciding OK-ness for `core`, with the hole as the
/// variable returned by [`hole_var`].
fn core_constraints(core: &Context, env: &TypeEnv) -> Result<Vec<Constraint>, InferenceError> {
    let hole = hole_var();
    let r = infer(&core.plug_pattern(&Pattern::var(hole.clone())), env)?;
    let mut cs = r.constraints;
    if r.psi.mentions(&hole) {
        cs.push(Constraint::Eq(r.psi, TypeExpr::empty()));
    }
    Ok(cs)
}

/// The OK relation decided from the principal typing of `core(c)`. Agrees
/// with [`ok_for_context_direct`] whenever `c` is a context of a
/// correctly typed term.
pub fn ok_for_context_core(
    tau: &PreType,
    c: &Context,
    env: &TypeEnv,
) -> Result<bool, InferenceError> {
    if !env.well_formed(tau)? {
        return Ok(false);
    }
    let hole = hole_var();
    let cs = core_constraints(&c.core(), env)?;
    let mut m = TypeMapping::new();
    m.set(TypeVar::phi(&hole), tau.present.clone());
    m.set(TypeVar::psi(&hole), tau.required.clone());
    satisfies(&m, &cs, env)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("rule {rule} is not a reduction rule for this basis: {error}")]
pub struct NotAReductionRule {
    pub rule: Arc<str>,
    pub error: InferenceError,
}

/// The type of the rule's right-hand side under `basis`, if it has one.
pub fn classify_rule(r: &Rule, basis: &Basis, env: &TypeEnv) -> Result<PreType, NotAReductionRule> {
    type_check(&r.rhs, basis, env).map_err(|e| NotAReductionRule {
        rule: r.name.clone(),
        error: e.into(),
    })
}

/// [`classify_rule`] through the principal typing of the right-hand side.
pub fn classify_rule_by_inference(
    r: &Rule,
    basis: &Basis,
    env: &TypeEnv,
) -> Result<PreType, NotAReductionRule> {
    let fail = |error: InferenceError| NotAReductionRule {
        rule: r.name.clone(),
        error,
    };
    let principal = infer(&r.rhs, env).map_err(fail)?;
    classify_with(&principal, basis, env).map_err(fail)
}

fn classify_with(
    principal: &PrincipalResult,
    basis: &Basis,
    env: &TypeEnv,
) -> Result<PreType, InferenceError> {
    let m = TypeMapping::from_basis(basis, env)?;
    for v in principal.basis_scheme.keys() {
        if basis.get(v).is_none() {
            return Err(TypeError::UnboundVariable(v.clone()).into());
        }
    }
    if let Some(c) = principal
        .constraints
        .iter()
        .find(|c| !satisfies_one(&m, c, env).unwrap_or(false))
    {
        return Err(unsatisfied(c));
    }
    Ok(PreType::new(
        eval_expr(&principal.phi, &m, env)?,
        eval_expr(&principal.psi, &m, env)?,
    ))
}

fn unsatisfied(c: &Constraint) -> InferenceError {
    // reported through the checker's vocabulary; positions are not tracked
    // by constraints
    match c {
        Constraint::Subset(..) => TypeError::RequirementNotProvided {
            required: TypeSet::new(),
            provided: TypeSet::new(),
            at: Default::default(),
        },
        _ => TypeError::Incompatible {
            left: PreType::empty(),
            right: PreType::empty(),
            at: Default::default(),
        },
    }
    .into()
}

/// Whether the rewrite of redex `(c, σ)` by `r` is allowed, decided by
/// constraint satisfaction. Untypable bindings make it inapplicable.
pub fn applicable(
    r: &Rule,
    sigma: &Instantiation,
    c: &Context,
    env: &TypeEnv,
) -> Result<bool, InferenceError> {
    applicable_with(&infer(&r.rhs, env)?, sigma, c, env)
}

fn applicable_with(
    rhs: &PrincipalResult,
    sigma: &Instantiation,
    c: &Context,
    env: &TypeEnv,
) -> Result<bool, InferenceError> {
    let Ok(basis) = basis_of(sigma, env) else {
        return Ok(false);
    };
    let mut m = TypeMapping::from_basis(&basis, env)?;
    if !satisfies(&m, &rhs.constraints, env)? {
        return Ok(false);
    }
    let hole = hole_var();
    m.set(TypeVar::phi(&hole), eval_expr(&rhs.phi, &m, env)?);
    m.set(TypeVar::psi(&hole), eval_expr(&rhs.psi, &m, env)?);
    let mut cs = vec![
        Constraint::Eq(rhs.phi.clone(), TypeExpr::Var(TypeVar::phi(&hole))),
        Constraint::Eq(rhs.psi.clone(), TypeExpr::Var(TypeVar::psi(&hole))),
    ];
    cs.extend(core_constraints(&c.core(), env)?);
    satisfies(&m, &cs, env)
}

/// [`applicable`] decided by typing: the bindings are typable, the rule
/// classifies under the resulting basis, and its type is OK for `c`.
pub fn applicable_direct(r: &Rule, sigma: &Instantiation, c: &Context, env: &TypeEnv) -> bool {
    let Ok(basis) = basis_of(sigma, env) else {
        return false;
    };
    match classify_rule(r, &basis, env) {
        Ok(tau) => ok_for_context_direct(&tau, c, env),
        Err(_) => false,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecisionPath {
    /// Typing of the rewritten context.
    #[default]
    Direct,
    /// Constraint evaluation against the principal typings.
    Principal,
}

/// Why a state is not a correct system.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IllTyped {
    #[error("{0}")]
    Untypable(TypeError),
    #[error("requirements {} are unmet at top level", SetDisplay(.0))]
    Unmet(TypeSet),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("state {state} is not a correct system: {reason}")]
    IllTypedState { state: Term, reason: IllTyped },
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// Checks that `t` types as `(P, ∅)` and returns `P`.
pub fn correct_system(t: &Term, env: &TypeEnv) -> Result<TypeSet, StepError> {
    let ill = |reason| StepError::IllTypedState {
        state: t.clone(),
        reason,
    };
    let ty = type_of_term(t, env).map_err(|e| ill(IllTyped::Untypable(e)))?;
    if !ty.required.is_empty() {
        return Err(ill(IllTyped::Unmet(ty.required)));
    }
    Ok(ty.present)
}

/// A rule set under an environment, with each right-hand side's principal
/// typing computed up front.
#[derive(Clone, Debug)]
pub struct TypedSystem {
    env: TypeEnv,
    rules: Vec<Rule>,
    principal: Vec<PrincipalResult>,
    matcher: Matcher,
    path: DecisionPath,
}

impl TypedSystem {
    pub fn new(env: TypeEnv, rules: Vec<Rule>) -> Result<Self, InferenceError> {
        let principal = rules
            .iter()
            .map(|r| infer(&r.rhs, &env))
            .collect::<Result<_, _>>()?;
        Ok(TypedSystem {
            env,
            rules,
            principal,
            matcher: Matcher::default(),
            path: DecisionPath::default(),
        })
    }

    pub fn with_path(mut self, path: DecisionPath) -> Self {
        self.path = path;
        self
    }

    pub fn with_matcher(mut self, matcher: Matcher) -> Self {
        self.matcher = matcher;
        self
    }

    pub fn env(&self) -> &TypeEnv {
        &self.env
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn path(&self) -> DecisionPath {
        self.path
    }

    /// Principal typing of rule `i`'s right-hand side.
    pub fn rhs_typing(&self, i: usize) -> &PrincipalResult {
        &self.principal[i]
    }

    /// Whether rule `i` may rewrite `redex`.
    pub fn allows(&self, i: usize, redex: &Redex) -> Result<bool, InferenceError> {
        match self.path {
            DecisionPath::Direct => Ok(applicable_direct(
                &self.rules[i],
                &redex.instantiation,
                &redex.context,
                &self.env,
            )),
            DecisionPath::Principal => applicable_with(
                &self.principal[i],
                &redex.instantiation,
                &redex.context,
                &self.env,
            ),
        }
    }

    /// Successors of a correct system under the typed semantics, one per
    /// rule and congruence class.
    pub fn step(&self, t: &Term) -> Result<Vec<Transition>, StepError> {
        correct_system(t, &self.env)?;
        let mut out = BTreeSet::new();
        for (i, r) in self.rules.iter().enumerate() {
            for redex in self.matcher.find_redexes(&r.lhs, t)? {
                if !self.allows(i, &redex)? {
                    continue;
                }
                let rhs = instantiate(&r.rhs, &redex.instantiation)?;
                out.insert(Transition {
                    rule: r.name.clone(),
                    target: redex.context.plug(&rhs),
                });
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// One typed step with the default matcher and the direct decision path.
pub fn typed_step(rules: &[Rule], t: &Term, env: &TypeEnv) -> Result<Vec<Transition>, StepError> {
    TypedSystem::new(env.clone(), rules.to_vec())?.step(t)
}
