//! Basic-type environments, Present/Required types, and the
//! syntax-directed type checker.
//!
//! A type is a pair `(P, R)`: the basic types present at the top level and
//! the basic types still required. The excluded set is never stored; it is
//! always `excl(P) = ⋃_{t ∈ P} E_t`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::matching::{Binding, Instantiation};
use crate::syntax::{
    is_element_name, Element, PComponent, PItem, ParseError, Parser, Pattern, Term, Tok, Var,
};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicType(Arc<str>);

impl BasicType {
    pub fn new(name: &str) -> Self {
        BasicType(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type TypeSet = BTreeSet<BasicType>;

/// Builds a [`TypeSet`] from names.
pub fn type_set<'a>(names: impl IntoIterator<Item = &'a str>) -> TypeSet {
    names.into_iter().map(BasicType::new).collect()
}

pub(crate) struct SetDisplay<'a>(pub &'a TypeSet);

impl fmt::Display for SetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

/// A Present/Required type `(P, R)`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PreType {
    pub present: TypeSet,
    pub required: TypeSet,
}

impl PreType {
    pub fn new(present: TypeSet, required: TypeSet) -> Self {
        PreType { present, required }
    }

    /// `(∅, ∅)`, the type of ε.
    pub fn empty() -> Self {
        PreType::default()
    }
}

impl fmt::Debug for PreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            SetDisplay(&self.present),
            SetDisplay(&self.required)
        )
    }
}

/// Path from the root of a pattern to a subpattern: indices into parallel
/// multisets (components first, then term variables), `0`/`1` for a loop's
/// membrane/content, and item indices within sequences.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("incompatible types {left} and {right} at {at}")]
    Incompatible {
        left: PreType,
        right: PreType,
        at: Position,
    },
    #[error("requirement {} is not provided by membrane types {} at {at}", SetDisplay(.required), SetDisplay(.provided))]
    RequirementNotProvided {
        required: TypeSet,
        provided: TypeSet,
        at: Position,
    },
    #[error("element `{0}` has no declared type")]
    UnknownElement(Element),
    #[error("variable {0} is not in the basis")]
    UnboundVariable(Var),
    #[error("basic type `{0}` is not declared")]
    UnknownBasicType(BasicType),
    #[error("cannot conjoin incompatible types {left} and {right}")]
    NotCompatible { left: PreType, right: PreType },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("basic type `{0}` is declared twice")]
    DuplicateType(BasicType),
    #[error("element `{0}` is declared twice")]
    DuplicateElement(Element),
    #[error("basic type `{missing}` used by `{user}` is not declared")]
    UndeclaredType { missing: BasicType, user: String },
    #[error("basic type `{0}` requires or excludes itself")]
    SelfReference(BasicType),
    #[error("basic type `{name}` both requires and excludes {}", SetDisplay(.both))]
    RequiredAndExcluded { name: BasicType, both: TypeSet },
    #[error("`{0}` is not a valid element name")]
    BadElementName(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct TypeInfo {
    required: TypeSet,
    excluded: TypeSet,
}

/// `Γ` together with the required and excluded sets of every basic type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    types: BTreeMap<BasicType, TypeInfo>,
    elems: BTreeMap<Element, BasicType>,
}

impl TypeEnv {
    /// Validates and assembles an environment.
    pub fn new(
        types: impl IntoIterator<Item = (BasicType, TypeSet, TypeSet)>,
        elems: impl IntoIterator<Item = (Element, BasicType)>,
    ) -> Result<Self, EnvError> {
        let mut env = TypeEnv::default();
        for (t, required, excluded) in types {
            if env.types.contains_key(&t) {
                return Err(EnvError::DuplicateType(t));
            }
            env.types.insert(t, TypeInfo { required, excluded });
        }
        for (t, info) in &env.types {
            if info.required.contains(t) || info.excluded.contains(t) {
                return Err(EnvError::SelfReference(t.clone()));
            }
            let both: TypeSet = info
                .required
                .intersection(&info.excluded)
                .cloned()
                .collect();
            if !both.is_empty() {
                return Err(EnvError::RequiredAndExcluded {
                    name: t.clone(),
                    both,
                });
            }
            if let Some(missing) = info
                .required
                .iter()
                .chain(&info.excluded)
                .find(|u| !env.types.contains_key(*u))
            {
                return Err(EnvError::UndeclaredType {
                    missing: missing.clone(),
                    user: t.to_string(),
                });
            }
        }
        for (e, t) in elems {
            if !env.types.contains_key(&t) {
                return Err(EnvError::UndeclaredType {
                    missing: t,
                    user: e.to_string(),
                });
            }
            if env.elems.contains_key(&e) {
                return Err(EnvError::DuplicateElement(e));
            }
            env.elems.insert(e, t);
        }
        Ok(env)
    }

    /// Parses the environment file format:
    ///
    /// ```text
    /// type t requires {t1, t2} excludes {t3};
    /// elem a : t;
    /// ```
    ///
    /// Both clauses are optional; all `type` lines precede `elem` lines.
    pub fn parse(text: &str) -> Result<Self, EnvError> {
        let mut p = Parser::new(text, false)?;
        let mut types = Vec::new();
        let mut elems = Vec::new();
        loop {
            if p.is_keyword("type") && elems.is_empty() {
                p.bump();
                let name = BasicType::new(&p.ident("basic type name")?);
                let mut required = TypeSet::new();
                let mut excluded = TypeSet::new();
                if p.is_keyword("requires") {
                    p.bump();
                    required = parse_type_list(&mut p)?;
                }
                if p.is_keyword("excludes") {
                    p.bump();
                    excluded = parse_type_list(&mut p)?;
                }
                p.expect(Tok::Semi)?;
                types.push((name, required, excluded));
            } else if p.is_keyword("elem") {
                p.bump();
                let name = p.ident("element name")?;
                if !is_element_name(&name) {
                    return Err(EnvError::BadElementName(name));
                }
                p.expect(Tok::Colon)?;
                let t = BasicType::new(&p.ident("basic type name")?);
                p.expect(Tok::Semi)?;
                elems.push((Element::new(&name), t));
            } else if *p.peek() == Tok::Eof {
                break;
            } else if elems.is_empty() {
                return Err(p.error(&["`type`", "`elem`"]).into());
            } else {
                return Err(p.error(&["`elem`"]).into());
            }
        }
        TypeEnv::new(types, elems)
    }

    pub fn basic_types(&self) -> impl Iterator<Item = &BasicType> {
        self.types.keys()
    }

    pub fn elements(&self) -> impl Iterator<Item = (&Element, &BasicType)> {
        self.elems.iter()
    }

    pub fn type_of(&self, e: &Element) -> Option<&BasicType> {
        self.elems.get(e)
    }

    fn info(&self, t: &BasicType) -> Result<&TypeInfo, TypeError> {
        self.types
            .get(t)
            .ok_or_else(|| TypeError::UnknownBasicType(t.clone()))
    }

    /// `R_t`
    pub fn required_of(&self, t: &BasicType) -> Result<&TypeSet, TypeError> {
        Ok(&self.info(t)?.required)
    }

    /// `E_t`
    pub fn excluded_by(&self, t: &BasicType) -> Result<&TypeSet, TypeError> {
        Ok(&self.info(t)?.excluded)
    }

    /// `excl(P) = ⋃_{t ∈ P} E_t`
    pub fn excluded_of(&self, present: &TypeSet) -> Result<TypeSet, TypeError> {
        let mut out = TypeSet::new();
        for t in present {
            out.extend(self.info(t)?.excluded.iter().cloned());
        }
        Ok(out)
    }

    /// `P ∩ excl(P) = P ∩ R = R ∩ excl(P) = ∅`
    pub fn well_formed(&self, ty: &PreType) -> Result<bool, TypeError> {
        for t in &ty.required {
            self.info(t)?;
        }
        let excl = self.excluded_of(&ty.present)?;
        Ok(ty.present.is_disjoint(&excl)
            && ty.present.is_disjoint(&ty.required)
            && ty.required.is_disjoint(&excl))
    }

    /// Both types are well formed and neither excludes what the other has
    /// or requires.
    pub fn compatible(&self, a: &PreType, b: &PreType) -> Result<bool, TypeError> {
        if !self.well_formed(a)? || !self.well_formed(b)? {
            return Ok(false);
        }
        let ea = self.excluded_of(&a.present)?;
        let eb = self.excluded_of(&b.present)?;
        Ok(ea.is_disjoint(&b.present)
            && ea.is_disjoint(&b.required)
            && eb.is_disjoint(&a.present)
            && eb.is_disjoint(&a.required))
    }

    /// `(P ∪ P', (R ∪ R') \ (P ∪ P'))` for compatible types.
    pub fn conjunction(&self, a: &PreType, b: &PreType) -> Result<PreType, TypeError> {
        if !self.compatible(a, b)? {
            return Err(TypeError::NotCompatible {
                left: a.clone(),
                right: b.clone(),
            });
        }
        Ok(conjoin(a, b))
    }

    /// `({t}, R_t)` for an element `e : t`.
    pub fn element_type(&self, e: &Element) -> Result<PreType, TypeError> {
        let t = self
            .type_of(e)
            .ok_or_else(|| TypeError::UnknownElement(e.clone()))?;
        Ok(PreType::new(
            TypeSet::from([t.clone()]),
            self.required_of(t)?.clone(),
        ))
    }
}

fn parse_type_list(p: &mut Parser) -> Result<TypeSet, ParseError> {
    p.expect(Tok::LBrace)?;
    let mut out = TypeSet::new();
    if p.eat(&Tok::RBrace) {
        return Ok(out);
    }
    loop {
        out.insert(BasicType::new(&p.ident("basic type name")?));
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(Tok::RBrace)?;
    Ok(out)
}

/// The conjunction formula, without the compatibility check.
pub(crate) fn conjoin(a: &PreType, b: &PreType) -> PreType {
    let present: TypeSet = a.present.union(&b.present).cloned().collect();
    let required = a
        .required
        .union(&b.required)
        .filter(|t| !present.contains(*t))
        .cloned()
        .collect();
    PreType { present, required }
}

/// `Δ`: types for pattern variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Basis {
    entries: BTreeMap<Var, PreType>,
}

impl Basis {
    pub fn new() -> Self {
        Basis::default()
    }

    pub fn with(mut self, var: Var, ty: PreType) -> Self {
        self.entries.insert(var, ty);
        self
    }

    pub fn insert(&mut self, var: Var, ty: PreType) {
        self.entries.insert(var, ty);
    }

    pub fn get(&self, var: &Var) -> Option<&PreType> {
        self.entries.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &PreType)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn well_formed(&self, env: &TypeEnv) -> Result<bool, TypeError> {
        for ty in self.entries.values() {
            if !env.well_formed(ty)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} : {t}")?;
        }
        f.write_str("}")
    }
}

/// The unique type derivable for `p` under `basis`.
///
/// Children are typed before their parent, left to right, and the first
/// violation encountered is reported.
pub fn type_check(p: &Pattern, basis: &Basis, env: &TypeEnv) -> Result<PreType, TypeError> {
    Checker { basis, env }.pattern(p, &Position::default())
}

/// Type of a ground term from the empty basis.
pub fn type_of_term(t: &Term, env: &TypeEnv) -> Result<PreType, TypeError> {
    type_check(&Pattern::from(t), &Basis::new(), env)
}

struct Checker<'a> {
    basis: &'a Basis,
    env: &'a TypeEnv,
}

impl Checker<'_> {
    fn var(&self, v: &Var) -> Result<PreType, TypeError> {
        self.basis
            .get(v)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable(v.clone()))
    }

    fn combine(
        &self,
        acc: Option<PreType>,
        ty: PreType,
        at: Position,
    ) -> Result<PreType, TypeError> {
        let Some(acc) = acc else { return Ok(ty) };
        if !self.env.compatible(&acc, &ty)? {
            return Err(TypeError::Incompatible {
                left: acc,
                right: ty,
                at,
            });
        }
        Ok(conjoin(&acc, &ty))
    }

    fn pattern(&self, p: &Pattern, at: &Position) -> Result<PreType, TypeError> {
        let mut acc = None;
        let mut i = 0;
        for c in p.components() {
            let here = at.child(i);
            let ty = self.component(c, &here)?;
            acc = Some(self.combine(acc, ty, here)?);
            i += 1;
        }
        for v in p.term_vars() {
            let ty = self.var(v)?;
            acc = Some(self.combine(acc, ty, at.child(i))?);
            i += 1;
        }
        Ok(acc.unwrap_or_default())
    }

    fn items(&self, items: &[PItem], at: &Position) -> Result<PreType, TypeError> {
        let mut acc = None;
        for (i, it) in items.iter().enumerate() {
            let ty = match it {
                PItem::Elem(e) => self.env.element_type(e)?,
                PItem::Var(v) => self.var(v)?,
            };
            acc = Some(self.combine(acc, ty, at.child(i))?);
        }
        Ok(acc.unwrap_or_default())
    }

    fn component(&self, c: &PComponent, at: &Position) -> Result<PreType, TypeError> {
        match c {
            PComponent::Seq(items) => self.items(items, at),
            PComponent::Loop { membrane, content } => {
                let mem = self.items(membrane, &at.child(0))?;
                let inner = self.pattern(content, &at.child(1))?;
                if !self.env.compatible(&mem, &inner)? {
                    return Err(TypeError::Incompatible {
                        left: mem,
                        right: inner,
                        at: at.clone(),
                    });
                }
                if !inner.required.is_subset(&mem.present) {
                    return Err(TypeError::RequirementNotProvided {
                        required: inner.required,
                        provided: mem.present,
                        at: at.clone(),
                    });
                }
                let required = mem.required.difference(&inner.present).cloned().collect();
                Ok(PreType::new(mem.present, required))
            }
        }
    }
}

/// Why an instantiation does not agree with a basis.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Disagreement {
    #[error("{0} is in the basis but not bound")]
    Unbound(Var),
    #[error("binding of {var} is untypable: {error}")]
    Untypable { var: Var, error: TypeError },
    #[error("binding of {var} has type {found}, basis says {expected}")]
    Mismatch {
        var: Var,
        expected: PreType,
        found: PreType,
    },
}

fn binding_type(b: &Binding, env: &TypeEnv) -> Result<PreType, TypeError> {
    type_of_term(&b.to_term(), env)
}

/// Checks `σ ∈ Σ_Δ`, explaining the first failure.
pub fn check_agreement(
    sigma: &Instantiation,
    basis: &Basis,
    env: &TypeEnv,
) -> Result<(), Disagreement> {
    for (v, expected) in basis.iter() {
        let b = sigma
            .get(v)
            .ok_or_else(|| Disagreement::Unbound(v.clone()))?;
        let found = binding_type(b, env).map_err(|error| Disagreement::Untypable {
            var: v.clone(),
            error,
        })?;
        if &found != expected {
            return Err(Disagreement::Mismatch {
                var: v.clone(),
                expected: expected.clone(),
                found,
            });
        }
    }
    Ok(())
}

/// `σ ∈ Σ_Δ`
pub fn agrees(sigma: &Instantiation, basis: &Basis, env: &TypeEnv) -> bool {
    check_agreement(sigma, basis, env).is_ok()
}

/// The basis assigning every bound variable the type of its binding.
pub fn basis_of(sigma: &Instantiation, env: &TypeEnv) -> Result<Basis, TypeError> {
    let mut basis = Basis::new();
    for (v, b) in sigma.iter() {
        basis.insert(v.clone(), binding_type(b, env)?);
    }
    Ok(basis)
}
