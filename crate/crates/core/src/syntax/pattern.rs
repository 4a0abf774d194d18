//! Patterns: terms with term, sequence, and element variables.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::term::{Component, Element, Sequence, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// `$X`, ranges over terms.
    Term,
    /// `~x`, ranges over sequences (including ε).
    Seq,
    /// `?x`, ranges over single elements.
    Elem,
}

impl VarKind {
    pub fn marker(self) -> char {
        match self {
            VarKind::Term => '$',
            VarKind::Seq => '~',
            VarKind::Elem => '?',
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    name: Arc<str>,
}

impl Var {
    pub fn new(kind: VarKind, name: &str) -> Self {
        Var {
            kind,
            name: Arc::from(name),
        }
    }

    pub fn term(name: &str) -> Self {
        Var::new(VarKind::Term, name)
    }

    pub fn seq(name: &str) -> Self {
        Var::new(VarKind::Seq, name)
    }

    pub fn elem(name: &str) -> Self {
        Var::new(VarKind::Elem, name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.marker(), self.name)
    }
}

/// A sequence-level pattern item.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PItem {
    Elem(Element),
    /// A sequence or element variable.
    Var(Var),
}

impl fmt::Debug for PItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PItem::Elem(e) => write!(f, "{e}"),
            PItem::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PComponent {
    /// A nonempty sequence pattern.
    Seq(Vec<PItem>),
    /// A looping sequence pattern. The membrane is kept as written.
    Loop {
        membrane: Vec<PItem>,
        content: Pattern,
    },
}

impl fmt::Debug for PComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[PItem]) -> fmt::Result {
    if items.is_empty() {
        return f.write_str("eps");
    }
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(".")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for PComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PComponent::Seq(items) => write_items(f, items),
            PComponent::Loop { membrane, content } => {
                f.write_str("loop(")?;
                write_items(f, membrane)?;
                f.write_str("){")?;
                if !content.is_empty() {
                    write!(f, "{content}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A pattern in normal form: sorted components followed by sorted term
/// variables.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    components: Vec<PComponent>,
    term_vars: Vec<Var>,
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern::default()
    }

    /// Normalizes: drops empty sequences and `loop(eps){}`, sorts.
    ///
    /// # Panics
    ///
    /// If a member of `term_vars` is not a term variable.
    pub fn new(components: Vec<PComponent>, mut term_vars: Vec<Var>) -> Self {
        assert!(term_vars.iter().all(|v| v.kind == VarKind::Term));
        let mut components: Vec<PComponent> = components
            .into_iter()
            .filter(|c| match c {
                PComponent::Seq(items) => !items.is_empty(),
                PComponent::Loop { membrane, content } => {
                    !(membrane.is_empty() && content.is_empty())
                }
            })
            .collect();
        components.sort();
        term_vars.sort();
        Pattern {
            components,
            term_vars,
        }
    }

    /// A pattern consisting of the single term variable `v`.
    pub fn var(v: Var) -> Self {
        Pattern::new(Vec::new(), vec![v])
    }

    pub fn components(&self) -> &[PComponent] {
        &self.components
    }

    pub fn term_vars(&self) -> &[Var] {
        &self.term_vars
    }

    /// Whether the pattern is syntactically ε.
    pub fn is_empty(&self) -> bool {
        self.components.is_empty() && self.term_vars.is_empty()
    }

    pub fn par(&self, other: &Pattern) -> Pattern {
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        let mut vars = self.term_vars.clone();
        vars.extend(other.term_vars.iter().cloned());
        Pattern::new(comps, vars)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for c in &self.components {
            match c {
                PComponent::Seq(items) => collect_item_vars(items, out),
                PComponent::Loop { membrane, content } => {
                    collect_item_vars(membrane, out);
                    content.collect_vars(out);
                }
            }
        }
        out.extend(self.term_vars.iter().cloned());
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// Every variable occurrence, in traversal order (with repeats).
    pub fn var_occurrences(&self) -> Vec<&Var> {
        let mut out = Vec::new();
        self.collect_occurrences(&mut out);
        out
    }

    fn collect_occurrences<'a>(&'a self, out: &mut Vec<&'a Var>) {
        for c in &self.components {
            match c {
                PComponent::Seq(items) => out.extend(item_vars(items)),
                PComponent::Loop { membrane, content } => {
                    out.extend(item_vars(membrane));
                    content.collect_occurrences(out);
                }
            }
        }
        out.extend(self.term_vars.iter());
    }

    /// Converts a variable-free pattern to the term it denotes.
    pub fn to_term(&self) -> Option<Term> {
        if !self.term_vars.is_empty() {
            return None;
        }
        let mut comps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            match c {
                PComponent::Seq(items) => comps.extend(Component::seq(ground_items(items)?)),
                PComponent::Loop { membrane, content } => comps.extend(Component::looping(
                    &ground_items(membrane)?,
                    content.to_term()?,
                )),
            }
        }
        Some(Term::from_components(comps))
    }

    /// All elements occurring in the pattern.
    pub fn elements(&self) -> Vec<&Element> {
        let mut out = Vec::new();
        self.collect_elements(&mut out);
        out
    }

    fn collect_elements<'a>(&'a self, out: &mut Vec<&'a Element>) {
        let items = |items: &'a [PItem], out: &mut Vec<&'a Element>| {
            out.extend(items.iter().filter_map(|i| match i {
                PItem::Elem(e) => Some(e),
                PItem::Var(_) => None,
            }))
        };
        for c in &self.components {
            match c {
                PComponent::Seq(its) => items(its, out),
                PComponent::Loop { membrane, content } => {
                    items(membrane, out);
                    content.collect_elements(out);
                }
            }
        }
    }

    /// Number of items, loops, and term-variable occurrences.
    pub fn size(&self) -> usize {
        let comps: usize = self
            .components
            .iter()
            .map(|c| match c {
                PComponent::Seq(items) => items.len(),
                PComponent::Loop { membrane, content } => 1 + membrane.len() + content.size(),
            })
            .sum();
        comps + self.term_vars.len()
    }
}

fn item_vars(items: &[PItem]) -> impl Iterator<Item = &Var> {
    items.iter().filter_map(|i| match i {
        PItem::Var(v) => Some(v),
        PItem::Elem(_) => None,
    })
}

fn collect_item_vars(items: &[PItem], out: &mut BTreeSet<Var>) {
    out.extend(item_vars(items).cloned());
}

fn ground_items(items: &[PItem]) -> Option<Sequence> {
    items
        .iter()
        .map(|i| match i {
            PItem::Elem(e) => Some(e.clone()),
            PItem::Var(_) => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(Sequence::new)
}

impl From<&Sequence> for Vec<PItem> {
    fn from(s: &Sequence) -> Self {
        s.elements().iter().cloned().map(PItem::Elem).collect()
    }
}

impl From<&Term> for Pattern {
    fn from(t: &Term) -> Self {
        let components = t
            .components()
            .iter()
            .map(|c| match c {
                Component::Seq(s) => PComponent::Seq(s.into()),
                Component::Loop { membrane, content } => PComponent::Loop {
                    membrane: membrane.into(),
                    content: Pattern::from(content),
                },
            })
            .collect();
        Pattern::new(components, Vec::new())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("eps");
        }
        let mut first = true;
        for c in &self.components {
            if !first {
                f.write_str(" | ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        for v in &self.term_vars {
            if !first {
                f.write_str(" | ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
