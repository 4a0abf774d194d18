//! Ground terms in structural-congruence normal form.

use std::fmt;
use std::sync::Arc;

/// An alphabet symbol. Two elements are equal iff their names are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(Arc<str>);

impl Element {
    /// Creates an element without validating the name; the parser is the
    /// place where names are checked against the surface grammar.
    pub fn new(name: &str) -> Self {
        Element(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Whether `name` is a legal element identifier: `[a-z][a-zA-Z0-9_']*`,
/// excluding the keywords `eps` and `loop`.
pub fn is_element_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && name != "eps"
        && name != "loop"
}

/// A finite sequence of elements; the empty sequence is ε.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<Element>);

impl Sequence {
    pub fn new(elements: Vec<Element>) -> Self {
        Sequence(elements)
    }

    pub fn empty() -> Self {
        Sequence(Vec::new())
    }

    pub fn elements(&self) -> &[Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All distinct rotations, in increasing order.
    pub fn rotations(&self) -> Vec<Sequence> {
        if self.0.is_empty() {
            return vec![self.clone()];
        }
        let n = self.0.len();
        let mut out: Vec<Sequence> = (0..n)
            .map(|k| {
                let mut v = Vec::with_capacity(n);
                v.extend_from_slice(&self.0[k..]);
                v.extend_from_slice(&self.0[..k]);
                Sequence(v)
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The lexicographically least rotation.
    pub fn least_rotation(&self) -> Sequence {
        let n = self.0.len();
        if n < 2 {
            return self.clone();
        }
        let best = (1..n).fold(0, |best, k| {
            let cand = self.0[k..].iter().chain(&self.0[..k]);
            let cur = self.0[best..].iter().chain(&self.0[..best]);
            if cand.lt(cur) {
                k
            } else {
                best
            }
        });
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.0[best..]);
        v.extend_from_slice(&self.0[..best]);
        Sequence(v)
    }
}

impl From<Vec<Element>> for Sequence {
    fn from(v: Vec<Element>) -> Self {
        Sequence(v)
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// One member of a parallel multiset.
///
/// The derived order is the canonical one: sequences before loops,
/// sequences lexicographically by element name, loops by membrane then
/// content.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// A nonempty sequence.
    Seq(Sequence),
    /// A looping sequence with its content; the membrane is in
    /// least-rotation form and the pair is never (ε, ε).
    Loop { membrane: Sequence, content: Term },
}

impl Component {
    /// Builds a sequence component, or `None` for ε.
    pub fn seq(s: Sequence) -> Option<Component> {
        (!s.is_empty()).then_some(Component::Seq(s))
    }

    /// Builds a loop component, or `None` when it collapses to ε.
    pub fn looping(membrane: &Sequence, content: Term) -> Option<Component> {
        if membrane.is_empty() && content.is_empty() {
            return None;
        }
        Some(Component::Loop {
            membrane: membrane.least_rotation(),
            content,
        })
    }

    pub fn size(&self) -> usize {
        match self {
            Component::Seq(s) => s.len(),
            Component::Loop { membrane, content } => 1 + membrane.len() + content.size(),
        }
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Seq(s) => write!(f, "{s}"),
            Component::Loop { membrane, content } => {
                write!(f, "loop({membrane}){{")?;
                if !content.is_empty() {
                    write!(f, "{content}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A ground term in canonical form: a sorted multiset of components.
/// The empty multiset is ε.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    components: Vec<Component>,
}

impl Term {
    pub fn empty() -> Self {
        Term::default()
    }

    /// Builds a term from already-canonical components, sorting them.
    pub fn from_components(components: impl IntoIterator<Item = Component>) -> Self {
        let mut components: Vec<Component> = components.into_iter().collect();
        components.sort();
        Term { components }
    }

    /// The term consisting of the sequence `s` (ε when `s` is empty).
    pub fn sequence(s: Sequence) -> Self {
        Term::from_components(Component::seq(s))
    }

    /// `⟨membrane⟩⌋content`, normalized.
    pub fn looping(membrane: &Sequence, content: Term) -> Self {
        Term::from_components(Component::looping(membrane, content))
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Number of element occurrences plus number of loops.
    pub fn size(&self) -> usize {
        self.components.iter().map(Component::size).sum()
    }

    /// Parallel composition.
    pub fn par(&self, other: &Term) -> Term {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut components = Vec::with_capacity(self.components.len() + other.components.len());
        components.extend_from_slice(&self.components);
        components.extend_from_slice(&other.components);
        components.sort();
        Term { components }
    }

    /// Multiset difference `self - other`, or `None` when `other` is not a
    /// sub-multiset of `self`.
    pub fn minus(&self, other: &Term) -> Option<Term> {
        let mut rest = Vec::with_capacity(self.components.len());
        let mut it = other.components.iter().peekable();
        for c in &self.components {
            if it.peek() == Some(&c) {
                it.next();
            } else {
                rest.push(c.clone());
            }
        }
        it.peek().is_none().then_some(Term { components: rest })
    }

    /// Whether this term is a single sequence (possibly ε).
    pub fn as_sequence(&self) -> Option<Sequence> {
        match self.components.as_slice() {
            [] => Some(Sequence::empty()),
            [Component::Seq(s)] => Some(s.clone()),
            _ => None,
        }
    }

    /// All elements occurring anywhere in the term.
    pub fn elements(&self) -> Vec<&Element> {
        let mut out = Vec::new();
        collect_elements(self, &mut out);
        out
    }
}

fn collect_elements<'a>(t: &'a Term, out: &mut Vec<&'a Element>) {
    for c in &t.components {
        match c {
            Component::Seq(s) => out.extend(s.elements()),
            Component::Loop { membrane, content } => {
                out.extend(membrane.elements());
                collect_elements(content, out);
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("eps");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Whether two terms are structurally congruent.
pub fn congruent(a: &Term, b: &Term) -> bool {
    a == b
}
