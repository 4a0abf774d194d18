use std::fmt;

use crate::syntax::{PComponent, Pattern, Sequence, Term};

/// One membrane on the path from the root to the hole, together with what
/// sits beside the path inside that membrane.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level {
    pub membrane: Sequence,
    pub residual: Term,
}

impl Level {
    pub fn new(membrane: &Sequence, residual: Term) -> Self {
        Level {
            membrane: membrane.least_rotation(),
            residual,
        }
    }
}

/// A context `C`, with parallel frames flattened into residual multisets:
///
/// `top | ⟨S1⟩⌋(R1 | ⟨S2⟩⌋(R2 | … ⟨Sd⟩⌋(Rd | □)))`
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    top: Term,
    levels: Vec<Level>,
}

impl Context {
    /// The empty context □.
    pub fn hole() -> Self {
        Context::default()
    }

    pub fn new(top: Term, levels: Vec<Level>) -> Self {
        Context { top, levels }
    }

    /// `t | □`
    pub fn beside(t: Term) -> Self {
        Context {
            top: t,
            levels: Vec::new(),
        }
    }

    /// `⟨membrane⟩⌋C`
    pub fn within(membrane: &Sequence, inner: Context) -> Self {
        let mut levels = Vec::with_capacity(inner.levels.len() + 1);
        levels.push(Level::new(membrane, inner.top));
        levels.extend(inner.levels);
        Context {
            top: Term::empty(),
            levels,
        }
    }

    pub fn top(&self) -> &Term {
        &self.top
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Number of membranes enclosing the hole.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Whether this is exactly □.
    pub fn is_hole(&self) -> bool {
        self.top.is_empty() && self.levels.is_empty()
    }

    /// `C[t]`, normalized.
    pub fn plug(&self, t: &Term) -> Term {
        let mut inner = t.clone();
        for level in self.levels.iter().rev() {
            inner = Term::looping(&level.membrane, level.residual.par(&inner));
        }
        self.top.par(&inner)
    }

    /// `C[p]` for a pattern `p`.
    pub fn plug_pattern(&self, p: &Pattern) -> Pattern {
        let mut inner = p.clone();
        for level in self.levels.iter().rev() {
            let content = Pattern::from(&level.residual).par(&inner);
            inner = Pattern::new(
                vec![PComponent::Loop {
                    membrane: (&level.membrane).into(),
                    content,
                }],
                Vec::new(),
            );
        }
        Pattern::from(&self.top).par(&inner)
    }

    /// `self[inner]`: the hole of `self` is replaced by `inner`.
    pub fn compose(&self, inner: &Context) -> Context {
        let mut out = self.clone();
        match out.levels.last_mut() {
            Some(last) => last.residual = last.residual.par(&inner.top),
            None => out.top = out.top.par(&inner.top),
        }
        out.levels.extend(inner.levels.iter().cloned());
        out
    }

    /// The part of the context that determines how the hole is typed.
    ///
    /// Up to one enclosing membrane the whole context is returned;
    /// otherwise only the two innermost membranes around the hole are
    /// kept: `⟨S2⟩⌋(⟨S1⟩⌋(□ | T1) | T2)`.
    pub fn core(&self) -> Context {
        let d = self.levels.len();
        if d <= 1 {
            return self.clone();
        }
        Context {
            top: Term::empty(),
            levels: self.levels[d - 2..].to_vec(),
        }
    }

    /// Splits `self` as `outer[core]`, returning `outer`.
    pub fn outside_core(&self) -> Context {
        let d = self.levels.len();
        if d <= 1 {
            return Context::hole();
        }
        Context {
            top: self.top.clone(),
            levels: self.levels[..d - 2].to_vec(),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn frame(f: &mut fmt::Formatter<'_>, residual: &Term, rest: &[Level]) -> fmt::Result {
            if !residual.is_empty() {
                write!(f, "{residual} | ")?;
            }
            match rest.split_first() {
                None => f.write_str("[]"),
                Some((level, deeper)) => {
                    write!(f, "loop({}){{", level.membrane)?;
                    frame(f, &level.residual, deeper)?;
                    f.write_str("}")
                }
            }
        }
        frame(f, &self.top, &self.levels)
    }
}
