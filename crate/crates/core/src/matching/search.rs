//! Backtracking enumeration of all matches modulo structural congruence.

use std::collections::BTreeMap;

use super::{Binding, MatchError};
use crate::syntax::{Component, Element, PComponent, PItem, Pattern, Term, Var, VarKind};

pub(super) type Partial = BTreeMap<Var, Binding>;

pub(super) struct Search {
    budget: usize,
    spent: usize,
    loops_vanish: bool,
}

impl Search {
    /// With `loops_vanish` unset, a pattern loop must match a loop of the
    /// term even when it could instantiate to `loop(eps){}`.
    pub fn new(budget: usize, loops_vanish: bool) -> Self {
        Search {
            budget,
            spent: 0,
            loops_vanish,
        }
    }

    fn charge(&mut self, n: usize) -> Result<(), MatchError> {
        self.spent += n;
        if self.spent > self.budget {
            Err(MatchError::BudgetExceeded {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// All extensions of `b` under which `p` instantiates to the multiset
    /// `comps`.
    pub fn pattern(
        &mut self,
        p: &Pattern,
        comps: &[Component],
        b: Partial,
    ) -> Result<Vec<Partial>, MatchError> {
        let no_term_vars = p.term_vars().is_empty();
        let mut states: Vec<(Partial, Vec<Component>)> = vec![(b, comps.to_vec())];
        for (k, pc) in p.components().iter().enumerate() {
            let left_after = p.components().len() - k - 1;
            let mut next = Vec::new();
            for (b, rem) in states {
                if no_term_vars && rem.len() > left_after + 1 {
                    continue;
                }
                if !(no_term_vars && rem.len() > left_after) {
                    for b2 in self.vanish(pc, &b)? {
                        next.push((b2, rem.clone()));
                    }
                }
                for i in 0..rem.len() {
                    if i > 0 && rem[i] == rem[i - 1] {
                        continue;
                    }
                    for b2 in self.component(pc, &rem[i], &b)? {
                        let mut r = rem.clone();
                        r.remove(i);
                        next.push((b2, r));
                    }
                }
            }
            self.charge(next.len())?;
            if next.is_empty() {
                return Ok(Vec::new());
            }
            states = next;
        }
        let mut out = Vec::new();
        for (b, rem) in states {
            out.extend(distribute(p.term_vars(), rem, b));
        }
        self.charge(out.len())?;
        Ok(out)
    }

    fn component(
        &mut self,
        pc: &PComponent,
        c: &Component,
        b: &Partial,
    ) -> Result<Vec<Partial>, MatchError> {
        match (pc, c) {
            (PComponent::Seq(items), Component::Seq(s)) => {
                Ok(items_match(items, s.elements(), b.clone()))
            }
            (
                PComponent::Loop { membrane, content },
                Component::Loop {
                    membrane: gm,
                    content: gc,
                },
            ) => {
                let mut out = Vec::new();
                for rot in gm.rotations() {
                    for b2 in items_match(membrane, rot.elements(), b.clone()) {
                        out.extend(self.pattern(content, gc.components(), b2)?);
                    }
                }
                Ok(out)
            }
            _ => Ok(Vec::new()),
        }
    }

    /// Ways for a pattern component to instantiate to ε.
    fn vanish(&mut self, pc: &PComponent, b: &Partial) -> Result<Vec<Partial>, MatchError> {
        match pc {
            PComponent::Seq(items) => Ok(items_match(items, &[], b.clone())),
            PComponent::Loop { .. } if !self.loops_vanish => Ok(Vec::new()),
            PComponent::Loop { membrane, content } => {
                let mut out = Vec::new();
                for b2 in items_match(membrane, &[], b.clone()) {
                    out.extend(self.pattern(content, &[], b2)?);
                }
                Ok(out)
            }
        }
    }
}

/// Matches a sequence pattern against a concrete element list.
fn items_match(items: &[PItem], elems: &[Element], b: Partial) -> Vec<Partial> {
    let Some((first, rest)) = items.split_first() else {
        return if elems.is_empty() {
            vec![b]
        } else {
            Vec::new()
        };
    };
    let min_len = items
        .iter()
        .filter(|i| !matches!(i, PItem::Var(v) if v.kind == VarKind::Seq))
        .count();
    if min_len > elems.len() {
        return Vec::new();
    }
    match first {
        PItem::Elem(e) => match elems.split_first() {
            Some((x, tail)) if x == e => items_match(rest, tail, b),
            _ => Vec::new(),
        },
        PItem::Var(v) if v.kind == VarKind::Elem => {
            let Some((x, tail)) = elems.split_first() else {
                return Vec::new();
            };
            match b.get(v) {
                Some(Binding::Elem(bound)) if bound == x => items_match(rest, tail, b),
                Some(_) => Vec::new(),
                None => {
                    let mut b = b;
                    b.insert(v.clone(), Binding::Elem(x.clone()));
                    items_match(rest, tail, b)
                }
            }
        }
        PItem::Var(v) => match b.get(v) {
            Some(Binding::Seq(s)) => {
                if elems.starts_with(s.elements()) {
                    let n = s.len();
                    items_match(rest, &elems[n..], b)
                } else {
                    Vec::new()
                }
            }
            Some(_) => Vec::new(),
            None => {
                let mut out = Vec::new();
                for k in 0..=elems.len() {
                    let mut b2 = b.clone();
                    b2.insert(v.clone(), Binding::Seq(elems[..k].to_vec().into()));
                    out.extend(items_match(rest, &elems[k..], b2));
                }
                out
            }
        },
    }
}

/// Splits what is left at a parallel level among its term variables.
fn distribute(vars: &[Var], rem: Vec<Component>, b: Partial) -> Vec<Partial> {
    let mut groups: Vec<(&Var, usize)> = Vec::new();
    for v in vars {
        match groups.last_mut() {
            Some((last, n)) if *last == v => *n += 1,
            _ => groups.push((v, 1)),
        }
    }
    let mut rest = Term::from_components(rem);
    let mut unbound = Vec::new();
    for (v, mult) in groups {
        match b.get(v) {
            Some(Binding::Term(t)) => {
                for _ in 0..mult {
                    match rest.minus(t) {
                        Some(r) => rest = r,
                        None => return Vec::new(),
                    }
                }
            }
            Some(_) => return Vec::new(),
            None => unbound.push((v, mult)),
        }
    }
    if unbound.is_empty() {
        return if rest.is_empty() { vec![b] } else { Vec::new() };
    }

    let mut counted: Vec<(&Component, usize)> = Vec::new();
    for c in rest.components() {
        match counted.last_mut() {
            Some((last, n)) if *last == c => *n += 1,
            _ => counted.push((c, 1)),
        }
    }
    let mults: Vec<usize> = unbound.iter().map(|(_, m)| *m).collect();
    let mut out = Vec::new();
    let mut shares: Vec<Vec<Component>> = vec![Vec::new(); unbound.len()];
    assign(&counted, &mults, &mut shares, &mut |shares| {
        let mut b2 = b.clone();
        for ((v, _), share) in unbound.iter().zip(shares) {
            b2.insert(
                (*v).clone(),
                Binding::Term(Term::from_components(share.iter().cloned())),
            );
        }
        out.push(b2);
    });
    out
}

/// Enumerates every way to hand out `counted` so that variable `j`
/// receives `mults[j]` identical shares.
fn assign(
    counted: &[(&Component, usize)],
    mults: &[usize],
    shares: &mut Vec<Vec<Component>>,
    emit: &mut dyn FnMut(&[Vec<Component>]),
) {
    let Some(((c, count), tail)) = counted.split_first() else {
        emit(shares);
        return;
    };
    split_count(
        *count,
        mults,
        0,
        &mut vec![0; mults.len()],
        &mut |per_var| {
            for (j, &n) in per_var.iter().enumerate() {
                shares[j].extend(std::iter::repeat_n((*c).clone(), n));
            }
            assign(tail, mults, shares, emit);
            for (j, &n) in per_var.iter().enumerate() {
                let len = shares[j].len();
                shares[j].truncate(len - n);
            }
        },
    );
}

/// All `n` with `sum(n[j] * mults[j]) == count`.
fn split_count(
    count: usize,
    mults: &[usize],
    j: usize,
    acc: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if j == mults.len() {
        if count == 0 {
            emit(acc);
        }
        return;
    }
    for n in 0..=count / mults[j] {
        acc[j] = n;
        split_count(count - n * mults[j], mults, j + 1, acc, emit);
    }
    acc[j] = 0;
}
