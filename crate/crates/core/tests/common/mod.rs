#![allow(dead_code)]

use std::collections::BTreeSet;

use cls_core::matching::Context;
use cls_core::rewrite::Rule;
use cls_core::syntax::{
    Component, Element, PComponent, PItem, Pattern, Sequence, Term, Var, VarKind,
};
use cls_core::typesys::{type_of_term, BasicType, Basis, PreType, TypeEnv, TypeSet};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const REPELLENCY_ENV: &str = "
    type tA excludes {tB};
    type tB excludes {tA};
    type tM;
    elem a : tA;
    elem b : tB;
    elem m : tM;
";

pub const ABSORPTION_ENV: &str = "
    type tC;
    type tR;
    type tC2 requires {tR};
    type tM;
    elem c : tC;
    elem r : tR;
    elem c' : tC2;
    elem m : tM;
";

pub fn el(name: &str) -> Element {
    Element::new(name)
}

// ---------------------------------------------------------------------
// exhaustive enumeration

/// All sequences over `alphabet` of exactly length `n`.
pub fn sequences(alphabet: &[Element], n: usize) -> Vec<Sequence> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s: Vec<Element>| {
                alphabet.iter().map(move |e| {
                    let mut s = s.clone();
                    s.push(e.clone());
                    s
                })
            })
            .collect();
    }
    out.into_iter().map(Sequence::new).collect()
}

/// All canonical terms of size ≤ `max`, indexed by exact size.
pub fn terms_by_size(alphabet: &[Element], max: usize) -> Vec<Vec<Term>> {
    let mut terms: Vec<Vec<Term>> = vec![vec![Term::empty()]];
    let mut comps: Vec<Vec<Component>> = vec![Vec::new()];
    for n in 1..=max {
        let mut cs: Vec<Component> = sequences(alphabet, n)
            .into_iter()
            .filter_map(Component::seq)
            .collect();
        let mut loops = BTreeSet::new();
        for j in 0..n {
            for m in sequences(alphabet, j) {
                for content in &terms[n - 1 - j] {
                    loops.extend(Component::looping(&m, content.clone()));
                }
            }
        }
        cs.extend(loops);
        comps.push(cs);
        let all: Vec<(usize, &Component)> = comps
            .iter()
            .enumerate()
            .flat_map(|(k, v)| v.iter().map(move |c| (k, c)))
            .collect();
        let mut found = BTreeSet::new();
        multisets(&all, 0, n, &mut Vec::new(), &mut |picked| {
            found.insert(Term::from_components(picked.iter().cloned()));
        });
        terms.push(found.into_iter().collect());
    }
    terms
}

fn multisets(
    all: &[(usize, &Component)],
    start: usize,
    left: usize,
    acc: &mut Vec<Component>,
    emit: &mut dyn FnMut(&[Component]),
) {
    if left == 0 {
        emit(acc);
        return;
    }
    for i in start..all.len() {
        let (size, c) = all[i];
        if size <= left {
            acc.push(c.clone());
            multisets(all, i, left - size, acc, emit);
            acc.pop();
        }
    }
}

/// All normalized patterns of size ≤ `max` over `alphabet` and `pool`.
pub fn patterns_up_to(alphabet: &[Element], pool: &[Var], max: usize) -> Vec<Pattern> {
    let items: Vec<PItem> = alphabet
        .iter()
        .cloned()
        .map(PItem::Elem)
        .chain(
            pool.iter()
                .filter(|v| v.kind != VarKind::Term)
                .cloned()
                .map(PItem::Var),
        )
        .collect();
    let term_vars: Vec<Var> = pool
        .iter()
        .filter(|v| v.kind == VarKind::Term)
        .cloned()
        .collect();
    let item_seqs = |n: usize| -> Vec<Vec<PItem>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|s: Vec<PItem>| {
                    items.iter().map(move |i| {
                        let mut s = s.clone();
                        s.push(i.clone());
                        s
                    })
                })
                .collect();
        }
        out
    };
    // parallel units: a component or a term variable, by size
    #[derive(Clone)]
    enum Unit {
        C(PComponent),
        V(Var),
    }
    let mut pats: Vec<Vec<Pattern>> = vec![vec![Pattern::empty()]];
    let mut units: Vec<Vec<Unit>> = vec![Vec::new()];
    for n in 1..=max {
        let mut us: Vec<Unit> = item_seqs(n)
            .into_iter()
            .map(|s| Unit::C(PComponent::Seq(s)))
            .collect();
        if n == 1 {
            us.extend(term_vars.iter().cloned().map(Unit::V));
        }
        for j in 0..n {
            for m in item_seqs(j) {
                for content in &pats[n - 1 - j] {
                    if j == 0 && content.is_empty() {
                        continue;
                    }
                    us.push(Unit::C(PComponent::Loop {
                        membrane: m.clone(),
                        content: content.clone(),
                    }));
                }
            }
        }
        units.push(us);
        let all: Vec<(usize, &Unit)> = units
            .iter()
            .enumerate()
            .flat_map(|(k, v)| v.iter().map(move |u| (k, u)))
            .collect();
        let mut found = BTreeSet::new();
        fn rec(
            all: &[(usize, &Unit)],
            start: usize,
            left: usize,
            acc: &mut Vec<Unit>,
            found: &mut BTreeSet<Pattern>,
        ) {
            if left == 0 {
                let mut cs = Vec::new();
                let mut vs = Vec::new();
                for u in acc.iter() {
                    match u {
                        Unit::C(c) => cs.push(c.clone()),
                        Unit::V(v) => vs.push(v.clone()),
                    }
                }
                found.insert(Pattern::new(cs, vs));
                return;
            }
            for i in start..all.len() {
                let (size, u) = all[i];
                if size <= left {
                    acc.push(u.clone());
                    rec(all, i, left - size, acc, found);
                    acc.pop();
                }
            }
        }
        rec(&all, 0, n, &mut Vec::new(), &mut found);
        pats.push(found.into_iter().collect());
    }
    pats.into_iter().flatten().collect()
}

// ---------------------------------------------------------------------
// random generation

/// A random environment over `alphabet` with 2 to 4 basic types.
pub fn random_env(rng: &mut StdRng, alphabet: &[&str]) -> TypeEnv {
    let n = rng.random_range(2..=4);
    let names: Vec<BasicType> = (0..n).map(|i| BasicType::new(&format!("t{i}"))).collect();
    let mut types = Vec::new();
    for t in &names {
        let mut req = TypeSet::new();
        let mut excl = TypeSet::new();
        for u in &names {
            if u == t {
                continue;
            }
            let x: f64 = rng.random();
            if x < 0.2 {
                req.insert(u.clone());
            } else if x < 0.4 {
                excl.insert(u.clone());
            }
        }
        types.push((t.clone(), req, excl));
    }
    let elems = alphabet
        .iter()
        .map(|e| (el(e), names.choose(rng).unwrap().clone()))
        .collect::<Vec<_>>();
    TypeEnv::new(types, elems).expect("generated environment is valid")
}

pub fn random_seq(rng: &mut StdRng, alphabet: &[Element], min: usize, max: usize) -> Sequence {
    let n = rng.random_range(min..=max);
    Sequence::new(
        (0..n)
            .map(|_| alphabet.choose(rng).unwrap().clone())
            .collect(),
    )
}

/// A random ground term with at most `width` components per level and
/// loops nested at most `depth` deep.
pub fn random_term(rng: &mut StdRng, alphabet: &[Element], width: usize, depth: usize) -> Term {
    let n = rng.random_range(0..=width);
    let mut comps = Vec::new();
    for _ in 0..n {
        if depth > 0 && rng.random_bool(0.45) {
            let m = random_seq(rng, alphabet, 0, 2);
            let content = random_term(rng, alphabet, width, depth - 1);
            comps.extend(Component::looping(&m, content));
        } else {
            comps.extend(Component::seq(random_seq(rng, alphabet, 1, 2)));
        }
    }
    Term::from_components(comps)
}

/// A random term that types as `(P, ∅)`.
pub fn random_correct_term(
    rng: &mut StdRng,
    env: &TypeEnv,
    alphabet: &[Element],
    width: usize,
    depth: usize,
) -> Option<Term> {
    for _ in 0..200 {
        let t = random_term(rng, alphabet, width, depth);
        if matches!(type_of_term(&t, env), Ok(ty) if ty.required.is_empty()) {
            return Some(t);
        }
    }
    None
}

/// A random term typable with any requirement set.
pub fn random_typable_term(
    rng: &mut StdRng,
    env: &TypeEnv,
    alphabet: &[Element],
    width: usize,
    depth: usize,
) -> (Term, PreType) {
    loop {
        let t = random_term(rng, alphabet, width, depth);
        if let Ok(ty) = type_of_term(&t, env) {
            return (t, ty);
        }
    }
}

pub fn random_subset(rng: &mut StdRng, universe: &[BasicType], p: f64) -> TypeSet {
    universe
        .iter()
        .filter(|_| rng.random_bool(p))
        .cloned()
        .collect()
}

/// A random well-formed type over the environment's basic types.
pub fn random_wf_type(rng: &mut StdRng, env: &TypeEnv) -> PreType {
    let universe: Vec<BasicType> = env.basic_types().cloned().collect();
    loop {
        let ty = PreType::new(
            random_subset(rng, &universe, 0.4),
            random_subset(rng, &universe, 0.25),
        );
        if env.well_formed(&ty).unwrap() {
            return ty;
        }
    }
}

/// A random type, not necessarily well formed.
pub fn random_any_type(rng: &mut StdRng, env: &TypeEnv) -> PreType {
    let universe: Vec<BasicType> = env.basic_types().cloned().collect();
    PreType::new(
        random_subset(rng, &universe, 0.4),
        random_subset(rng, &universe, 0.3),
    )
}

/// `({t}, R_t)` for a random basic type `t`.
pub fn random_element_type(rng: &mut StdRng, env: &TypeEnv) -> PreType {
    let universe: Vec<BasicType> = env.basic_types().cloned().collect();
    let t = universe.choose(rng).unwrap().clone();
    let r = env.required_of(&t).unwrap().clone();
    PreType::new(TypeSet::from([t]), r)
}

/// A random basis for `vars`: element variables get element types, the
/// others well-formed types.
pub fn random_basis(rng: &mut StdRng, env: &TypeEnv, vars: &BTreeSet<Var>) -> Basis {
    let mut basis = Basis::new();
    for v in vars {
        let ty = if v.kind == VarKind::Elem {
            random_element_type(rng, env)
        } else {
            random_wf_type(rng, env)
        };
        basis.insert(v.clone(), ty);
    }
    basis
}

fn random_items(
    rng: &mut StdRng,
    alphabet: &[Element],
    vars: &[Var],
    min: usize,
    max: usize,
) -> Vec<PItem> {
    let seq_vars: Vec<&Var> = vars.iter().filter(|v| v.kind != VarKind::Term).collect();
    let n = rng.random_range(min..=max);
    (0..n)
        .map(|_| {
            if !seq_vars.is_empty() && rng.random_bool(0.35) {
                PItem::Var((*seq_vars.choose(rng).unwrap()).clone())
            } else {
                PItem::Elem(alphabet.choose(rng).unwrap().clone())
            }
        })
        .collect()
}

/// A random pattern drawing variables from `vars` (not all need occur).
pub fn random_pattern(
    rng: &mut StdRng,
    alphabet: &[Element],
    vars: &[Var],
    width: usize,
    depth: usize,
) -> Pattern {
    let term_vars: Vec<&Var> = vars.iter().filter(|v| v.kind == VarKind::Term).collect();
    let n = rng.random_range(0..=width);
    let mut comps = Vec::new();
    let mut tvs = Vec::new();
    for _ in 0..n {
        let x: f64 = rng.random();
        if !term_vars.is_empty() && x < 0.25 {
            tvs.push((*term_vars.choose(rng).unwrap()).clone());
        } else if depth > 0 && x < 0.6 {
            comps.push(PComponent::Loop {
                membrane: random_items(rng, alphabet, vars, 0, 2),
                content: random_pattern(rng, alphabet, vars, width, depth - 1),
            });
        } else {
            comps.push(PComponent::Seq(random_items(rng, alphabet, vars, 1, 2)));
        }
    }
    Pattern::new(comps, tvs)
}

pub const VAR_POOL: [(VarKind, &str); 6] = [
    (VarKind::Term, "X"),
    (VarKind::Term, "Y"),
    (VarKind::Seq, "x"),
    (VarKind::Seq, "y"),
    (VarKind::Elem, "z"),
    (VarKind::Elem, "w"),
];

/// Up to `max` distinct variables from [`VAR_POOL`].
pub fn random_vars(rng: &mut StdRng, max: usize) -> Vec<Var> {
    let n = rng.random_range(0..=max);
    let picked: Vec<&(VarKind, &str)> = VAR_POOL.choose_multiple(rng, n).collect();
    picked
        .into_iter()
        .map(|(k, name)| Var::new(*k, name))
        .collect()
}

/// A random decomposition `t ≡ C[T]` with `T` a sub-multiset at some
/// nesting level.
pub fn random_split(rng: &mut StdRng, t: &Term, descend: f64) -> (Context, Term) {
    let loops: Vec<usize> = t
        .components()
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Component::Loop { .. }))
        .map(|(i, _)| i)
        .collect();
    if !loops.is_empty() && rng.random_bool(descend) {
        let i = *loops.choose(rng).unwrap();
        let Component::Loop { membrane, content } = &t.components()[i] else {
            unreachable!()
        };
        let rest = Term::from_components(
            t.components()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone()),
        );
        let (inner, part) = random_split(rng, content, descend);
        let ctx = Context::beside(rest).compose(&Context::within(membrane, inner));
        return (ctx, part);
    }
    let mut chosen = Vec::new();
    let mut rest = Vec::new();
    for c in t.components() {
        if rng.random_bool(0.5) {
            chosen.push(c.clone());
        } else {
            rest.push(c.clone());
        }
    }
    (
        Context::beside(Term::from_components(rest)),
        Term::from_components(chosen),
    )
}

/// Turns a ground term into a pattern that matches it, abstracting some
/// parts with fresh variables.
pub fn generalize(rng: &mut StdRng, t: &Term, fresh: &mut usize) -> Pattern {
    let next = |kind: VarKind, fresh: &mut usize| {
        *fresh += 1;
        let prefix = match kind {
            VarKind::Term => "T",
            VarKind::Seq => "s",
            VarKind::Elem => "e",
        };
        Var::new(kind, &format!("{prefix}{fresh}"))
    };
    let mut comps = Vec::new();
    let mut tvs = Vec::new();
    for c in t.components() {
        match c {
            Component::Seq(s) => {
                let items = s
                    .elements()
                    .iter()
                    .map(|e| {
                        if rng.random_bool(0.3) {
                            PItem::Var(next(VarKind::Elem, fresh))
                        } else {
                            PItem::Elem(e.clone())
                        }
                    })
                    .collect();
                comps.push(PComponent::Seq(items));
            }
            Component::Loop { membrane, content } => {
                let membrane = if rng.random_bool(0.5) {
                    vec![PItem::Var(next(VarKind::Seq, fresh))]
                } else {
                    membrane.into()
                };
                let content = if rng.random_bool(0.5) {
                    Pattern::var(next(VarKind::Term, fresh))
                } else {
                    generalize(rng, content, fresh)
                };
                comps.push(PComponent::Loop { membrane, content });
            }
        }
    }
    if rng.random_bool(0.2) {
        tvs.push(next(VarKind::Term, fresh));
    }
    Pattern::new(comps, tvs)
}

/// A rule whose left side occurs in `t` (when possible) and whose right
/// side reuses its variables.
pub fn random_rule(rng: &mut StdRng, name: &str, t: &Term, alphabet: &[Element]) -> Option<Rule> {
    for _ in 0..20 {
        let (_, part) = random_split(rng, t, 0.5);
        let mut fresh = 0;
        let lhs = if part.is_empty() || rng.random_bool(0.2) {
            let vars = random_vars(rng, 2);
            random_pattern(rng, alphabet, &vars, 2, 1)
        } else {
            generalize(rng, &part, &mut fresh)
        };
        if lhs.is_empty() {
            continue;
        }
        let vars: Vec<Var> = lhs.vars().into_iter().collect();
        let rhs = random_pattern(rng, alphabet, &vars, 3, 2);
        if let Ok(r) = Rule::new(name, lhs, rhs) {
            return Some(r);
        }
    }
    None
}
