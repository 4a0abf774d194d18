//! Unnormalized term trees, as written, before structural congruence is
//! applied.

use super::term::{Component, Element, Sequence, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RawSeq {
    Eps,
    Elem(Element),
    Cat(Box<RawSeq>, Box<RawSeq>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RawTerm {
    Seq(RawSeq),
    Loop(RawSeq, Box<RawTerm>),
    Par(Box<RawTerm>, Box<RawTerm>),
}

impl RawSeq {
    pub fn cat(a: RawSeq, b: RawSeq) -> RawSeq {
        RawSeq::Cat(Box::new(a), Box::new(b))
    }

    pub fn elem(name: &str) -> RawSeq {
        RawSeq::Elem(Element::new(name))
    }

    fn flatten_into(&self, out: &mut Vec<Element>) {
        match self {
            RawSeq::Eps => {}
            RawSeq::Elem(e) => out.push(e.clone()),
            RawSeq::Cat(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
        }
    }

    pub fn flatten(&self) -> Sequence {
        let mut v = Vec::new();
        self.flatten_into(&mut v);
        Sequence::new(v)
    }

    /// Node count, ε included.
    pub fn nodes(&self) -> usize {
        match self {
            RawSeq::Eps | RawSeq::Elem(_) => 1,
            RawSeq::Cat(a, b) => 1 + a.nodes() + b.nodes(),
        }
    }
}

impl RawTerm {
    pub fn par(a: RawTerm, b: RawTerm) -> RawTerm {
        RawTerm::Par(Box::new(a), Box::new(b))
    }

    pub fn looping(s: RawSeq, t: RawTerm) -> RawTerm {
        RawTerm::Loop(s, Box::new(t))
    }

    pub fn nodes(&self) -> usize {
        match self {
            RawTerm::Seq(s) => s.nodes(),
            RawTerm::Loop(s, t) => 1 + s.nodes() + t.nodes(),
            RawTerm::Par(a, b) => 1 + a.nodes() + b.nodes(),
        }
    }
}

/// The canonical representative of the congruence class of `raw`.
pub fn normalize(raw: &RawTerm) -> Term {
    let mut comps = Vec::new();
    collect(raw, &mut comps);
    Term::from_components(comps)
}

fn collect(raw: &RawTerm, out: &mut Vec<Component>) {
    match raw {
        RawTerm::Seq(s) => out.extend(Component::seq(s.flatten())),
        RawTerm::Loop(s, t) => out.extend(Component::looping(&s.flatten(), normalize(t))),
        RawTerm::Par(a, b) => {
            collect(a, out);
            collect(b, out);
        }
    }
}

/// Re-expresses a canonical term as a raw tree (right-nested parallels and
/// sequences).
pub fn to_raw(t: &Term) -> RawTerm {
    fn seq(s: &Sequence) -> RawSeq {
        s.elements()
            .iter()
            .rev()
            .fold(None, |acc, e| {
                let head = RawSeq::Elem(e.clone());
                Some(match acc {
                    None => head,
                    Some(rest) => RawSeq::cat(head, rest),
                })
            })
            .unwrap_or(RawSeq::Eps)
    }
    t.components()
        .iter()
        .rev()
        .fold(None, |acc, c| {
            let here = match c {
                Component::Seq(s) => RawTerm::Seq(seq(s)),
                Component::Loop { membrane, content } => {
                    RawTerm::looping(seq(membrane), to_raw(content))
                }
            };
            Some(match acc {
                None => here,
                Some(rest) => RawTerm::par(here, rest),
            })
        })
        .unwrap_or(RawTerm::Seq(RawSeq::Eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_is_unit_of_par() {
        let t = RawTerm::par(RawTerm::Seq(RawSeq::elem("a")), RawTerm::Seq(RawSeq::Eps));
        assert_eq!(normalize(&t), normalize(&RawTerm::Seq(RawSeq::elem("a"))));
    }

    #[test]
    fn empty_loop_is_eps() {
        let t = RawTerm::looping(RawSeq::Eps, RawTerm::Seq(RawSeq::Eps));
        assert!(normalize(&t).is_empty());
    }

    #[test]
    fn to_raw_round_trips() {
        let t = RawTerm::par(
            RawTerm::looping(
                RawSeq::cat(RawSeq::elem("b"), RawSeq::elem("a")),
                RawTerm::Seq(RawSeq::elem("c")),
            ),
            RawTerm::Seq(RawSeq::elem("d")),
        );
        let n = normalize(&t);
        assert_eq!(normalize(&to_raw(&n)), n);
    }
}
