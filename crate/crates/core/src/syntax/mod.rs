//! Concrete and abstract syntax, canonical forms, and the congruence
//! decision for terms and patterns.

mod parse;
mod pattern;
mod raw;
mod term;

pub(crate) use parse::{check_kinds, Parser, Tok};
pub use parse::{parse_pattern, parse_term, ParseError, SyntaxError};
pub use pattern::{PComponent, PItem, Pattern, Var, VarKind};
pub use raw::{normalize, to_raw, RawSeq, RawTerm};
pub use term::{congruent, is_element_name, Component, Element, Sequence, Term};
