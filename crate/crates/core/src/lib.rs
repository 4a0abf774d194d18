//! A typed rewriting engine for the Calculus of Looping Sequences.
//!
//! Terms are kept in structural-congruence normal form ([`syntax::Term`]),
//! rules are matched modulo congruence ([`matching`]), and the typed step
//! relation ([`inference::TypedSystem`]) only fires a rule when the result
//! is still a correct system under a Present/Required/Excluded typing.

pub mod inference;
pub mod matching;
pub mod rewrite;
pub mod syntax;
pub mod typesys;
