//! Lexer and recursive-descent parser for the term/pattern surface syntax.
//!
//! ```text
//! term   := par ; par := item ("|" item)* ; item := seq | loop | "eps"
//! loop   := "loop" "(" seqbody ")" ("{" term? "}")?
//! seq    := pitem ("." pitem)* ; seqbody := seq | "eps"
//! pitem  := IDENT | "$" IDENT | "~" IDENT | "?" IDENT
//! ```
//!
//! The same token stream and parser drive the environment and rule file
//! formats.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::pattern::{PComponent, PItem, Pattern, Var, VarKind};
use super::term::{is_element_name, Element, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Dollar,
    Tilde,
    Question,
    Dot,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Dollar => "`$`",
            Tok::Tilde => "`~`",
            Tok::Question => "`?`",
            Tok::Dot => "`.`",
            Tok::Bar => "`|`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Colon => "`:`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Arrow => "`=>`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// A syntax error with its 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable `{name}` is used as both {first} and {second}")]
    Kind {
        name: String,
        first: Var,
        second: Var,
    },
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&(i, c)) = chars.peek() {
        let (tl, tc) = (line, col);
        let single = |tok| Token {
            tok,
            line: tl,
            column: tc,
        };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        end = j + c.len_utf8();
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(single(Tok::Ident(text[i..end].to_string())));
            }
            '=' => {
                chars.next();
                col += 1;
                if chars.peek().map(|&(_, c)| c) == Some('>') {
                    chars.next();
                    col += 1;
                    out.push(single(Tok::Arrow));
                } else {
                    return Err(ParseError {
                        line: tl,
                        column: tc + 1,
                        expected: vec!["`>`".into()],
                        found: describe_char(chars.peek().map(|&(_, c)| c)),
                    });
                }
            }
            _ => {
                let tok = match c {
                    '$' => Tok::Dollar,
                    '~' => Tok::Tilde,
                    '?' => Tok::Question,
                    '.' => Tok::Dot,
                    '|' => Tok::Bar,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    _ => {
                        return Err(ParseError {
                            line,
                            column: col,
                            expected: vec!["token".into()],
                            found: describe_char(Some(c)),
                        })
                    }
                };
                chars.next();
                col += 1;
                out.push(single(tok));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

fn describe_char(c: Option<char>) -> String {
    match c {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

enum SurfaceItem {
    Item(PItem),
    TermVar(Var),
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    allow_vars: bool,
}

impl Parser {
    pub fn new(text: &str, allow_vars: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            allow_vars,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::Eof).map(|_| ())
    }

    fn item_expectation(&self) -> &'static [&'static str] {
        if self.allow_vars {
            &["element", "`$`var", "`~`var", "`?`var", "`loop`", "`eps`"]
        } else {
            &["element", "`loop`", "`eps`"]
        }
    }

    /// `par := item ("|" item)*`
    pub fn par(&mut self) -> Result<Pattern, ParseError> {
        let mut comps = Vec::new();
        let mut vars = Vec::new();
        loop {
            self.item(&mut comps, &mut vars)?;
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        Ok(Pattern::new(comps, vars))
    }

    fn item(&mut self, comps: &mut Vec<PComponent>, vars: &mut Vec<Var>) -> Result<(), ParseError> {
        if self.is_keyword("eps") {
            self.bump();
            return Ok(());
        }
        if self.is_keyword("loop") && *self.peek2() == Tok::LParen {
            self.bump();
            self.bump();
            let membrane = if self.is_keyword("eps") {
                self.bump();
                Vec::new()
            } else {
                self.seq(false)?.0
            };
            self.expect(Tok::RParen)?;
            let content = if self.eat(&Tok::LBrace) {
                let content = if *self.peek() == Tok::RBrace {
                    Pattern::empty()
                } else {
                    self.par()?
                };
                self.expect(Tok::RBrace)?;
                content
            } else {
                Pattern::empty()
            };
            comps.push(PComponent::Loop { membrane, content });
            return Ok(());
        }
        let (items, term_var) = self.seq(true)?;
        match term_var {
            Some(v) => vars.push(v),
            None => comps.push(PComponent::Seq(items)),
        }
        Ok(())
    }

    /// Parses `pitem ("." pitem)*`. A term variable is accepted only when
    /// `parallel` is set and it is the whole sequence.
    fn seq(&mut self, parallel: bool) -> Result<(Vec<PItem>, Option<Var>), ParseError> {
        let mut items = Vec::new();
        loop {
            let at = self.pos;
            match self.pitem()? {
                SurfaceItem::Item(i) => items.push(i),
                SurfaceItem::TermVar(v) => {
                    if parallel && items.is_empty() && *self.peek() != Tok::Dot {
                        return Ok((items, Some(v)));
                    }
                    self.pos = at;
                    return Err(self.error(&["element", "`~`var", "`?`var"]));
                }
            }
            if !self.eat(&Tok::Dot) {
                return Ok((items, None));
            }
        }
    }

    fn pitem(&mut self) -> Result<SurfaceItem, ParseError> {
        let kind = match self.peek() {
            Tok::Dollar => Some(VarKind::Term),
            Tok::Tilde => Some(VarKind::Seq),
            Tok::Question => Some(VarKind::Elem),
            _ => None,
        };
        if let Some(kind) = kind {
            if !self.allow_vars {
                return Err(self.error(self.item_expectation()));
            }
            self.bump();
            let name = self.ident("variable name")?;
            let v = Var::new(kind, &name);
            return Ok(if kind == VarKind::Term {
                SurfaceItem::TermVar(v)
            } else {
                SurfaceItem::Item(PItem::Var(v))
            });
        }
        match self.peek() {
            Tok::Ident(s) if is_element_name(s) => {
                let e = Element::new(s);
                self.bump();
                Ok(SurfaceItem::Item(PItem::Elem(e)))
            }
            _ => Err(self.error(self.item_expectation())),
        }
    }
}

/// Fails if the same name is used under two different variable markers.
pub(crate) fn check_kinds<'a>(
    occurrences: impl IntoIterator<Item = &'a Var>,
) -> Result<(), SyntaxError> {
    let mut seen: BTreeMap<&str, &Var> = BTreeMap::new();
    for v in occurrences {
        match seen.get(v.name()) {
            Some(prev) if prev.kind != v.kind => {
                return Err(SyntaxError::Kind {
                    name: v.name().to_string(),
                    first: (*prev).clone(),
                    second: v.clone(),
                })
            }
            Some(_) => {}
            None => {
                seen.insert(v.name(), v);
            }
        }
    }
    Ok(())
}

/// Parses a ground term and returns its canonical form.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text, false)?;
    let pat = p.par()?;
    p.expect_eof()?;
    Ok(pat.to_term().expect("ground parser yields ground patterns"))
}

/// Parses a pattern; `$X`, `~x`, and `?x` mark term, sequence, and element
/// variables.
pub fn parse_pattern(text: &str) -> Result<Pattern, SyntaxError> {
    let mut p = Parser::new(text, true)?;
    let pat = p.par()?;
    p.expect_eof()?;
    check_kinds(pat.var_occurrences())?;
    Ok(pat)
}
