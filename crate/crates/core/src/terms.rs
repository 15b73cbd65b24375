//! CCS-style terms (prefix, choice, parallel without communication) and their
//! translation into configuration structures.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! sum    ::= par ("+" par)*
//! par    ::= prefix ("|" prefix)*
//! prefix ::= action "." prefix | action | "0" | "(" sum ")"
//! ```
//!
//! A bare action `a` abbreviates `a.0`. Whitespace is ignored.

use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{ConfigStructure, Family, Label, Limits};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Nil,
    Prefix(Label, Box<Term>),
    Choice(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
}

impl Term {
    pub fn prefix(label: Label, body: Term) -> Term {
        Term::Prefix(label, Box::new(body))
    }

    pub fn choice(left: Term, right: Term) -> Term {
        Term::Choice(Box::new(left), Box::new(right))
    }

    pub fn par(left: Term, right: Term) -> Term {
        Term::Par(Box::new(left), Box::new(right))
    }

    /// Number of prefixes, i.e. of events in the translation.
    pub fn size(&self) -> usize {
        match self {
            Term::Nil => 0,
            Term::Prefix(_, p) => 1 + p.size(),
            Term::Choice(l, r) | Term::Par(l, r) => l.size() + r.size(),
        }
    }

    /// Event occurrences in pre-order, the order in which [`translate`]
    /// numbers events (`e1`, `e2`, ...).
    pub fn occurrences(&self) -> Vec<(OccurrencePath, Label)> {
        fn walk(t: &Term, path: &mut Vec<Branch>, out: &mut Vec<(OccurrencePath, Label)>) {
            match t {
                Term::Nil => {}
                Term::Prefix(a, body) => {
                    out.push((OccurrencePath(path.clone()), a.clone()));
                    path.push(Branch::Body);
                    walk(body, path, out);
                    path.pop();
                }
                Term::Choice(l, r) | Term::Par(l, r) => {
                    path.push(Branch::Left);
                    walk(l, path, out);
                    path.pop();
                    path.push(Branch::Right);
                    walk(r, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Nil => f.write_str("0"),
            Term::Prefix(a, body) => match body.as_ref() {
                Term::Nil => write!(f, "{a}"),
                Term::Prefix(..) => write!(f, "{a}.{body}"),
                _ => write!(f, "{a}.({body})"),
            },
            Term::Choice(l, r) => match r.as_ref() {
                Term::Choice(..) => write!(f, "{l} + ({r})"),
                _ => write!(f, "{l} + {r}"),
            },
            Term::Par(l, r) => {
                match l.as_ref() {
                    Term::Choice(..) => write!(f, "({l})")?,
                    _ => write!(f, "{l}")?,
                }
                match r.as_ref() {
                    Term::Choice(..) | Term::Par(..) => write!(f, " | ({r})"),
                    _ => write!(f, " | {r}"),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Left,
    Right,
    Body,
}

/// Position of a prefix inside a term tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccurrencePath(pub Vec<Branch>);

impl fmt::Display for OccurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let tags: Vec<&str> = self
            .0
            .iter()
            .map(|b| match b {
                Branch::Left => "L",
                Branch::Right => "R",
                Branch::Body => "B",
            })
            .collect();
        f.write_str(&tags.join("."))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Nil,
    Action(String),
    Dot,
    Plus,
    Bar,
    Open,
    Close,
    End,
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '0' => Token::Nil,
            '.' => Token::Dot,
            '+' => Token::Plus,
            '|' => Token::Bar,
            '(' => Token::Open,
            ')' => Token::Close,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((i, Token::Action(name)));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        tokens.push((i, tok));
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (usize, Token) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax {
            position: self.tokens[self.pos].0,
            message: message.to_string(),
        })
    }

    fn sum(&mut self) -> Result<Term> {
        let mut t = self.par()?;
        while *self.peek() == Token::Plus {
            self.bump();
            t = Term::choice(t, self.par()?);
        }
        Ok(t)
    }

    fn par(&mut self) -> Result<Term> {
        let mut t = self.prefix()?;
        while *self.peek() == Token::Bar {
            self.bump();
            t = Term::par(t, self.prefix()?);
        }
        Ok(t)
    }

    fn prefix(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Token::Nil => {
                self.bump();
                Ok(Term::Nil)
            }
            Token::Action(name) => {
                self.bump();
                let label = Label::new(name).expect("lexer yields valid labels");
                if *self.peek() == Token::Dot {
                    self.bump();
                    Ok(Term::prefix(label, self.prefix()?))
                } else {
                    Ok(Term::prefix(label, Term::Nil))
                }
            }
            Token::Open => {
                self.bump();
                let t = self.sum()?;
                if *self.peek() != Token::Close {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(t)
            }
            _ => self.error("expected an action, `0` or `(`"),
        }
    }
}

pub fn parse(text: &str) -> Result<Term> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let t = p.sum()?;
    if *p.peek() != Token::End {
        return p.error("unexpected trailing input");
    }
    Ok(t)
}

/// Translates a term under the default [`Limits`].
pub fn translate(term: &Term) -> Result<ConfigStructure> {
    translate_with(term, &Limits::default())
}

pub fn translate_with(term: &Term, limits: &Limits) -> Result<ConfigStructure> {
    if term.size() > limits.max_events {
        return Err(Error::Capacity {
            what: "event count",
            actual: term.size(),
            limit: limits.max_events,
        });
    }
    let family = family_of(term, limits)?;
    if family.num_configurations() > limits.max_configurations {
        return Err(Error::Capacity {
            what: "configuration count",
            actual: family.num_configurations(),
            limit: limits.max_configurations,
        });
    }
    Ok(family.into_structure())
}

fn family_of(term: &Term, limits: &Limits) -> Result<Family> {
    match term {
        Term::Nil => Ok(Family::nil()),
        Term::Prefix(a, body) => Family::prefix(a.clone(), family_of(body, limits)?),
        Term::Choice(l, r) => Family::choice(family_of(l, limits)?, family_of(r, limits)?),
        Term::Par(l, r) => Family::parallel(family_of(l, limits)?, family_of(r, limits)?, limits),
    }
}

/// Parses and translates in one go.
pub fn translate_str(text: &str) -> Result<ConfigStructure> {
    translate(&parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate;

    fn act(a: &str) -> Label {
        Label::new(a).unwrap()
    }

    #[test]
    fn parses_interleaving_law() {
        let t = parse("a.b + b.a").unwrap();
        let expected = Term::choice(
            Term::prefix(act("a"), Term::prefix(act("b"), Term::Nil)),
            Term::prefix(act("b"), Term::prefix(act("a"), Term::Nil)),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn precedence_prefix_par_choice() {
        let t = parse("a.b | c + d").unwrap();
        let expected = Term::choice(
            Term::par(
                Term::prefix(act("a"), Term::prefix(act("b"), Term::Nil)),
                Term::prefix(act("c"), Term::Nil),
            ),
            Term::prefix(act("d"), Term::Nil),
        );
        assert_eq!(t, expected);
        // left associative
        assert_eq!(
            parse("a+b+c").unwrap(),
            Term::choice(
                Term::choice(
                    Term::prefix(act("a"), Term::Nil),
                    Term::prefix(act("b"), Term::Nil)
                ),
                Term::prefix(act("c"), Term::Nil)
            )
        );
    }

    #[test]
    fn absorption_left_side_parses() {
        let t = parse("(a | (b + c)) + (a | b) + ((a + c) | b)").unwrap();
        assert_eq!(t.size(), 8);
        assert!(matches!(t, Term::Choice(..)));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("a..b") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("(a | b").is_err());
        assert!(parse("a b").is_err());
        assert!(parse("").is_err());
        assert!(parse("a + $").is_err());
    }

    #[test]
    fn translation_sizes() {
        let s = translate_str("a | a").unwrap();
        assert_eq!((s.num_events(), s.num_configurations()), (2, 4));
        let s = translate_str("a.a").unwrap();
        assert_eq!((s.num_events(), s.num_configurations()), (2, 3));
        assert!(s.configuration(&["e1", "e2"]).is_ok());
        assert!(s.configuration(&["e2"]).is_err());
        let s = translate_str("a.b + b.a").unwrap();
        assert_eq!((s.num_events(), s.num_configurations()), (4, 5));
        let s = translate_str("0").unwrap();
        assert_eq!((s.num_events(), s.num_configurations()), (0, 1));
    }

    #[test]
    fn occurrences_follow_event_numbering() {
        let t = parse("a.b | c").unwrap();
        let occ = t.occurrences();
        assert_eq!(occ.len(), 3);
        assert_eq!(occ[0].0.to_string(), "L");
        assert_eq!(occ[1].0.to_string(), "L.B");
        assert_eq!(occ[2].0.to_string(), "R");
        let s = translate(&t).unwrap();
        for (i, (_, label)) in occ.iter().enumerate() {
            let e = s.event_index(&format!("e{}", i + 1)).unwrap();
            assert_eq!(s.label(e), label);
        }
    }

    #[test]
    fn display_reparses_to_the_same_term() {
        for text in [
            "a.(b + c) | d",
            "(a | a) + a.a",
            "a | (b | c)",
            "a + (b + c)",
            "0",
            "(a + b) | c",
        ] {
            let t = parse(text).unwrap();
            assert_eq!(parse(&t.to_string()).unwrap(), t, "{text}");
        }
    }

    #[test]
    fn capacity_guard_on_translation() {
        let limits = Limits {
            max_events: 2,
            ..Limits::default()
        };
        let err = translate_with(&parse("a|b|c").unwrap(), &limits).unwrap_err();
        assert!(err.is_capacity());
    }

    #[test]
    fn translations_are_stable() {
        for text in ["a|b.a", "(a|a)+a.a", "a.(b+c)|(d+e.f)"] {
            assert!(validate(&translate_str(text).unwrap()).unwrap().stable());
        }
    }
}
