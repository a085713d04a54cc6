//! Text syntax: `true false e_<i>_<j> c_<j> ! & | -> X U R G F ( )`.
//!
//! Precedence from tightest: unary operators, `U`/`R` (right associative),
//! `&`, `|`, `->` (right associative). Chains of `&` or `|` build one n-ary
//! node; parenthesized groups stay nested.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{AtomicProp, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared proposition `{name}` at byte {pos}")]
    Undeclared { pos: usize, name: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Next,
    Always,
    Eventually,
    Until,
    Release,
    True,
    False,
    Prop(AtomicProp),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    start,
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "X" => Tok::Next,
                        "G" => Tok::Always,
                        "F" => Tok::Eventually,
                        "U" => Tok::Until,
                        "R" => Tok::Release,
                        _ => Tok::Prop(word.parse().map_err(|_| ParseError::Undeclared {
                            pos: start,
                            name: word.to_string(),
                        })?),
                    },
                ));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    declared: Option<&'a BTreeSet<AtomicProp>>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.conjunction()?];
        while self.eat(&Tok::Or) {
            items.push(self.conjunction()?);
        }
        Ok(Formula::or_all(items))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.binary_temporal()?];
        while self.eat(&Tok::And) {
            items.push(self.binary_temporal()?);
        }
        Ok(Formula::and_all(items))
    }

    fn binary_temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            return Ok(Formula::until(lhs, self.binary_temporal()?));
        }
        if self.eat(&Tok::Release) {
            return Ok(Formula::release(lhs, self.binary_temporal()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.at += 1;
        Ok(match tok {
            Tok::Not => Formula::not(self.unary()?),
            Tok::Next => Formula::next(self.unary()?),
            Tok::Always => Formula::always(self.unary()?),
            Tok::Eventually => Formula::eventually(self.unary()?),
            Tok::True => Formula::True,
            Tok::False => Formula::False,
            Tok::Prop(p) => {
                if let Some(decl) = self.declared {
                    if !decl.contains(&p) {
                        return Err(ParseError::Undeclared {
                            pos,
                            name: p.to_string(),
                        });
                    }
                }
                Formula::Atom(p)
            }
            Tok::LParen => {
                let inner = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                inner
            }
            other => {
                self.at -= 1;
                return self.err(format!("unexpected token {other:?}"));
            }
        })
    }
}

fn run(text: &str, declared: Option<&BTreeSet<AtomicProp>>) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        declared,
    };
    let f = p.implication()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses a formula over link (`e_i_j`) and command-node (`c_j`) propositions.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    run(text, None)
}

/// Like [`parse`], additionally rejecting propositions outside `declared`.
pub fn parse_declared(text: &str, declared: &BTreeSet<AtomicProp>) -> Result<Formula, ParseError> {
    run(text, Some(declared))
}
