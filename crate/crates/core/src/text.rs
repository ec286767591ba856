//! Concrete syntax: parser and canonical printer.
//!
//! Types are `i` and right-associative `T -> S`; terms are identifiers,
//! `\x. e`, and left-associative juxtaposition; contexts are `x:T, y:S` with
//! the rightmost binding innermost. Names exist only at this boundary; the
//! engine works on de Bruijn indices, so shadowing resolves to the innermost
//! binder and the printer invents fresh binder names.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Ctx, Tm, Tp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unbound variable `{name}`")]
    UnboundVariable { line: usize, col: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    Arrow,
    Colon,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer;

impl Lexer {
    fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        let mut line = 1usize;
        let mut col = 1usize;
        let mut chars = src.chars().peekable();
        while let Some(&c) = chars.peek() {
            let (tline, tcol) = (line, col);
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
                '\\' => {
                    chars.next();
                    col += 1;
                    out.push((Tok::Lambda, tline, tcol));
                }
                '.' => {
                    chars.next();
                    col += 1;
                    out.push((Tok::Dot, tline, tcol));
                }
                '(' => {
                    chars.next();
                    col += 1;
                    out.push((Tok::LParen, tline, tcol));
                }
                ')' => {
                    chars.next();
                    col += 1;
                    out.push((Tok::RParen, tline, tcol));
                }
                ':' => {
                    chars.next();
                    col += 1;
                    out.push((Tok::Colon, tline, tcol));
                }
                ',' => {
                    chars.next();
                    col += 1;
                    out.push((Tok::Comma, tline, tcol));
                }
                '-' => {
                    chars.next();
                    col += 1;
                    match chars.peek() {
                        Some('>') => {
                            chars.next();
                            col += 1;
                            out.push((Tok::Arrow, tline, tcol));
                        }
                        _ => {
                            return Err(ParseError::Syntax {
                                line: tline,
                                col: tcol,
                                msg: "expected `->`".to_string(),
                            })
                        }
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                            name.push(c);
                            chars.next();
                            col += 1;
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Ident(name), tline, tcol));
                }
                c => {
                    return Err(ParseError::Syntax {
                        line: tline,
                        col: tcol,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        out.push((Tok::Eof, line, col));
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: Lexer::lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: String) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                Ok(name)
            }
            t => self.err(format!("expected an identifier, found {t}")),
        }
    }

    // type := atom ('->' type)?
    fn ty(&mut self) -> Result<Tp, ParseError> {
        let lhs = self.ty_atom()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.ty()?;
            Ok(Tp::arr(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_atom(&mut self) -> Result<Tp, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "i" => {
                self.next();
                Ok(Tp::Base)
            }
            Tok::Ident(name) => self.err(format!("unknown type `{name}`; the base type is `i`")),
            Tok::LParen => {
                self.next();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.err(format!("expected a type, found {t}")),
        }
    }

    // term := '\' ident '.' term | app
    // app  := atom+
    fn term(&mut self, env: &mut Vec<String>) -> Result<Tm, ParseError> {
        if *self.peek() == Tok::Lambda {
            self.next();
            let name = self.ident()?;
            self.expect(Tok::Dot)?;
            env.push(name);
            let body = self.term(env);
            env.pop();
            return Ok(Tm::lam(body?));
        }
        let mut acc = self.atom(env)?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::LParen => {
                    let arg = self.atom(env)?;
                    acc = Tm::app(acc, arg);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self, env: &mut Vec<String>) -> Result<Tm, ParseError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                match env.iter().rposition(|n| n == &name) {
                    Some(pos) => Ok(Tm::Var(env.len() - 1 - pos)),
                    None => Err(ParseError::UnboundVariable { line, col, name }),
                }
            }
            Tok::LParen => {
                self.next();
                let t = self.term(env)?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.err(format!("expected a term, found {t}")),
        }
    }

    // ctx := <empty> | binding (',' binding)*
    fn ctx(&mut self) -> Result<(Vec<String>, Ctx), ParseError> {
        let mut names = Vec::new();
        let mut types = Vec::new();
        if *self.peek() == Tok::Eof {
            return Ok((names, Ctx::empty()));
        }
        loop {
            let (line, col) = self.here();
            let name = self.ident()?;
            if names.contains(&name) {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("duplicate variable `{name}` in context"),
                });
            }
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            names.push(name);
            types.push(ty);
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        Ok((names, Ctx::from_types(types)))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.peek()))
        }
    }
}

pub fn parse_type(src: &str) -> Result<Tp, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parses a term whose free variables are the given context names, with the
/// rightmost name bound to index 0.
pub fn parse_term(src: &str, ctx_names: &[String]) -> Result<Tm, ParseError> {
    let mut p = Parser::new(src)?;
    let mut env = ctx_names.to_vec();
    let t = p.term(&mut env)?;
    p.finish()?;
    Ok(t)
}

/// Parses a context, returning the display names alongside the types.
/// Duplicate names are rejected so printed terms re-parse unambiguously.
pub fn parse_ctx(src: &str) -> Result<(Vec<String>, Ctx), ParseError> {
    let mut p = Parser::new(src)?;
    let c = p.ctx()?;
    p.finish()?;
    Ok(c)
}

pub fn print_type(t: &Tp) -> String {
    match t {
        Tp::Base => "i".to_string(),
        Tp::Arr(a, b) => {
            let lhs = match a.as_ref() {
                Tp::Base => print_type(a),
                Tp::Arr(..) => format!("({})", print_type(a)),
            };
            format!("{lhs} -> {}", print_type(b))
        }
    }
}

const NAME_POOL: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// First pool name not already visible.
fn fresh_name(taken: &[String]) -> String {
    for name in NAME_POOL {
        if !taken.iter().any(|t| t == name) {
            return name.to_string();
        }
    }
    for round in 1.. {
        for name in NAME_POOL {
            let candidate = format!("{name}{round}");
            if !taken.iter().any(|t| t == &candidate) {
                return candidate;
            }
        }
    }
    unreachable!()
}

/// Canonical printing; `parse_term` of the output under the same names gives
/// the term back.
pub fn print_term(m: &Tm, ctx_names: &[String]) -> String {
    let mut env = ctx_names.to_vec();
    go_term(m, &mut env, 0)
}

// prec 0: lambdas bare. prec 1: function position, applications bare.
// prec 2: argument position, only variables bare.
fn go_term(m: &Tm, env: &mut Vec<String>, prec: u8) -> String {
    match m {
        Tm::Var(k) => match env.len().checked_sub(1 + k).and_then(|p| env.get(p)) {
            Some(name) => name.clone(),
            None => format!("?{k}"),
        },
        Tm::Lam(body) => {
            let name = fresh_name(env);
            env.push(name.clone());
            let inner = go_term(body, env, 0);
            env.pop();
            let s = format!("\\{name}. {inner}");
            if prec > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Tm::App(f, a) => {
            let s = format!("{} {}", go_term(f, env, 1), go_term(a, env, 2));
            if prec > 1 {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

pub fn print_ctx(names: &[String], ctx: &Ctx) -> String {
    names
        .iter()
        .zip(ctx.types())
        .map(|(n, t)| format!("{n}:{}", print_type(t)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Extends a name list with a fresh display name for a new binding.
pub fn extend_names(names: &[String]) -> (Vec<String>, String) {
    let name = fresh_name(names);
    let mut out = names.to_vec();
    out.push(name.clone());
    (out, name)
}
