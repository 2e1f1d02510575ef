use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Formula, Hypothesis};
use crate::error::{Error, Result};

/// Parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Xor,
    LParen,
    RParen,
    Arrow,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Not => f.write_str("`!`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Xor => f.write_str("`^`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Arrow => f.write_str("`->`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> SyntaxError {
    let (line, column) = position(text, offset);
    SyntaxError { line, column, message: message.into() }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | ':')
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(at, c)) = chars.peek() {
        let simple = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '!' | '¬' | '~' => Some(Token::Not),
            '&' | '∧' => Some(Token::And),
            '|' | '∨' => Some(Token::Or),
            '^' | '⊕' => Some(Token::Xor),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '▷' => Some(Token::Arrow),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push((tok, at));
            continue;
        }
        if c == '-' {
            chars.next();
            match chars.next() {
                Some((_, '>')) => out.push((Token::Arrow, at)),
                _ => return Err(error_at(text, at, "expected `->`")),
            }
        } else if c == '"' {
            chars.next();
            let mut name = String::new();
            loop {
                match chars.next() {
                    Some((_, '"')) => break,
                    Some((_, '\\')) => match chars.next() {
                        Some((_, e)) => name.push(e),
                        None => return Err(error_at(text, at, "unterminated quoted name")),
                    },
                    Some((_, ch)) => name.push(ch),
                    None => return Err(error_at(text, at, "unterminated quoted name")),
                }
            }
            if name.is_empty() {
                return Err(error_at(text, at, "empty quoted name"));
            }
            out.push((Token::Ident(name), at));
        } else if is_ident_char(c) {
            let mut name = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if !is_ident_char(ch) {
                    break;
                }
                name.push(ch);
                chars.next();
            }
            out.push((Token::Ident(name), at));
        } else {
            return Err(error_at(text, at, alloc::format!("unexpected character `{c}`")));
        }
    }
    out.push((Token::Eof, text.len()));
    Ok(out)
}

struct Parser<'t> {
    text: &'t str,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(error_at(self.text, self.offset(), message))
    }

    fn chain(
        &mut self,
        op: Token,
        next: fn(&mut Self) -> Result<Formula, SyntaxError>,
        build: fn(Vec<Formula>) -> Formula,
        flatten: fn(Formula) -> Result<Vec<Formula>, Formula>,
    ) -> Result<Formula, SyntaxError> {
        let first = next(self)?;
        if *self.peek() != op {
            return Ok(first);
        }
        let mut children = Vec::new();
        let push = |f: Formula, children: &mut Vec<Formula>| {
            match flatten(f) {
                Ok(cs) => children.extend(cs),
                Err(f) => children.push(f),
            }
        };
        push(first, &mut children);
        while *self.peek() == op {
            self.bump();
            let child = next(self)?;
            push(child, &mut children);
        }
        Ok(build(children))
    }

    fn or_expr(&mut self) -> Result<Formula, SyntaxError> {
        self.chain(Token::Or, Self::xor_expr, Formula::Or, |f| match f {
            Formula::Or(cs) => Ok(cs),
            f => Err(f),
        })
    }

    fn xor_expr(&mut self) -> Result<Formula, SyntaxError> {
        // Parenthesized xor children stay nested: exclusivity is not associative.
        self.chain(Token::Xor, Self::and_expr, Formula::Xor, Err)
    }

    fn and_expr(&mut self) -> Result<Formula, SyntaxError> {
        self.chain(Token::And, Self::unary, Formula::And, |f| match f {
            Formula::And(cs) => Ok(cs),
            f => Err(f),
        })
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if *self.peek() == Token::Not {
            self.bump();
            let inner = self.unary()?;
            return Ok(Formula::Not(Box::new(inner)));
        }
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Token::LParen => {
                self.bump();
                let inner = self.or_expr()?;
                if *self.peek() != Token::RParen {
                    return self.fail(alloc::format!("expected `)`, found {}", self.peek()));
                }
                self.bump();
                Ok(inner)
            }
            other => self.fail(alloc::format!("expected an event name, `!` or `(`, found {other}")),
        }
    }
}

/// A line of a hypotheses file: either a full hypothesis or a bare pattern
/// to be tested against every other event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Hypothesis(Hypothesis),
    Pattern(Formula),
}

pub fn parse_statement(text: &str) -> Result<Statement> {
    let tokens = tokenize(text)?;
    let mut p = Parser { text, tokens, pos: 0 };
    let formula = p.or_expr()?;
    match p.peek().clone() {
        Token::Eof => Ok(Statement::Pattern(formula)),
        Token::Arrow => {
            p.bump();
            let target = match p.bump() {
                Token::Ident(name) => name,
                _ => {
                    p.pos = p.pos.saturating_sub(1);
                    return Err(p.fail::<()>("hypothesis target must be a single event").unwrap_err().into());
                }
            };
            if *p.peek() != Token::Eof {
                return Err(p
                    .fail::<()>("formula targets are not supported; the target must be a single event")
                    .unwrap_err()
                    .into());
            }
            let h = Hypothesis { formula, target };
            if !h.is_well_formed() {
                return Err(Error::TargetInFormula { target: h.target });
            }
            Ok(Statement::Hypothesis(h))
        }
        other => Err(p.fail::<()>(alloc::format!("unexpected {other}")).unwrap_err().into()),
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    match parse_statement(text)? {
        Statement::Pattern(f) => Ok(f),
        Statement::Hypothesis(_) => {
            let at = text.find("->").or_else(|| text.find('▷')).unwrap_or(0);
            Err(error_at(text, at, "expected a formula, found a hypothesis").into())
        }
    }
}

pub fn parse_hypothesis(text: &str) -> Result<Hypothesis> {
    match parse_statement(text)? {
        Statement::Hypothesis(h) => Ok(h),
        Statement::Pattern(_) => {
            Err(error_at(text, text.len(), "expected `-> EVENT` after the formula").into())
        }
    }
}
