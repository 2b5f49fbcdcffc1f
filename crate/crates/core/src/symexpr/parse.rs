use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{Expr, Func, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownFunction { offset, .. } => {
                *offset
            }
        }
    }

    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Wedge,
    LParen,
    RParen,
    Comma,
    End,
}

const COMBINING_DOT: char = '\u{307}';

/// Precomposed letter for `c` followed by a combining dot above, if any.
pub(crate) fn precomposed_dot(c: char) -> Option<char> {
    Some(match c {
        'a' => 'ȧ',
        'b' => 'ḃ',
        'c' => 'ċ',
        'd' => 'ḋ',
        'e' => 'ė',
        'f' => 'ḟ',
        'g' => 'ġ',
        'h' => 'ḣ',
        'm' => 'ṁ',
        'n' => 'ṅ',
        'o' => 'ȯ',
        'p' => 'ṗ',
        'r' => 'ṙ',
        's' => 'ṡ',
        't' => 'ṫ',
        'w' => 'ẇ',
        'x' => 'ẋ',
        'y' => 'ẏ',
        'z' => 'ż',
        _ => return None,
    })
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || ('\u{300}'..='\u{36f}').contains(&c)
}

/// Byte-offset tracking tokenizer shared by the expression and form parsers.
pub struct Tokenizer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    pub fn new(src: &'a str) -> Self {
        Tokenizer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Next token together with its starting byte offset.
    pub fn next_token(&mut self) -> Result<(Token, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok((Token::End, start));
        };
        let single = |tok: Token, this: &mut Self| {
            this.pos += c.len_utf8();
            Ok((tok, start))
        };
        match c {
            '+' => single(Token::Plus, self),
            '-' | '−' => single(Token::Minus, self),
            '*' | '·' => single(Token::Star, self),
            '/' => single(Token::Slash, self),
            '^' => single(Token::Caret, self),
            '∧' => single(Token::Wedge, self),
            '(' => single(Token::LParen, self),
            ')' => single(Token::RParen, self),
            ',' => single(Token::Comma, self),
            c if c.is_ascii_digit() || c == '.' => self.number(start),
            c if ident_start(c) => {
                let mut name = String::new();
                let chars = rest.char_indices();
                let mut end = rest.len();
                for (i, ch) in chars {
                    if !ident_continue(ch) {
                        end = i;
                        break;
                    }
                    if ch == COMBINING_DOT {
                        // normalise `x` + U+0307 to the precomposed `ẋ`
                        if let Some(last) = name.pop() {
                            match precomposed_dot(last) {
                                Some(p) => name.push(p),
                                None => {
                                    name.push(last);
                                    name.push(ch);
                                }
                            }
                            continue;
                        }
                    }
                    name.push(ch);
                }
                self.pos += end;
                Ok((Token::Ident(name), start))
            }
            other => Err(ParseError::syntax(
                start,
                format!("unexpected character `{other}`"),
            )),
        }
    }

    fn number(&mut self, start: usize) -> Result<(Token, usize), ParseError> {
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(rest.len());
        let text = &rest[..len];
        self.pos += len;
        let (int_part, frac_part) = match text.split_once('.') {
            Some((a, b)) => (a, b),
            None => (text, ""),
        };
        if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
            return Err(ParseError::syntax(start, format!("malformed number `{text}`")));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits
            .parse()
            .map_err(|_| ParseError::syntax(start, format!("malformed number `{text}`")))?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok((Token::Number(Rational::new(numer, denom)), start))
    }
}

/// Recursive-descent parser over a token stream with one token of lookahead.
pub(crate) struct Parser<'a> {
    tokens: Tokenizer<'a>,
    pub(crate) peeked: (Token, usize),
    src_len: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut tokens = Tokenizer::new(src);
        let peeked = tokens.next_token()?;
        Ok(Parser {
            tokens,
            peeked,
            src_len: src.len(),
        })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.peeked.0
    }

    pub(crate) fn offset(&self) -> usize {
        self.peeked.1
    }

    pub(crate) fn bump(&mut self) -> Result<(Token, usize), ParseError> {
        let next = self.tokens.next_token()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Token::End => Ok(()),
            t => Err(ParseError::syntax(
                self.offset(),
                format!("unexpected {}", describe(t)),
            )),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump()?;
                    terms.push(self.term()?);
                }
                Token::Minus => {
                    self.bump()?;
                    terms.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump()?;
                    factors.push(self.unary()?);
                }
                Token::Slash => {
                    self.bump()?;
                    let d = self.unary()?;
                    factors.push(d.pow(Expr::int(-1)));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Mul(factors)
        })
    }

    pub(crate) fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.bump()?;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Token::Plus => {
                self.bump()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if matches!(self.peek(), Token::Caret) {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, at) = self.bump()?;
        match tok {
            Token::Number(r) => Ok(Expr::Const(r)),
            Token::Ident(name) => {
                if matches!(self.peek(), Token::LParen) {
                    let func = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                        name: name.clone(),
                        offset: at,
                    })?;
                    self.bump()?;
                    let arg = self.expr()?;
                    self.close_paren()?;
                    Ok(Expr::call(func, arg))
                } else {
                    Ok(Expr::Var(Arc::from(name.as_str())))
                }
            }
            Token::LParen => {
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            Token::End => Err(ParseError::syntax(
                self.src_len,
                "unexpected end of input",
            )),
            t => Err(ParseError::syntax(at, format!("unexpected {}", describe(&t)))),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Token::RParen => {
                self.bump()?;
                Ok(())
            }
            Token::End => Err(ParseError::syntax(self.src_len, "expected `)`")),
            t => Err(ParseError::syntax(
                self.offset(),
                format!("expected `)`, found {}", describe(t)),
            )),
        }
    }
}

pub(crate) fn describe(t: &Token) -> String {
    match t {
        Token::Number(r) if r.denom().is_one() => format!("number `{}`", r.numer()),
        Token::Number(r) if r.is_zero() => "number `0`".into(),
        Token::Number(r) => format!("number `{}/{}`", r.numer(), r.denom()),
        Token::Ident(s) => format!("identifier `{s}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::Wedge => "`∧`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::Comma => "`,`".into(),
        Token::End => "end of input".into(),
    }
}

/// Parse an expression in the surface syntax described in the module docs.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}
