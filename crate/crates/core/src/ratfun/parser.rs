//! Text format for transfer matrices.
//!
//! ```text
//! model   = [ "dim" INT ] matrix
//! matrix  = "[" row { ";" row } "]"
//! row     = entry { "," entry }
//! entry   = sum [ "/" sum ]
//! sum     = [ "+" | "-" ] product { ("+" | "-") product }
//! product = power { [ "*" ] power }
//! power   = atom [ "^" INT ]
//! atom    = NUMBER | "s" | "(" sum ")"
//! ```
//!
//! Division only appears at entry level, so `a+b/c+d` reads as `(a+b)/(c+d)`.
//! Parenthesised factors and powers such as `(s+10)^3` are expanded on the fly.

use super::matrix::RationalMatrix;
use super::poly::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Num(f64),
    S,
    Dim,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    offset: usize,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let (off, ch) = chars[i];
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start_col = col;
        let single = match ch {
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                text: ch.to_string(),
                offset: off,
                line,
                column: start_col,
            });
            i += 1;
            col += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_ascii_digit() || chars[j].1 == '.') {
                j += 1;
            }
            // exponent only when followed by digits
            if j < chars.len() && (chars[j].1 == 'e' || chars[j].1 == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k].1 == '+' || chars[k].1 == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].1.is_ascii_digit() {
                    while k < chars.len() && chars[k].1.is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let end = chars.get(j).map_or(src.len(), |c| c.0);
            let text = &src[off..end];
            let value: f64 = text.parse().map_err(|_| Error::Syntax {
                line,
                column: start_col,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                text: text.to_string(),
                offset: off,
                line,
                column: start_col,
            });
            col += j - i;
            i = j;
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let end = chars.get(j).map_or(src.len(), |c| c.0);
            let word = &src[off..end];
            let tok = match word {
                "s" => Tok::S,
                "dim" => Tok::Dim,
                "j" | "i" | "I" | "J" => {
                    return Err(Error::Syntax {
                        line,
                        column: start_col,
                        message: "complex coefficients are not supported".into(),
                    })
                }
                _ => {
                    return Err(Error::Syntax {
                        line,
                        column: start_col,
                        message: format!("unexpected identifier `{word}`"),
                    })
                }
            };
            out.push(Token {
                tok,
                text: word.to_string(),
                offset: off,
                line,
                column: start_col,
            });
            col += j - i;
            i = j;
            continue;
        }
        return Err(Error::Syntax {
            line,
            column: start_col,
            message: format!("unexpected character `{ch}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        text: String::new(),
        offset: src.len(),
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn current(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.current();
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Eof => "end of input".into(),
            _ => format!("`{}`", self.current().text),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn model(&mut self) -> Result<RationalMatrix> {
        let mut declared = None;
        if *self.peek() == Tok::Dim {
            self.bump();
            let t = self.current().clone();
            match t.tok {
                Tok::Num(v) if v >= 1.0 && v.fract() == 0.0 => {
                    self.bump();
                    declared = Some(v as usize);
                }
                _ => return self.error("expected a positive integer after `dim`"),
            }
        }
        let (rows, bracket) = self.matrix()?;
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {} after matrix", self.describe()));
        }
        let m = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != rows[0].len() {
                return Err(Error::RowLength {
                    row: r,
                    found: row.len(),
                    expected: rows[0].len(),
                });
            }
        }
        if rows[0].len() != m {
            return Err(Error::Dimension(format!(
                "matrix starting at line {}, column {} is {}x{}; transfer matrices must be square",
                bracket.0,
                bracket.1,
                m,
                rows[0].len()
            )));
        }
        if let Some(d) = declared {
            if d != m {
                return Err(Error::Dimension(format!("header declares dim {d} but the matrix is {m}x{m}")));
            }
        }
        let mut entries = Vec::with_capacity(m * m);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, (num, den, text)) in row.into_iter().enumerate() {
                let e = RationalFunction::new(num, den).map_err(|e| match e {
                    Error::Improper {
                        num_degree,
                        den_degree,
                        ..
                    } => Error::Improper {
                        row: r,
                        col: c,
                        text: text.clone(),
                        num_degree,
                        den_degree,
                    },
                    Error::ZeroDenominator { .. } => Error::ZeroDenominator { row: r, col: c },
                    other => other,
                })?;
                entries.push(e);
            }
        }
        RationalMatrix::new(m, entries)
    }

    #[allow(clippy::type_complexity)]
    fn matrix(&mut self) -> Result<(Vec<Vec<(Polynomial, Polynomial, String)>>, (usize, usize))> {
        let open = (self.current().line, self.current().column);
        self.expect(Tok::LBracket, "`[`")?;
        let mut rows = vec![self.row()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            rows.push(self.row()?);
        }
        self.expect(Tok::RBracket, "`;`, `,` or `]`")?;
        Ok((rows, open))
    }

    fn row(&mut self) -> Result<Vec<(Polynomial, Polynomial, String)>> {
        let mut row = vec![self.entry()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            row.push(self.entry()?);
        }
        Ok(row)
    }

    fn entry(&mut self) -> Result<(Polynomial, Polynomial, String)> {
        let start = self.current().offset;
        let num = self.sum()?;
        let den = if *self.peek() == Tok::Slash {
            self.bump();
            self.sum()?
        } else {
            Polynomial::one()
        };
        let end = self.current().offset;
        let text = self.src[start..end].trim().to_string();
        Ok((num, den, text))
    }

    fn sum(&mut self) -> Result<Polynomial> {
        let mut negate = false;
        match self.peek() {
            Tok::Plus => {
                self.bump();
            }
            Tok::Minus => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let first = self.product()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.product()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.power()?;
                }
                Tok::Num(_) | Tok::S | Tok::LParen => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 => {
                self.bump();
                Ok(base.powi(v as u32))
            }
            _ => self.error(format!("expected a nonnegative integer exponent, found {}", self.describe())),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Polynomial::constant(v))
            }
            Tok::S => {
                self.bump();
                Ok(Polynomial::s())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.error(format!("expected a number, `s` or `(`, found {}", self.describe())),
        }
    }
}

/// Parses a bracketed matrix, optionally preceded by a `dim <m>` header.
pub fn parse_rational_matrix(text: &str) -> Result<RationalMatrix> {
    let toks = lex(text)?;
    let mut p = Parser {
        src: text,
        toks,
        pos: 0,
    };
    p.model()
}
