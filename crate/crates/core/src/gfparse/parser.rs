//! Recursive-descent parser for rational expressions in `z1..zd` and `t`.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' uint)?
//! base   := uint | var | '(' expr ')' | '-' base
//! var    := 'z' uint | 't'
//! ```
//!
//! A rational literal `a/b` parses as a quotient, which has the same value.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::ParseError;
use crate::polycore::MultiPoly;

const MAX_EXPONENT: u32 = 10_000;

/// A quotient of polynomials, not necessarily reduced.
#[derive(Clone, Debug)]
pub struct Fraction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl Fraction {
    fn poly(p: MultiPoly) -> Self {
        Fraction {
            num: p,
            den: MultiPoly::from_int(1),
        }
    }

    /// Folds a constant denominator into the numerator.
    fn tidy(self) -> Self {
        if self.den.is_constant() {
            let c = self.den.constant_term();
            if !c.is_one() {
                return Fraction {
                    num: self.num.scale(&c.recip()),
                    den: MultiPoly::from_int(1),
                };
            }
        }
        self
    }

    fn add(self, o: Fraction) -> Fraction {
        if self.den == o.den {
            return Fraction {
                num: self.num.add(&o.num),
                den: self.den,
            };
        }
        Fraction {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .tidy()
    }

    fn neg(self) -> Fraction {
        Fraction {
            num: self.num.neg(),
            den: self.den,
        }
    }

    fn mul(self, o: Fraction) -> Fraction {
        Fraction {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
        .tidy()
    }

    fn div(self, o: Fraction) -> Option<Fraction> {
        if o.num.is_zero() {
            return None;
        }
        Some(
            Fraction {
                num: self.num.mul(&o.den),
                den: self.den.mul(&o.num),
            }
            .tidy(),
        )
    }

    fn pow(self, e: u32) -> Fraction {
        Fraction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
        .tidy()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Other(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Int(s.parse().unwrap()), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            let is_var = s == "t"
                || (s.len() > 1
                    && s.starts_with('z')
                    && s[1..].chars().all(|c| c.is_ascii_digit())
                    && !s[1..].starts_with('0'));
            out.push((if is_var { Tok::Var(s) } else { Tok::Ident(s) }, pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => Tok::Other(other),
        };
        out.push((tok, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            position: self.pos(),
            message: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Fraction, ParseError> {
        let mut acc = if self.peek() == Some(&Tok::Minus) {
            self.i += 1;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.i += 1;
                    acc = acc.add(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.i += 1;
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Fraction, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.i += 1;
                    acc = acc.mul(self.factor()?);
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.i += 1;
                    let rhs = self.factor()?;
                    acc = acc.div(rhs).ok_or_else(|| {
                        ParseError::NonRational(format!("division by zero at position {pos}"))
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Fraction, ParseError> {
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.i += 1;
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                let e: u32 = n
                    .try_into()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| self.syntax(format!("exponent larger than {MAX_EXPONENT}")))?;
                Ok(base.pow(e))
            }
            Some(_) => Err(ParseError::NonRational(format!(
                "exponent at position {pos} is not a non-negative integer literal"
            ))),
            None => Err(self.syntax("expected an exponent")),
        }
    }

    fn base(&mut self) -> Result<Fraction, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                Ok(Fraction::poly(MultiPoly::constant(BigRational::from_integer(n))))
            }
            Some(Tok::Var(v)) => {
                self.i += 1;
                Ok(Fraction::poly(MultiPoly::var(&v)))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.syntax("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.i += 1;
                Ok(self.base()?.neg())
            }
            Some(Tok::Ident(name)) => {
                let pos = self.pos();
                if self.toks.get(self.i + 1).map(|(t, _)| t) == Some(&Tok::LParen) {
                    Err(ParseError::NonRational(format!(
                        "function '{name}' at position {pos} is not a rational operation"
                    )))
                } else {
                    Err(self.syntax(format!(
                        "unknown variable '{name}' (expected t or z1, z2, ...)"
                    )))
                }
            }
            Some(Tok::Other('.')) => Err(self.syntax("decimal literals are not supported; use a/b")),
            Some(tok) => Err(self.syntax(format!("unexpected {}", describe(&tok)))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Var(v) | Tok::Ident(v) => format!("'{v}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Other(c) => format!("character '{c}'"),
    }
}

/// Parses `text` into an unreduced fraction of polynomials.
pub fn parse_fraction(text: &str) -> Result<Fraction, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
    };
    if p.peek().is_none() {
        return Err(p.syntax("empty expression"));
    }
    let f = p.expr()?;
    if p.peek().is_some() {
        return Err(p.syntax(format!("unexpected {}", describe(p.peek().unwrap()))));
    }
    if f.num.is_zero() && f.den.is_zero() {
        return Err(ParseError::NonRational("indeterminate 0/0".into()));
    }
    Ok(f)
}
