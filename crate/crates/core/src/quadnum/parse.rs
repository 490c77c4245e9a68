//! Text form `(p + q*sqrt(D))/r`.
//!
//! Accepted input is a small arithmetic language: integers, `sqrt(n)`,
//! `+ - *`, division by integers and parentheses, with at most one radicand
//! per expression. `sqrt(-n)` builds a formal imaginary value. Whitespace is
//! ignored. Output always uses the shortest canonical spelling.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{is_perfect_square, QuadraticIrrational};
use crate::error::Error;

/// `rational + coeff * sqrt(radicand)` during parsing.
#[derive(Clone, Debug)]
struct Partial {
    rational: BigRational,
    coeff: BigRational,
    radicand: Option<BigInt>,
}

impl Partial {
    fn int(n: BigInt) -> Self {
        Self {
            rational: BigRational::from_integer(n),
            coeff: BigRational::zero(),
            radicand: None,
        }
    }

    fn merge_radicand(&self, other: &Self) -> Result<Option<BigInt>, Error> {
        match (&self.radicand, &other.radicand) {
            (Some(a), Some(b)) if a != b => Err(Error::Parse(format!(
                "mixed radicands sqrt({a}) and sqrt({b})"
            ))),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    fn add(self, other: Self) -> Result<Self, Error> {
        let radicand = self.merge_radicand(&other)?;
        Ok(Self {
            rational: self.rational + other.rational,
            coeff: self.coeff + other.coeff,
            radicand,
        })
    }

    fn neg(self) -> Self {
        Self {
            rational: -self.rational,
            coeff: -self.coeff,
            radicand: self.radicand,
        }
    }

    fn mul(self, other: Self) -> Result<Self, Error> {
        let radicand = self.merge_radicand(&other)?;
        let square = BigRational::from_integer(radicand.clone().unwrap_or_default());
        Ok(Self {
            rational: &self.rational * &other.rational + &self.coeff * &other.coeff * square,
            coeff: &self.rational * &other.coeff + &self.coeff * &other.rational,
            radicand,
        })
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Self {
            chars: source.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            source,
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!(
            "{what} at offset {} in {:?}",
            self.pos, self.source
        ))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<BigInt, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn sum(&mut self) -> Result<Partial, Error> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(self.term()?)?;
            } else if self.eat('-') {
                acc = acc.add(self.term()?.neg())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Partial, Error> {
        let mut acc = self.atom()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(self.atom()?)?;
            } else if self.eat('/') {
                let den = self.integer()?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let den = BigRational::from_integer(den);
                acc.rational /= &den;
                acc.coeff /= &den;
            } else {
                return Ok(acc);
            }
        }
    }

    fn atom(&mut self) -> Result<Partial, Error> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(Partial::int(self.integer()?)),
            Some('s') => {
                for c in "sqrt(".chars() {
                    self.expect(c)?;
                }
                let negative = self.eat('-');
                let n = self.integer()?;
                self.expect(')')?;
                let radicand = if negative { -n } else { n };
                if is_perfect_square(&radicand) {
                    return Err(Error::Parse(format!(
                        "sqrt({radicand}) is rational in {:?}",
                        self.source
                    )));
                }
                Ok(Partial {
                    rational: BigRational::zero(),
                    coeff: BigRational::one(),
                    radicand: Some(radicand),
                })
            }
            _ => Err(self.error("unexpected input")),
        }
    }
}

impl FromStr for QuadraticIrrational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut parser = Parser::new(s);
        let value = parser.sum()?;
        if parser.pos != parser.chars.len() {
            return Err(parser.error("trailing input"));
        }
        let radicand = value.radicand.ok_or(Error::RationalValue)?;
        // common denominator of both parts
        let r = num_integer::lcm(value.rational.denom().clone(), value.coeff.denom().clone());
        let p = value.rational.numer() * (&r / value.rational.denom());
        let q = value.coeff.numer() * (&r / value.coeff.denom());
        if radicand.is_negative() {
            QuadraticIrrational::canonicalize_imaginary(p, q, r, -radicand)
        } else {
            QuadraticIrrational::canonicalize(p, q, r, radicand)
        }
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = match self.kind {
            super::Kind::Real => format!("sqrt({})", self.d),
            super::Kind::Imaginary => format!("sqrt(-{})", self.d),
        };
        let magnitude = self.q.abs();
        let surd = if magnitude.is_one() {
            surd
        } else {
            format!("{magnitude}*{surd}")
        };
        let negative = self.q.is_negative();
        let body = match (self.p.is_zero(), negative) {
            (true, false) => surd,
            (true, true) => format!("-{surd}"),
            (false, false) => format!("{}+{surd}", self.p),
            (false, true) => format!("{}-{surd}", self.p),
        };
        if self.r.is_one() {
            f.write_str(&body)
        } else if self.p.is_zero() {
            write!(f, "{body}/{}", self.r)
        } else {
            write!(f, "({body})/{}", self.r)
        }
    }
}
