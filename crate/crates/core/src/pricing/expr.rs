// Copyright 2026 The continuum-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Symbolic price expressions.
//!
//! Grammar (ASCII, whitespace-insensitive):
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := number | variable | '(' expr ')'
//! ```
//!
//! Variables are `requested_<dim>` for the five resource dimensions.
//! Evaluation is exact decimal arithmetic, rounded half up to four
//! fractional digits at the end.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::Dimension;
use crate::fixed::{Fixed, Money, DECIMALS};

const MAX_LITERAL_SCALE: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable {name:?} at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("no binding for {0}")]
    MissingBinding(Dimension),
    #[error("arithmetic overflow while evaluating expression")]
    Overflow,
}

/// A non-negative decimal literal `digits * 10^-scale`, kept with trailing
/// zeros stripped so equal values compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    digits: u128,
    scale: u32,
}

impl Literal {
    fn normalized(mut digits: u128, mut scale: u32) -> Self {
        while scale > 0 && digits.is_multiple_of(10) {
            digits /= 10;
            scale -= 1;
        }
        Literal { digits, scale }
    }

    pub fn from_fixed(v: Fixed) -> Self {
        Literal::normalized(v.raw().unsigned_abs() as u128, DECIMALS)
    }

    pub fn is_zero(&self) -> bool {
        self.digits == 0
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.digits);
        }
        let pow = 10u128.pow(self.scale);
        write!(
            f,
            "{}.{:0width$}",
            self.digits / pow,
            self.digits % pow,
            width = self.scale as usize
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Literal(Literal),
    Variable(Dimension),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn literal(v: Fixed) -> Expr {
        Expr::Literal(Literal::from_fixed(v))
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::Add(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    fn collect_variables(&self, out: &mut BTreeSet<Dimension>) {
        match self {
            Expr::Literal(_) => {}
            Expr::Variable(d) => {
                out.insert(*d);
            }
            Expr::Add(l, r) | Expr::Mul(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(l) => write!(f, "{l}"),
            Expr::Variable(d) => f.write_str(d.variable_name()),
            Expr::Add(l, r) => {
                l.write(f)?;
                f.write_str(" + ")?;
                r.write_wrapped(f, matches!(**r, Expr::Add(..)))
            }
            Expr::Mul(l, r) => {
                l.write_wrapped(f, matches!(**l, Expr::Add(..)))?;
                f.write_str(" * ")?;
                r.write_wrapped(f, matches!(**r, Expr::Add(..) | Expr::Mul(..)))
            }
        }
    }

    fn write_wrapped(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            f.write_str("(")?;
            self.write(f)?;
            f.write_str(")")
        } else {
            self.write(f)
        }
    }
}

/// Exact decimal `m * 10^-scale` used during evaluation.
#[derive(Clone, Copy)]
struct Exact {
    m: i128,
    scale: u32,
}

impl Exact {
    fn rescale(self, scale: u32) -> Option<Exact> {
        let factor = 10i128.checked_pow(scale - self.scale)?;
        Some(Exact {
            m: self.m.checked_mul(factor)?,
            scale,
        })
    }

    fn add(self, o: Exact) -> Option<Exact> {
        let s = self.scale.max(o.scale);
        let a = self.rescale(s)?;
        let b = o.rescale(s)?;
        Some(Exact {
            m: a.m.checked_add(b.m)?,
            scale: s,
        })
    }

    fn mul(self, o: Exact) -> Option<Exact> {
        Some(Exact {
            m: self.m.checked_mul(o.m)?,
            scale: self.scale + o.scale,
        })
    }

    fn to_fixed(self) -> Option<Fixed> {
        let raw = if self.scale <= DECIMALS {
            self.rescale(DECIMALS)?.m
        } else {
            let div = 10i128.checked_pow(self.scale - DECIMALS)?;
            let half = div / 2;
            if self.m >= 0 {
                (self.m + half) / div
            } else {
                (self.m - half) / div
            }
        };
        i64::try_from(raw).ok().map(Fixed::from_raw)
    }
}

/// A parsed price expression. Serializes as its canonical text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PriceExpression {
    ast: Expr,
}

impl PriceExpression {
    pub fn new(ast: Expr) -> Self {
        PriceExpression { ast }
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn zero() -> Self {
        PriceExpression::new(Expr::literal(Fixed::ZERO))
    }

    /// `requested_<dim> * price` for every non-zero unit price, summed
    /// left to right in dimension order; `0` if all prices are zero.
    pub fn linear(unit_prices: &crate::domain::ResourceVector) -> Self {
        let terms = unit_prices
            .iter()
            .filter(|(_, p)| *p != Fixed::ZERO)
            .map(|(d, p)| Expr::mul(Expr::Variable(d), Expr::literal(p)));
        let ast = terms
            .reduce(Expr::add)
            .unwrap_or_else(|| Expr::literal(Fixed::ZERO));
        PriceExpression::new(ast)
    }

    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let ast = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(PriceExpression { ast })
    }

    pub fn variables(&self) -> BTreeSet<Dimension> {
        let mut out = BTreeSet::new();
        self.ast.collect_variables(&mut out);
        out
    }

    pub fn eval(&self, bindings: &BTreeMap<Dimension, Fixed>) -> Result<Money, ExprError> {
        fn go(e: &Expr, b: &BTreeMap<Dimension, Fixed>) -> Result<Exact, ExprError> {
            match e {
                Expr::Literal(l) => Ok(Exact {
                    m: i128::try_from(l.digits).map_err(|_| ExprError::Overflow)?,
                    scale: l.scale,
                }),
                Expr::Variable(d) => {
                    let v = b.get(d).ok_or(ExprError::MissingBinding(*d))?;
                    Ok(Exact {
                        m: v.raw() as i128,
                        scale: DECIMALS,
                    })
                }
                Expr::Add(l, r) => go(l, b)?.add(go(r, b)?).ok_or(ExprError::Overflow),
                Expr::Mul(l, r) => go(l, b)?.mul(go(r, b)?).ok_or(ExprError::Overflow),
            }
        }
        go(&self.ast, bindings)?
            .to_fixed()
            .ok_or(ExprError::Overflow)
    }
}

impl fmt::Display for PriceExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.write(f)
    }
}

impl FromStr for PriceExpression {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        PriceExpression::parse(s)
    }
}

impl Serialize for PriceExpression {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PriceExpression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        PriceExpression::parse(&text).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            lhs = Expr::add(lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::mul(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.variable(),
            Some(_) => Err(self.error("expected number, variable or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let mut digits: u128 = 0;
        let mut scale = 0u32;
        let mut seen_dot = false;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_digit() {
                digits = digits
                    .checked_mul(10)
                    .and_then(|d| d.checked_add((c - b'0') as u128))
                    .ok_or(ExprError::Overflow)?;
                if seen_dot {
                    scale += 1;
                }
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
                match self.src.get(self.pos + 1) {
                    Some(n) if n.is_ascii_digit() => {}
                    _ => {
                        self.pos += 1;
                        return Err(self.error("expected digit after '.'"));
                    }
                }
            } else {
                break;
            }
            self.pos += 1;
        }
        if scale > MAX_LITERAL_SCALE {
            self.pos = start;
            return Err(self.error("too many fractional digits"));
        }
        Ok(Expr::Literal(Literal::normalized(digits, scale)))
    }

    fn variable(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        Dimension::from_variable_name(name)
            .map(Expr::Variable)
            .ok_or_else(|| ExprError::UnknownVariable {
                name: name.into(),
                pos: start,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn bind(pairs: &[(Dimension, i64)]) -> BTreeMap<Dimension, Fixed> {
        pairs
            .iter()
            .map(|(d, v)| (*d, Fixed::from_int(*v)))
            .collect()
    }

    #[test]
    fn parses_worked_example() {
        let e = PriceExpression::parse("requested_ram * 1.1 + requested_storage * 0.02").unwrap();
        match e.ast() {
            Expr::Add(l, r) => {
                assert!(matches!(**l, Expr::Mul(..)));
                assert!(matches!(**r, Expr::Mul(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            e.to_string(),
            "requested_ram * 1.1 + requested_storage * 0.02"
        );
    }

    #[test]
    fn evaluates_worked_example() {
        let e = PriceExpression::parse("requested_ram * 1.1 + requested_storage * 0.02").unwrap();
        let v = e
            .eval(&bind(&[(Dimension::Ram, 20), (Dimension::Storage, 100)]))
            .unwrap();
        assert_eq!(v.to_string(), "24.0000");
        let e = PriceExpression::parse("requested_ram * 1.1").unwrap();
        assert_eq!(
            e.eval(&bind(&[(Dimension::Ram, 3)])).unwrap().to_string(),
            "3.3000"
        );
    }

    #[test]
    fn zero_expression() {
        let e = PriceExpression::parse("0").unwrap();
        assert_eq!(e.eval(&BTreeMap::new()).unwrap(), Fixed::ZERO);
        assert_eq!(e, PriceExpression::zero());
    }

    #[test]
    fn rejects_unknown_variable() {
        let err = PriceExpression::parse("requested_foo * 2").unwrap_err();
        assert_eq!(
            err,
            ExprError::UnknownVariable {
                name: "requested_foo".into(),
                pos: 0
            }
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match PriceExpression::parse("requested_ram * ").unwrap_err() {
            ExprError::Syntax { pos, .. } => assert_eq!(pos, 16),
            e => panic!("{e:?}"),
        }
        assert!(PriceExpression::parse("requested_ram · 1.1").is_err());
        assert!(PriceExpression::parse("(1 + 2").is_err());
        assert!(PriceExpression::parse("1.").is_err());
    }

    #[test]
    fn missing_binding() {
        let e = PriceExpression::parse("requested_gpu * 3").unwrap();
        assert_eq!(
            e.eval(&BTreeMap::new()),
            Err(ExprError::MissingBinding(Dimension::Gpu))
        );
    }

    #[test]
    fn rounding_half_up_at_four_decimals() {
        let e = PriceExpression::parse("requested_ram * 0.00005").unwrap();
        assert_eq!(e.eval(&bind(&[(Dimension::Ram, 1)])).unwrap().raw(), 1);
    }

    #[test]
    fn canonical_parenthesisation() {
        for text in [
            "(requested_ram + 1) * 2",
            "requested_ram * (requested_cpu * 2)",
            "1 + (2 + 3)",
            "1 + 2 + 3",
            "2 * 3 + 4 * (5 + 6)",
        ] {
            let e = PriceExpression::parse(text).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(PriceExpression::parse(&e.to_string()).unwrap(), e);
        }
        let e = PriceExpression::parse(" ( requested_ram )*1.10 ").unwrap();
        assert_eq!(e.to_string(), "requested_ram * 1.1");
    }

    #[test]
    fn linear_builder_skips_zero_prices() {
        let mut prices = crate::domain::ResourceVector::ZERO;
        prices[Dimension::Ram] = "1.1".parse().unwrap();
        prices[Dimension::Storage] = "0.02".parse().unwrap();
        assert_eq!(
            PriceExpression::linear(&prices).to_string(),
            "requested_ram * 1.1 + requested_storage * 0.02"
        );
        assert_eq!(
            PriceExpression::linear(&crate::domain::ResourceVector::ZERO).to_string(),
            "0"
        );
    }
}
