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

//! Fixed-point decimal with four fractional digits.
//!
//! Every money amount and every resource quantity in the model is a
//! [`Fixed`]. Arithmetic is exact at 1e-4 resolution, so totals computed on
//! different platforms agree bit for bit. The textual form always carries
//! four fractional digits (`"24.0000"`), which is also the serialized form.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul, Sub, SubAssign};
use core::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of raw units per whole unit.
pub const SCALE: i64 = 10_000;
/// Number of fractional digits carried by [`Fixed`].
pub const DECIMALS: u32 = 4;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(i64);

/// Money per month, in the topology's currency.
pub type Money = Fixed;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseFixedError {
    #[error("empty decimal literal")]
    Empty,
    #[error("invalid character {0:?} in decimal literal")]
    InvalidChar(char),
    #[error("decimal literal out of range")]
    Overflow,
}

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const MAX: Fixed = Fixed(i64::MAX);

    pub const fn from_raw(raw: i64) -> Self {
        Fixed(raw)
    }

    pub const fn raw(self) -> i64 {
        self.0
    }

    pub const fn from_int(v: i64) -> Self {
        Fixed(v * SCALE)
    }

    /// Nearest representable value, ties away from zero. `None` for NaN or
    /// out-of-range input.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let scaled = libm::round(v * SCALE as f64);
        if scaled.abs() >= i64::MAX as f64 {
            return None;
        }
        Some(Fixed(scaled as i64))
    }

    /// Round `v` upwards to `decimals` fractional digits (at most four).
    ///
    /// Binary floating point noise below 1e-9 of a grid step is ignored, so
    /// `4.000000000000001` rounds to `4.000` rather than `4.001`.
    pub fn ceil_f64(v: f64, decimals: u32) -> Option<Self> {
        if !v.is_finite() || decimals > DECIMALS {
            return None;
        }
        let step = libm::pow(10.0, decimals as f64);
        let scaled = v * step;
        let nearest = libm::round(scaled);
        let units = if (scaled - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
            nearest
        } else {
            libm::ceil(scaled)
        };
        let raw = units * (SCALE as f64 / step);
        if raw.abs() >= i64::MAX as f64 {
            return None;
        }
        Some(Fixed(raw as i64))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn checked_add(self, rhs: Fixed) -> Option<Fixed> {
        self.0.checked_add(rhs.0).map(Fixed)
    }

    /// Multiply two fixed values, rounding the product half away from zero.
    pub fn checked_mul(self, rhs: Fixed) -> Option<Fixed> {
        let wide = self.0 as i128 * rhs.0 as i128;
        let half = (SCALE / 2) as i128;
        let q = if wide >= 0 {
            (wide + half) / SCALE as i128
        } else {
            (wide - half) / SCALE as i128
        };
        i64::try_from(q).ok().map(Fixed)
    }

    /// Render with two fractional digits, rounding half up.
    pub fn display_cents(self) -> CentsDisplay {
        CentsDisplay(self)
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl AddAssign for Fixed {
    fn add_assign(&mut self, rhs: Fixed) {
        self.0 += rhs.0;
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl SubAssign for Fixed {
    fn sub_assign(&mut self, rhs: Fixed) {
        self.0 -= rhs.0;
    }
}

impl Mul<i64> for Fixed {
    type Output = Fixed;
    fn mul(self, rhs: i64) -> Fixed {
        Fixed(self.0 * rhs)
    }
}

impl Sum for Fixed {
    fn sum<I: Iterator<Item = Fixed>>(iter: I) -> Fixed {
        iter.fold(Fixed::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Fixed> for Fixed {
    fn sum<I: Iterator<Item = &'a Fixed>>(iter: I) -> Fixed {
        iter.copied().sum()
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let scale = SCALE as u64;
        write!(f, "{sign}{}.{:04}", abs / scale, abs % scale)
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub struct CentsDisplay(Fixed);

impl fmt::Display for CentsDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let raw = self.0 .0;
        let sign = if raw < 0 { "-" } else { "" };
        let cents = (raw.unsigned_abs() + 50) / 100;
        write!(f, "{sign}{}.{:02}", cents / 100, cents % 100)
    }
}

impl FromStr for Fixed {
    type Err = ParseFixedError;

    /// Parses `[-]digits[.digits]`. Digits beyond the fourth fractional
    /// place are rounded half up.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if body.is_empty() || body == "." {
            return Err(ParseFixedError::Empty);
        }
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        let mut raw: i64 = 0;
        for c in int_part.chars() {
            let d = c.to_digit(10).ok_or(ParseFixedError::InvalidChar(c))?;
            raw = raw
                .checked_mul(10)
                .and_then(|r| r.checked_add(d as i64))
                .ok_or(ParseFixedError::Overflow)?;
        }
        raw = raw.checked_mul(SCALE).ok_or(ParseFixedError::Overflow)?;
        let mut place = SCALE / 10;
        let mut round_up = false;
        for (i, c) in frac_part.chars().enumerate() {
            let d = c.to_digit(10).ok_or(ParseFixedError::InvalidChar(c))? as i64;
            if i < DECIMALS as usize {
                raw += d * place;
                place /= 10;
            } else if i == DECIMALS as usize {
                round_up = d >= 5;
            }
        }
        if round_up {
            raw = raw.checked_add(1).ok_or(ParseFixedError::Overflow)?;
        }
        Ok(Fixed(if neg { -raw } else { raw }))
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct FixedVisitor;

impl Visitor<'_> for FixedVisitor {
    type Value = Fixed;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a decimal number or decimal string")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Fixed, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Fixed, E> {
        Fixed::from_f64(v).ok_or_else(|| E::custom("decimal out of range"))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Fixed, E> {
        v.checked_mul(SCALE)
            .map(Fixed)
            .ok_or_else(|| E::custom("decimal out of range"))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Fixed, E> {
        i64::try_from(v)
            .ok()
            .and_then(|v| v.checked_mul(SCALE))
            .map(Fixed)
            .ok_or_else(|| E::custom("decimal out of range"))
    }
}

impl<'de> Deserialize<'de> for Fixed {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(FixedVisitor)
    }
}

/// A budget bound: either a concrete monthly amount or explicitly unbounded.
///
/// Serialized as the string `"unbounded"` or as a [`Fixed`] amount.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Budget {
    #[default]
    Unbounded,
    Limit(Money),
}

impl Budget {
    pub fn allows(self, amount: Money) -> bool {
        match self {
            Budget::Unbounded => true,
            Budget::Limit(limit) => amount <= limit,
        }
    }

    pub fn limit(self) -> Option<Money> {
        match self {
            Budget::Unbounded => None,
            Budget::Limit(m) => Some(m),
        }
    }
}

impl Serialize for Budget {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Budget::Unbounded => serializer.serialize_str("unbounded"),
            Budget::Limit(m) => m.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Budget {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct BudgetVisitor;
        impl Visitor<'_> for BudgetVisitor {
            type Value = Budget;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"unbounded\" or a decimal amount")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Budget, E> {
                if v.eq_ignore_ascii_case("unbounded") {
                    Ok(Budget::Unbounded)
                } else {
                    FixedVisitor.visit_str(v).map(Budget::Limit)
                }
            }
            fn visit_unit<E: de::Error>(self) -> Result<Budget, E> {
                Ok(Budget::Unbounded)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Budget, E> {
                FixedVisitor.visit_f64(v).map(Budget::Limit)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Budget, E> {
                FixedVisitor.visit_i64(v).map(Budget::Limit)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Budget, E> {
                FixedVisitor.visit_u64(v).map(Budget::Limit)
            }
        }
        deserializer.deserialize_any(BudgetVisitor)
    }
}
