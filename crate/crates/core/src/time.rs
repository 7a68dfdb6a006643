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

//! Exact time points and rational formatting.
//!
//! Times are stored as reduced fractions over `i128`. Event ordering in the
//! sweep depends on exact equality of endpoints, so no floating point is
//! involved anywhere between parsing and output.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{CheckedAdd, Signed, Zero};
use thiserror::Error;

/// Exact rational number used for times and LP coefficients.
pub type Rational = num_rational::Ratio<i128>;

/// Largest number of significant digits accepted in a decimal literal.
const MAX_DECIMAL_DIGITS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeParseError {
    #[error("empty time literal")]
    Empty,
    #[error("malformed decimal `{0}` (expected digits with an optional fractional part)")]
    Malformed(String),
    #[error("negative time `{0}`")]
    Negative(String),
    #[error("decimal `{0}` has too many digits")]
    TooLong(String),
}

/// A non-negative exact point in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimePoint(Rational);

impl TimePoint {
    pub const ZERO: TimePoint = TimePoint(Rational::new_raw(0, 1));

    /// Wraps a rational, rejecting negative values.
    pub fn new(value: Rational) -> Option<Self> {
        if value.is_negative() {
            None
        } else {
            Some(TimePoint(value))
        }
    }

    pub fn from_integer(value: u64) -> Self {
        TimePoint(Rational::from_integer(i128::from(value)))
    }

    /// `numer / denom`; panics if `denom` is zero or the ratio is negative.
    pub fn from_ratio(numer: i128, denom: i128) -> Self {
        TimePoint::new(Rational::new(numer, denom)).expect("negative time point")
    }

    pub fn value(self) -> Rational {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    /// Remainder of `self` modulo a positive period, in `[0, period)`.
    pub fn rem_period(self, period: TimePoint) -> TimePoint {
        assert!(!period.is_zero(), "period must be positive");
        let quotient = (self.0 / period.0).floor();
        TimePoint(self.0 - quotient * period.0)
    }

    /// `self + other`, or `None` on overflow.
    pub fn checked_add(self, other: TimePoint) -> Option<TimePoint> {
        self.0.checked_add(&other.0).map(TimePoint)
    }

    /// Parses a plain decimal literal such as `3550` or `12.25`.
    ///
    /// Signs, exponents and fractions are rejected; the conversion is exact.
    pub fn parse_decimal(text: &str) -> Result<TimePoint, TimeParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(TimeParseError::Empty);
        }
        if let Some(rest) = text.strip_prefix('-') {
            if is_decimal(rest) {
                return Err(TimeParseError::Negative(text.to_string()));
            }
            return Err(TimeParseError::Malformed(text.to_string()));
        }
        if !is_decimal(text) {
            return Err(TimeParseError::Malformed(text.to_string()));
        }
        let (whole, frac) = match text.split_once('.') {
            Some((w, f)) => (w, f),
            None => (text, ""),
        };
        if whole.len() + frac.len() > MAX_DECIMAL_DIGITS {
            return Err(TimeParseError::TooLong(text.to_string()));
        }
        let too_long = || TimeParseError::TooLong(text.to_string());
        let mut numer: i128 = 0;
        for digit in whole.bytes().chain(frac.bytes()) {
            numer = numer
                .checked_mul(10)
                .and_then(|n| n.checked_add(i128::from(digit - b'0')))
                .ok_or_else(too_long)?;
        }
        let denom = 10i128.checked_pow(frac.len() as u32).ok_or_else(too_long)?;
        Ok(TimePoint(Rational::new(numer, denom)))
    }
}

fn is_decimal(text: &str) -> bool {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (text, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    digits(whole) && frac.is_none_or(digits)
}

impl FromStr for TimePoint {
    type Err = TimeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimePoint::parse_decimal(s)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl From<u64> for TimePoint {
    fn from(value: u64) -> Self {
        TimePoint::from_integer(value)
    }
}

/// Formats a rational as a terminating decimal when one exists, otherwise as
/// `p/q`. Integers carry no decimal point.
pub fn format_rational(value: &Rational) -> String {
    let numer = *value.numer();
    let denom = *value.denom();
    if denom == 1 {
        return numer.to_string();
    }
    match decimal_scale(denom) {
        Some(scale) => {
            let factor = 10i128.checked_pow(scale);
            let scaled = factor.and_then(|f| numer.checked_mul(f / denom));
            match scaled {
                Some(scaled) => {
                    let sign = if scaled < 0 { "-" } else { "" };
                    let digits = scaled.unsigned_abs().to_string();
                    let scale = scale as usize;
                    let padded = format!("{digits:0>width$}", width = scale + 1);
                    let (whole, frac) = padded.split_at(padded.len() - scale);
                    format!("{sign}{whole}.{frac}")
                }
                None => format!("{numer}/{denom}"),
            }
        }
        None => format!("{numer}/{denom}"),
    }
}

/// Number of decimal places needed to write `1/denom` exactly, if finite.
fn decimal_scale(denom: i128) -> Option<u32> {
    let mut rest = denom;
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest.is_even() {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    (rest == 1).then_some(twos.max(fives))
}

/// Parses a rational written by [`format_rational`].
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let p: i128 = p.parse().ok()?;
        let q: i128 = q.parse().ok()?;
        if q <= 0 || p < 0 {
            return None;
        }
        Rational::new(p, q)
    } else {
        TimePoint::parse_decimal(body).ok()?.0
    };
    Some(if negative { -value } else { value })
}

/// Sum of rationals, or `None` on overflow.
pub(crate) fn checked_sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values
        .into_iter()
        .try_fold(Rational::zero(), |acc, v| acc.checked_add(v))
}
