//! Exact rational parameters.
//!
//! Quasi-geodesic and quasi-isometry constants (lambda, c) are rationals so
//! that every sandwich inequality can be decided exactly by cross
//! multiplication; floats appear only in analytic bound formulas.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses "7", "-3/2" or a finite decimal like "1.5" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let int: i64 = if int == "-" || int.is_empty() {
            0
        } else {
            int.parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal in {s:?}")));
        }
        if frac.len() > 15 {
            return Err(Error::Parse(format!("decimal too precise: {s:?}")));
        }
        let digits: i64 = frac.parse().unwrap();
        let scale = 10_i64.pow(frac.len() as u32);
        return Ok(Ratio::new(int.abs(), 1) * sign + Ratio::new(digits, scale) * sign);
    }
    let v: i64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))?;
    Ok(Ratio::from_integer(v))
}

/// Renders a rational as "7" or "-3/2" (lowest terms, no decimal forms).
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn is_nonnegative(r: Rational) -> bool {
    !r.is_negative()
}

/// Wrapper used where a rational must appear in human-readable output.
pub struct DisplayRational(pub Rational);

impl fmt::Display for DisplayRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

/// Serde adapters: rationals travel as strings ("3/2") in JSON records.
pub mod rational_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(de)?;
        parse_rational(&raw).map_err(de::Error::custom)
    }
}

pub fn rational_is_zero(r: Rational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_integers() {
        assert_eq!(parse_rational("7").unwrap(), Rational::from_integer(7));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_integer(-2));
    }

    #[test]
    fn parses_fractions_and_reduces() {
        assert_eq!(parse_rational("6/4").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("-3/2").unwrap(), Rational::new(-3, 2));
        assert_eq!(parse_rational(" 3 / 2 ").unwrap(), Rational::new(3, 2));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("1.5").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1/0", "1.2.3", "1/ ", ".", "1.x"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rational(Rational::new(4, 2)), "2");
        assert_eq!(format_rational(Rational::new(-3, 2)), "-3/2");
    }
}
