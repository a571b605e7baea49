//! Exact rational scalars.
//!
//! `BigRational` keeps values in lowest terms with a positive denominator, so
//! the alias is used directly. The helpers below cover parsing the `p/q`
//! text form used in game files and a few conversions used throughout.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `numer / denom` as an exact rational. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `-p`, `p/q` or a finite decimal such as `0.25`.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let fail = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(fail());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| fail())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| fail())?;
        if d.is_zero() {
            return Err(fail());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail());
        }
        let digits = format!("{whole_digits}{frac}");
        let n = BigInt::from_str(&digits).map_err(|_| fail())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(n, d);
        return Ok(if negative { -v } else { v });
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| fail())
}

/// Lossy conversion for presentation only (SVG rendering, progress output).
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn min<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values.into_iter().min().cloned()
}

pub fn max<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values.into_iter().max().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-7/21").unwrap(), rat(-1, 3));
        assert_eq!(parse(" 4 / 6 ").unwrap(), rat(2, 3));
        assert_eq!(parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(rat(6, -4).to_string(), "-3/2");
        assert_eq!(rat(8, 4).to_string(), "2");
    }

    proptest! {
        #[test]
        fn add_sub_round_trip(p in -1000i64..1000, q in 1i64..500, r in -1000i64..1000, s in 1i64..500) {
            let a = rat(p, q);
            let b = rat(r, s);
            prop_assert_eq!((a.clone() + &b) - &b, a.clone());
            prop_assert_eq!(parse(&a.to_string()).unwrap(), a);
        }
    }
}
