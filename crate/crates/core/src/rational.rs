//! Exact rational values and their textual form.
//!
//! Every value that takes part in a fairness decision is a [`Rational`]:
//! an arbitrary-precision fraction. The wire form is a string, either an
//! integer (`"7"`) or a fraction (`"7/2"`). Decimal and exponent notations
//! are rejected so no value ever passes through floating point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    frac(1, 2)
}

/// Parses `"p"` or `"p/q"` (optional leading `-`, decimal digits only).
pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::Rational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let digits = |s: &str| {
        let body = s.strip_prefix('-').unwrap_or(s);
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits(num) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) if digits(d) => d.parse().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Like [`parse`] but also rejects negative values.
pub fn parse_nonneg(text: &str) -> Result<Rational> {
    let r = parse(text)?;
    if r.is_negative() {
        return Err(Error::Rational(text.to_string()));
    }
    Ok(r)
}

/// Canonical text: reduced `"p/q"`, or `"p"` when the denominator is 1.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `serde(with = "...")` adapter writing a rational as its canonical string.
pub mod as_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`as_string`] for a sequence of rationals.
pub mod vec_as_string {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse("7/2").unwrap(), frac(7, 2));
        assert_eq!(parse("14/4").unwrap(), frac(7, 2));
        assert_eq!(parse("5").unwrap(), int(5));
        assert_eq!(parse(" 0 ").unwrap(), zero());
        assert_eq!(parse("-3/9").unwrap(), frac(-1, 3));
    }

    #[test]
    fn rejects_floats_and_junk() {
        for bad in ["0.5", "1e3", "", "/2", "1/", "1/0", "a", "1/2/3", "+1", "--1"] {
            assert!(parse(bad).is_err(), "{bad:?} should not parse");
        }
        assert!(parse_nonneg("-1").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format(&frac(6, 4)), "3/2");
        assert_eq!(format(&int(8)), "8");
        assert_eq!(format(&frac(-1, 2)), "-1/2");
    }

    proptest! {
        #[test]
        fn text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = frac(n, d);
            prop_assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }
}
