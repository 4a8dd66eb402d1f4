//! Exact rational scalars.
//!
//! `Scalar` is `num_rational::BigRational`, which keeps values in lowest
//! terms with a positive denominator. This module adds the few helpers the
//! rest of the crate needs: integer powers with negative exponents, factorials,
//! and the `"p/q"` string form used in every JSON document.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseScalarError;

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^exp` for any integer exponent. Panics if `base` is zero and `exp < 0`.
pub fn powi(base: &Scalar, exp: i64) -> Scalar {
    let mag = exp.unsigned_abs();
    let mut acc = Scalar::one();
    let mut sq = base.clone();
    let mut e = mag;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    if exp < 0 {
        assert!(!base.is_zero(), "zero raised to a negative power");
        acc.recip()
    } else {
        acc
    }
}

pub fn factorial(n: u32) -> Scalar {
    (1..=n).fold(Scalar::one(), |acc, k| acc * int(k as i64))
}

pub fn binomial(n: u32, k: u32) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    let mut acc = Scalar::one();
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int((i + 1) as i64);
    }
    acc
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar, ParseScalarError> {
    let s = s.trim();
    let bad = || ParseScalarError(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn is_negative(x: &Scalar) -> bool {
    x.is_negative()
}

/// Serde adapter storing a [`Scalar`] as its `"p/q"` string.
pub mod serde_scalar {
    use super::{format_scalar, parse_scalar, Scalar};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let raw = String::deserialize(d)?;
        parse_scalar(&raw).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Scalar>`.
pub mod serde_scalar_vec {
    use super::{format_scalar, parse_scalar, Scalar};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_scalar))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_scalar(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
