//! Exact rational scalars over the ground field of characteristic zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

/// `(-1)^exponent` for any integer exponent.
pub fn minus_one_pow(exponent: i64) -> Scalar {
    if exponent.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// `+1` when `odd` is false, `-1` otherwise.
pub fn parity_sign(odd: bool) -> Scalar {
    if odd {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

pub fn factorial(n: usize) -> Scalar {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Scalar::from_integer(acc)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Parses `"p/q"` or `"p"`; the result must already be in lowest terms with `q > 0`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("invalid rational literal {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (text.trim(), None),
    };
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = match den {
        Some(q) => q.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if !q.is_positive() {
        return Err(bad());
    }
    let value = Scalar::new(p.clone(), q.clone());
    if value.numer() != &p || value.denom() != &q {
        return Err(Error::Parse(format!("rational literal {text:?} is not in lowest terms")));
    }
    Ok(value)
}

/// Inverse of [`parse_scalar`]: integers print without a denominator.
pub fn format_scalar(value: &Scalar) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        for text in ["0", "-3", "7/4", "-1/2", "123456789012345678901234567891/2"] {
            assert_eq!(format_scalar(&parse_scalar(text).unwrap()), text);
        }
    }

    #[test]
    fn rejects_non_reduced_and_bad_denominators() {
        assert!(parse_scalar("2/4").is_err());
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("1/-2").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn small_helpers() {
        assert_eq!(factorial(5), int(120));
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(minus_one_pow(-3), int(-1));
        assert_eq!(ratio(2, -4), ratio(-1, 2));
    }
}
