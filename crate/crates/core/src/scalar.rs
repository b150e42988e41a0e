//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Every quantity in this crate is a rational or a complex number with
//! rational real and imaginary parts. `num-rational` keeps values in lowest
//! terms with a positive denominator, which is exactly the canonical form the
//! serialization layer requires.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Gaussian rational: complex number with exact rational parts.
pub type CRat = Complex<Rat>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("invalid rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

/// Rational from an integer.
pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Rational `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Gaussian rational from integer real and imaginary parts.
pub fn crat_int(re: i64, im: i64) -> CRat {
    Complex::new(rat_int(re), rat_int(im))
}

pub fn crat(re: Rat, im: Rat) -> CRat {
    Complex::new(re, im)
}

pub fn czero() -> CRat {
    Complex::new(Rat::zero(), Rat::zero())
}

pub fn cone() -> CRat {
    Complex::new(Rat::one(), Rat::zero())
}

/// The imaginary unit.
pub fn ci() -> CRat {
    Complex::new(Rat::zero(), Rat::one())
}

/// Complex conjugate.
pub fn cconj(v: &CRat) -> CRat {
    Complex::new(v.re.clone(), -v.im.clone())
}

/// Canonical text form `p/q`, denominator always present and positive.
pub fn format_rat(v: &Rat) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` (or a bare integer `p`) into a rational in lowest terms.
pub fn parse_rat(text: &str) -> Result<Rat, ScalarParseError> {
    let text = text.trim();
    let (num_str, den_str) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| ScalarParseError::Malformed(text.to_string()))?;
    let denom: BigInt = den_str
        .parse()
        .map_err(|_| ScalarParseError::Malformed(text.to_string()))?;
    if denom.is_zero() {
        return Err(ScalarParseError::ZeroDenominator(text.to_string()));
    }
    Ok(Rat::new(numer, denom))
}

/// Compact human-readable complex form, used in diagnostics.
pub fn format_crat(v: &CRat) -> String {
    if v.im.is_zero() {
        format_rat(&v.re)
    } else if v.re.is_zero() {
        format!("{}i", format_rat(&v.im))
    } else if v.im.is_negative() {
        format!("{}{}i", format_rat(&v.re), format_rat(&v.im))
    } else {
        format!("{}+{}i", format_rat(&v.re), format_rat(&v.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "-3/7", "0/1", "5/1", "-12/5"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("3/-6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("7").unwrap(), rat_int(7));
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            parse_rat("1/0"),
            Err(ScalarParseError::ZeroDenominator(_))
        ));
        assert!(matches!(parse_rat("a/b"), Err(ScalarParseError::Malformed(_))));
        assert!(matches!(parse_rat(""), Err(ScalarParseError::Malformed(_))));
        assert!(matches!(parse_rat("1/2/3"), Err(ScalarParseError::Malformed(_))));
    }

    #[test]
    fn exact_arithmetic_is_exact() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!((a.clone() + b.clone()) - b, a);
    }

    #[test]
    fn conjugation_involution_and_multiplicativity() {
        let x = crat(rat(1, 2), rat(-3, 4));
        let y = crat(rat(2, 5), rat(1, 7));
        assert_eq!(cconj(&cconj(&x)), x);
        assert_eq!(cconj(&(x.clone() * y.clone())), cconj(&x) * cconj(&y));
        let norm = x.clone() * cconj(&x);
        assert!(norm.im.is_zero());
        assert!(!norm.re.is_negative());
    }
}
