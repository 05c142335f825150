//! Exact rational parsing for the boundary-sensitive parameters (beta, y).
//!
//! Accepted forms: integers (`-3`), fractions (`7/4`), and decimal strings
//! (`1.25`), all parsed exactly. No exponent notation and no whitespace;
//! counts must be reproducible bit-for-bit from the flag text.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest denominator accepted for the exponent beta; keeps the exact
/// big-integer boundary comparisons tractable.
pub const BETA_DENOM_CAP: u64 = 64;

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

fn parse_signed_int(s: &str) -> Option<BigInt> {
    let (sign, digits) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let v = parse_digits(digits)?;
    Some(if sign { -v } else { v })
}

/// Parse a rational exactly from `p/q`, decimal, or integer text.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::argument(format!("cannot parse '{s}' as an exact rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_signed_int(num).ok_or_else(bad)?;
        let d = parse_digits(den).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(Error::argument(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (negative, int_digits) = match int_part.as_bytes().first() {
            Some(b'-') => (true, &int_part[1..]),
            Some(b'+') => (false, &int_part[1..]),
            _ => (false, int_part),
        };
        let i = parse_digits(int_digits).ok_or_else(bad)?;
        let f = parse_digits(frac_part).ok_or_else(bad)?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut v = BigRational::new(i * &scale + f, scale);
        if negative {
            v = -v;
        }
        return Ok(v);
    }
    let n = parse_signed_int(s).ok_or_else(bad)?;
    Ok(BigRational::from_integer(n))
}

/// Canonical reduced `p/q` text (plain integer when q = 1).
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Enforce the denominator cap used for exponents parsed as beta.
pub fn check_beta_denom(beta: &BigRational) -> Result<()> {
    if beta.denom() > &BigInt::from(BETA_DENOM_CAP) {
        return Err(Error::argument(format!(
            "beta denominator {} exceeds cap {BETA_DENOM_CAP}",
            beta.denom()
        )));
    }
    Ok(())
}

/// Best-effort f64 view of a rational (used only away from exact boundaries).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("+2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("0.0").unwrap(), rat(0, 1));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", ".", "1.", ".5", "1e3", "1/0", "1/-2", " 1", "1 ", "--2", "1.2.3", "a/b", "∞"] {
            assert!(parse_rational(s).is_err(), "accepted '{s}'");
        }
    }

    #[test]
    fn beta_denominator_cap() {
        assert!(check_beta_denom(&rat(1, 64)).is_ok());
        assert!(check_beta_denom(&rat(1, 65)).is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        for s in ["3/2", "-7", "0", "1/3", "-5/8"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&rational_to_string(&r)).unwrap(), r);
        }
    }

    proptest! {
        #[test]
        fn round_trip(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
            let r = rat(n, d);
            let s = rational_to_string(&r);
            prop_assert_eq!(parse_rational(&s).unwrap(), r);
        }

        #[test]
        fn decimal_matches_f64_on_dyadics(bits in 0u16..4096) {
            // k/256 has an exact decimal expansion and an exact f64
            let r = rat(bits as i64, 256);
            let dec = format!("{:.8}", bits as f64 / 256.0);
            prop_assert_eq!(parse_rational(&dec).unwrap(), r.clone());
            prop_assert_eq!(BigRational::from_f64(bits as f64 / 256.0).unwrap(), r);
        }
    }
}
