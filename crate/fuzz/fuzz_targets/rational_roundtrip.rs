//! Structured differential check of the decimal and fraction decoders:
//! build strings whose exact value is known and require the parser to
//! reproduce it.

#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;
use num::bigint::BigInt;
use num::rational::BigRational;
use totlab::rational::parse_rational;

#[derive(Arbitrary, Debug)]
struct Case {
    negative: bool,
    int_part: u64,
    frac_digits: Vec<u8>,
    numer: i64,
    denom: u64,
}

fuzz_target!(|case: Case| {
    // decimal form: int_part.d1 d2 ... with digits reduced mod 10
    let digits: String = case
        .frac_digits
        .iter()
        .take(30)
        .map(|d| char::from(b'0' + d % 10))
        .collect();
    if !digits.is_empty() {
        let text = format!(
            "{}{}.{}",
            if case.negative { "-" } else { "" },
            case.int_part,
            digits
        );
        let parsed = parse_rational(&text).expect("well-formed decimal");
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let frac: BigInt = digits.bytes().fold(BigInt::from(0), |acc, b| {
            acc * 10 + BigInt::from(b - b'0')
        });
        let mut expect = BigRational::new(BigInt::from(case.int_part) * &scale + frac, scale);
        if case.negative {
            expect = -expect;
        }
        assert_eq!(parsed, expect, "decimal {text} decoded wrong");
    }

    // fraction form
    if case.denom != 0 {
        let text = format!("{}/{}", case.numer, case.denom);
        let parsed = parse_rational(&text).expect("well-formed fraction");
        let expect = BigRational::new(BigInt::from(case.numer), BigInt::from(case.denom));
        assert_eq!(parsed, expect, "fraction {text} decoded wrong");
    }
});
