//! Differential fuzz of the two counting routes: the phi alpha_k sieve form
//! and the direct Phi_k form must produce identical counts for any legal
//! (k, beta, x, y), boundary ties included.

#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;
use num::bigint::BigInt;
use num::rational::BigRational;
use totlab::counting::{count_phi_ratio, count_phi_ratio_direct, RegimeConfig};
use totlab::totient::TotientParams;

#[derive(Arbitrary, Debug)]
struct Case {
    k: u8,
    beta_offset_num: i8,
    beta_offset_den: u8,
    x: u16,
    y_num: u32,
    y_den: u16,
}

fuzz_target!(|case: Case| {
    let k = (case.k % 6 + 1) as u32;
    let den = (case.beta_offset_den % 8 + 1) as i64;
    let num = case.beta_offset_num as i64 % (2 * den + 1);
    // beta = (k-1) + num/den keeps delta in a regime the classifier accepts
    let beta = BigRational::from_integer(BigInt::from(k as i64 - 1))
        + BigRational::new(BigInt::from(num), BigInt::from(den));
    let Ok(params) = TotientParams::new(k, beta) else {
        return;
    };
    if params.delta >= BigRational::from_integer(BigInt::from(1)) {
        return;
    }
    let x = (case.x % 300 + 2) as u64;
    let y = BigRational::new(
        BigInt::from(case.y_num % 100_000),
        BigInt::from(case.y_den % 64 + 1),
    );
    let cfg = RegimeConfig::default();
    let sieve = count_phi_ratio(&params, x, &y, &cfg).expect("sieve count");
    let direct = count_phi_ratio_direct(&params, x, &y).expect("direct count");
    assert_eq!(
        sieve.count, direct,
        "forms disagree at k={k} x={x} y={y} beta={}",
        params.beta
    );
});
