//! Fuzz the exact-rational decoder on raw text.
//!
//! No input may panic. Anything accepted must survive a canonical-text
//! round trip bit-exactly, and the beta denominator cap must be a pure
//! predicate of the parsed value.

#![no_main]

use libfuzzer_sys::fuzz_target;
use totlab::rational::{check_beta_denom, parse_rational, rational_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = parse_rational(text) {
        let canon = rational_to_string(&value);
        let reparsed = parse_rational(&canon).expect("canonical text must reparse");
        assert_eq!(reparsed, value, "round trip changed the value for {text:?}");
        // the cap check must never panic, whatever the denominator
        let _ = check_beta_denom(&value);
    }
});
