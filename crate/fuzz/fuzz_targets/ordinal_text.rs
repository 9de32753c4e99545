//! Ordinal expressions: parsing never panics, and accepted input survives
//! a print/parse round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use szlenk::ordinal::parse_ordinal;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(o) = parse_ordinal(src) {
        let back = parse_ordinal(&o.to_string()).expect("printed ordinals parse");
        assert_eq!(back, o);
    }
});
