#![no_main]

use libfuzzer_sys::fuzz_target;
use szlenk::rational::{format_rational, parse_rational, QPow};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = parse_rational(src) {
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
    let _ = src.parse::<QPow>();
});
