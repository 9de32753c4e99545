//! Fan set documents: decoding never panics, and every accepted document
//! can be compiled and derived once.

#![no_main]

use libfuzzer_sys::fuzz_target;
use szlenk::engine::{self, FanSetDoc};
use szlenk::rational::QPow;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = FanSetDoc::from_json(src) else {
        return;
    };
    assert_eq!(FanSetDoc::from_json(&doc.to_json()).unwrap(), doc);
    // Keep big inputs from turning into slow units.
    if doc.set.size() > 64 {
        return;
    }
    let eps_q = QPow::from_ratio(1, 2);
    if doc.set.has_product() {
        let _ = engine::sz_eps(&doc.set, &eps_q);
    } else {
        let d = engine::derive(&doc.set, &eps_q).expect("valid product-free sets derive");
        d.validate().expect("derived sets are valid");
    }
});
