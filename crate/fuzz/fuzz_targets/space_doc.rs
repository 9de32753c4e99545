#![no_main]

use libfuzzer_sys::fuzz_target;
use szlenk::calculus::{direct_sum_index, SpaceDoc};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = SpaceDoc::from_json(src) else {
        return;
    };
    assert_eq!(SpaceDoc::from_json(&doc.to_json()).unwrap(), doc);
    let _ = direct_sum_index(&doc.expr);
});
