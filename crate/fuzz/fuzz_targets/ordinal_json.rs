#![no_main]

use libfuzzer_sys::fuzz_target;
use szlenk::ordinal::Ordinal;

fuzz_target!(|data: &[u8]| {
    if let Ok(o) = serde_json::from_slice::<Ordinal>(data) {
        let s = serde_json::to_string(&o).unwrap();
        let back: Ordinal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, o);
    }
});
