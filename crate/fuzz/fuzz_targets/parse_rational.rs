#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::parse_rational;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = parse_rational(text) {
            // Display is canonical and parses back to the same value.
            assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
        }
    }
});
