#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::models::model;

fuzz_target!(|data: &[u8]| {
    if data.len() > 256 {
        return;
    }
    let Ok(name) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = model(name) {
        // Canonical names resolve to the same tensor.
        let again = model(&m.name).expect("canonical name resolves");
        assert_eq!(again.rm, m.rm);
    }
});
