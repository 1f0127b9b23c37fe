#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::functional::{q_value, FCoefficients};
use pinchlab::Rational;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(c) = FCoefficients::<Rational>::parse(text) {
            // 1 + a1² + a2² > 0, so Q values are always defined.
            let _ = q_value(&c, &Rational::from_integer(0));
        }
    }
});
