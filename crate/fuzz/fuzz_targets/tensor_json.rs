#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::AlgCurvTensor;

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = serde_json::from_slice::<serde_json::Value>(data) else {
        return;
    };
    if let Ok(t) = AlgCurvTensor::<pinchlab::Rational>::from_json(&doc) {
        let back = AlgCurvTensor::<pinchlab::Rational>::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
    let _ = AlgCurvTensor::<f64>::from_json(&doc);
});
