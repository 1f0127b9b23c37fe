#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = serde_json::from_slice::<RunConfig>(data) {
        // Resolution validates without running anything.
        let _ = cfg.resolved();
        let text = serde_json::to_string(&cfg).unwrap();
        let again: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(again, cfg);
    }
});
