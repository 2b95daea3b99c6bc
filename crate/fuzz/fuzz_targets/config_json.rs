#![no_main]

use libfuzzer_sys::fuzz_target;
use nonnormal_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        // A resolved config written back out must load to the same value.
        let again = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&again).unwrap(), cfg);
    }
});
