#![no_main]

use libfuzzer_sys::fuzz_target;
use nonnormal::io::{parse_grid_csv, write_grid_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_grid_csv(text) {
        let again = parse_grid_csv(&write_grid_csv(&g)).unwrap();
        assert_eq!(again.spec, g.spec);
        assert_eq!(again.failures, g.failures);
        assert_eq!(again.values.len(), g.values.len());
    }
});
