#![no_main]

use libfuzzer_sys::fuzz_target;
use nonnormal::io::{parse_esd_csv, write_esd_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = parse_esd_csv(text) {
        assert_eq!(parse_esd_csv(&write_esd_csv(&points)).unwrap(), points);
    }
});
