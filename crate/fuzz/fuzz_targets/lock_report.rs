// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use simll::formats::{parse_lock_report, write_lock_report};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(records) = parse_lock_report(text) {
        // Names with whitespace or '=' cannot come back out of the
        // line format, but the parser never produces them.
        assert_eq!(
            parse_lock_report(&write_lock_report(&records)).unwrap(),
            records
        );
    }
});
