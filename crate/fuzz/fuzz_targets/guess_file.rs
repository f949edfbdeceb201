// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use simll::formats::{parse_guess_file, write_guess_file};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = parse_guess_file(text) {
        assert_eq!(parse_guess_file(&write_guess_file(&g)).unwrap(), g);
    }
});
