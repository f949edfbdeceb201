// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use simll::formats::{parse_key_file, write_key_file};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(bits) = parse_key_file(text) {
        assert_eq!(parse_key_file(&write_key_file(&bits)).unwrap(), bits);
    }
});
