// SPDX-License-Identifier: Apache-2.0

//! Arbitrary text into the `.bench` parser; accepted netlists must survive
//! a write/parse round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use simll::netlist::{parse_bench, write_bench, MuxStyle};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(n) = parse_bench(text) {
        let again = parse_bench(&write_bench(&n, MuxStyle::Primitive)).expect("own output parses");
        assert_eq!(again, n);
        let _ = n.validate();
    }
});
