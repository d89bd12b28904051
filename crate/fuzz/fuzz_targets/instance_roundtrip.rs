#![no_main]

use irls_core::instances::{format_instance, parse_instance};
use libfuzzer_sys::fuzz_target;

// Anything that parses must survive format -> parse unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(inst) = parse_instance(text) {
        let again = parse_instance(&format_instance(&inst)).expect("formatted instance parses");
        assert_eq!(again.a, inst.a);
        assert_eq!(again.b, inst.b);
        assert_eq!(again.truth, inst.truth);
    }
});
