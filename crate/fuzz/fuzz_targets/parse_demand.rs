#![no_main]

use libfuzzer_sys::fuzz_target;

// First byte picks the vertex count.
fuzz_target!(|data: &[u8]| {
    let Some((&nv, rest)) = data.split_first() else {
        return;
    };
    if let Ok(text) = std::str::from_utf8(rest) {
        let _ = irls_core::instances::parse_demand(text, nv as usize);
    }
});
