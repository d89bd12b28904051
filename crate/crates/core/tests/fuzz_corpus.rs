//! Replays the checked-in fuzz seeds through the parsers on stable.

use std::path::PathBuf;

use irls_core::instances::{format_instance, parse_demand, parse_edges, parse_instance};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn instance_seeds() {
    let mut parsed = 0;
    for (path, bytes) in seeds("parse_instance") {
        let text = std::str::from_utf8(&bytes).unwrap();
        if let Ok(inst) = parse_instance(text) {
            parsed += 1;
            let again = parse_instance(&format_instance(&inst)).unwrap();
            assert_eq!(again, inst, "{}", path.display());
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn graph_seeds() {
    for (_, bytes) in seeds("parse_edges") {
        let _ = parse_edges(std::str::from_utf8(&bytes[1..]).unwrap(), bytes[0] as usize);
    }
    for (_, bytes) in seeds("parse_demand") {
        let _ = parse_demand(std::str::from_utf8(&bytes[1..]).unwrap(), bytes[0] as usize);
    }
    assert!(parse_edges(" 1 2\n2 3\n", 3).is_ok());
}
