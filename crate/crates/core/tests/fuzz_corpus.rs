//! Replays the checked-in fuzz seeds through the same checks the fuzz
//! targets make.

use std::fs;
use std::path::PathBuf;

use magd::cli::{format_points, parse_invocation, parse_points};
use magd::trace::parse_trace;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let text = String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned();
            (path, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn points_seeds() {
    for (path, text) in seeds("parse_points") {
        if let Ok(points) = parse_points(&text) {
            assert_eq!(
                parse_points(&format_points(&points)).unwrap(),
                points,
                "{}",
                path.display()
            );
        }
    }
}

#[test]
fn invocation_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_invocation") {
        if let Ok(inv) = parse_invocation(text.split('\n')) {
            accepted += 1;
            inv.config.validate().unwrap();
            assert_eq!(
                parse_invocation(inv.to_args()).unwrap(),
                inv,
                "{}",
                path.display()
            );
        }
    }
    assert!(accepted > 0);
}

#[test]
fn trace_seeds() {
    for (path, text) in seeds("parse_trace") {
        if let Ok(rows) = parse_trace(&text) {
            assert!(rows.iter().all(|r| r.agent >= 1), "{}", path.display());
        }
    }
}
