#![no_main]
use libfuzzer_sys::fuzz_target;

use magd::cli::{format_points, parse_points};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(points) = parse_points(text) {
        let dim = points[0].dim();
        assert!(points.iter().all(|p| p.dim() == dim));
        assert!(points.iter().flat_map(|p| p.coords()).all(|c| c.is_finite()));
        assert_eq!(parse_points(&format_points(&points)).unwrap(), points);
    }
});
