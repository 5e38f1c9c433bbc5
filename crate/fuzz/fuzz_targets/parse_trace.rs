#![no_main]
use libfuzzer_sys::fuzz_target;

use magd::trace::parse_trace;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_trace(text) {
        for row in rows {
            assert!(row.agent >= 1);
            assert!(row.f.is_finite() && row.best_f.is_finite());
        }
    }
});
