#![no_main]
use libfuzzer_sys::fuzz_target;

use magd::cli::parse_invocation;

// One argument per line.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(inv) = parse_invocation(text.split('\n')) {
        inv.config.validate().expect("resolved config is valid");
        let again = parse_invocation(inv.to_args()).expect("serialized invocation parses");
        assert_eq!(again, inv);
    }
});
