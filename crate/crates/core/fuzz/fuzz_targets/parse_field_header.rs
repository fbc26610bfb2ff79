#![no_main]
use helmsplit::dump::parse_header;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(h) = parse_header(data) {
        assert_eq!(parse_header(&h.to_json()).expect("header round trips"), h);
    }
});
