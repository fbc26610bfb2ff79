#![no_main]
use helmsplit::manifest::parse_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(m) = parse_manifest(data) {
        let json = m.to_json();
        assert_eq!(
            parse_manifest(&json)
                .expect("manifest round trips")
                .to_json(),
            json
        );
    }
});
