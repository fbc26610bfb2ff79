#![no_main]
use helmsplit::dump::{decode, encode, FieldHeader};
use libfuzzer_sys::fuzz_target;

// first byte picks the component count, the rest is the payload of an n = 8 dump
fuzz_target!(|data: &[u8]| {
    let Some((&count, payload)) = data.split_first() else {
        return;
    };
    let components = (0..count % 4).map(|i| format!("c{i}")).collect();
    let header = FieldHeader {
        n: 8,
        length: 1.0,
        components,
        t: 0.0,
    };
    if let Ok(fields) = decode(&header, payload) {
        let refs: Vec<_> = fields.iter().collect();
        assert_eq!(encode(&refs), payload);
    }
});
