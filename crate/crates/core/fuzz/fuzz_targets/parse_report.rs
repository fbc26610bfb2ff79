#![no_main]
use helmsplit::validator::{emit_defect_table, ValidationReport};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(r) = ValidationReport::from_json(data) {
        let _ = emit_defect_table(&r);
        assert_eq!(
            ValidationReport::from_json(&r.to_json()).expect("report round trips"),
            r
        );
    }
});
