#![no_main]
use helmsplit::pipeline::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = ScenarioConfig::from_json(data) {
        let again = ScenarioConfig::from_json(&cfg.to_json()).expect("serialized config parses");
        assert_eq!(again.hash(), cfg.hash());
    }
});
