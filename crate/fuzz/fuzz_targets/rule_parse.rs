#![no_main]

use colpat::rule::ValidationRule;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(rule) = ValidationRule::from_json(text) {
        let again = ValidationRule::from_json(&rule.to_json()).expect("serialized rule parses");
        assert_eq!(again.to_json(), rule.to_json());
        let _ = rule.train_counts();
    }
});
