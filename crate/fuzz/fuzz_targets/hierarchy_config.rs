#![no_main]

use colpat::pattern::{tokenize_with, Hierarchy};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(h) = Hierarchy::from_toml_str(text) {
        let again = Hierarchy::from_toml_str(&h.to_toml_string()).expect("rendered hierarchy parses");
        assert_eq!(again.fingerprint(), h.fingerprint());
        for value in ["9", "ab", "1.5", ":"] {
            for token in tokenize_with(value, h.tokenizer_options()).unwrap() {
                assert!(h.generalizations(&token).iter().all(|c| c.matches(&token)));
            }
        }
    }
});
