#![no_main]

use colpat::pattern::{Pattern, TokenizerOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    for opts in [TokenizerOptions::default(), TokenizerOptions { merge_decimals: true }] {
        if let Ok(p) = Pattern::parse_with(text, opts) {
            let again = Pattern::parse_with(&p.key(), opts).expect("canonical key parses");
            assert_eq!(again, p);
        }
    }
});
