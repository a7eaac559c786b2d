#![no_main]

use colpat::pattern::{enumerate_value_patterns, tokenize_with, Hierarchy, TokenizerOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    for opts in [TokenizerOptions::default(), TokenizerOptions { merge_decimals: true }] {
        if let Ok(tokens) = tokenize_with(text, opts) {
            let joined: String = tokens.iter().map(|t| t.text).collect();
            assert_eq!(joined, text);
        }
    }
    if text.len() <= 64 {
        let h = Hierarchy::default();
        if let Ok(set) = enumerate_value_patterns(text, &h, 2000) {
            assert!(set.patterns.iter().all(|p| p.matches(text)));
        }
    }
});
