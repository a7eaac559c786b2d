#![no_main]

use colpat::index::CorpusIndex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(index) = CorpusIndex::from_bytes(data) {
        // only canonical encodings are accepted
        assert_eq!(index.to_bytes(), data);
    }
});
