#![no_main]

use ghostbox::analysis::verify_transcript_json;
use ghostbox::Error;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 1 << 16 {
        return;
    }
    if let Err(Error::Parse { offset, .. }) = verify_transcript_json(text) {
        assert!(offset <= text.len());
    }
});
