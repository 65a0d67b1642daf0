#![no_main]

use ghostbox::analysis::verify_box_transcript;
use ghostbox::spookybox::BoxGameTranscript;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = BoxGameTranscript::from_json(text) else { return };
    if t.config.vertex_count <= 100_000 {
        let _ = verify_box_transcript(&t);
        let _ = t.replay();
    }
});
