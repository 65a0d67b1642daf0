use std::hash::Hasher;

use fnv::FnvHasher;

/// 64-bit FNV-1a digest of `bytes`.
pub fn fnv_digest(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// Digest over a canonical line-per-event serialisation.
pub(crate) fn digest_lines<T: serde::Serialize>(items: &[T]) -> u64 {
    let mut h = FnvHasher::default();
    for item in items {
        let line = serde_json::to_vec(item).expect("events serialise");
        h.write(&line);
        h.write(b"\n");
    }
    h.finish()
}

pub(crate) fn hex16(x: u64) -> String {
    format!("{x:016x}")
}
