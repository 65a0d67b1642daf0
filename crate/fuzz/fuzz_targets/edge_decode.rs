#![no_main]

use ghostbox::graph::{edge_count, edge_index, endpoints, EdgeId};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: [u8; 8]| {
    let id = u32::from_le_bytes(data[..4].try_into().unwrap());
    let n = u32::from_le_bytes(data[4..].try_into().unwrap()) as usize % 70_000;
    match endpoints(EdgeId(id), n) {
        Ok((u, v)) => {
            assert!(u.0 < v.0 && (v.0 as usize) < n);
            assert_eq!(edge_index(u, v, n).unwrap(), EdgeId(id));
            assert_eq!(edge_index(v, u, n).unwrap(), EdgeId(id));
        }
        Err(_) => assert!(id as usize >= edge_count(n)),
    }
});
