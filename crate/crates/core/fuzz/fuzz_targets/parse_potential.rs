#![no_main]

use canonical_cluster::potential::parse_potential_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_potential_spec(text) {
        for r in [0.0, 0.5, 1.0, 4.0] {
            let _ = p.energy(r);
            assert!(p.mayer_f(1.0, r) >= -1.0);
        }
    }
});
