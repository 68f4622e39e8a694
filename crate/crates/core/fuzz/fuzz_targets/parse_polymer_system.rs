#![no_main]

use canonical_cluster::config::parse_polymer_system;
use libfuzzer_sys::fuzz_target;
use num_rational::BigRational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_polymer_system::<f64>(text);
    let _ = parse_polymer_system::<BigRational>(text);
});
