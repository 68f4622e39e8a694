#![no_main]

use canonical_cluster::estimate::IntegralResult;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = text.parse::<IntegralResult>() {
        let _ = r.to_string().parse::<IntegralResult>();
    }
});
