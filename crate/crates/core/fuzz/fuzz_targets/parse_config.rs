#![no_main]

use canonical_cluster::config::{Config, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = Config::parse(text) {
        // the canonical form must parse back to the same thing
        let again = Config::parse(&config.to_string()).expect("display output parses");
        assert_eq!(config.to_string(), again.to_string());
        let _ = RunConfig::from_config(&config);
    }
});
