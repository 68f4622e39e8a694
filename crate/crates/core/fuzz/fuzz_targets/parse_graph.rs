#![no_main]

use canonical_cluster::graph::LabeledGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = text.parse::<LabeledGraph>() {
        let back: LabeledGraph = g.to_string().parse().expect("round trip");
        assert_eq!(back, g);
    }
});
