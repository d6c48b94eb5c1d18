#![no_main]

use libfuzzer_sys::fuzz_target;
use staircase::grid::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = text.parse::<Grid>() {
        assert!(!g.is_empty());
        assert!(g.values().iter().all(|v| v.is_finite()));
        assert!(g.values().windows(2).all(|w| w[0] < w[1]));
    }
});
