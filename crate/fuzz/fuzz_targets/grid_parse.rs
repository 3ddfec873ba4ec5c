#![no_main]

use hmqct_cli::grid::{parse_count, parse_int_grid, parse_real_grid, MAX_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = parse_real_grid(s) {
            assert!(g.len() <= MAX_POINTS && g.iter().all(|v| v.is_finite()));
        }
        if let Ok(g) = parse_int_grid(s) {
            assert!(g.len() <= MAX_POINTS + 1);
        }
        let _ = parse_count(s);
    }
});
