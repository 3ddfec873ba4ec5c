#![no_main]

use hmqct_core::Beta;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(beta) = s.parse::<Beta>() {
            assert!(beta.as_f64() > 0.0 && beta.as_f64() <= 0.5);
            assert_eq!(beta.to_string().parse::<Beta>().unwrap(), beta);
        }
    }
});
