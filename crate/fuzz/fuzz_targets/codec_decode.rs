#![no_main]

use hmqct_core::codec::{bytes_to_bits, decode_stream, encode_into, BitWriter};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let bits = bytes_to_bits(data);
    if let Ok(values) = decode_stream(&bits) {
        // re-encoding reproduces the input up to zero padding
        let mut w = BitWriter::new();
        for &z in &values {
            encode_into(&mut w, z).unwrap();
        }
        let used = w.len();
        assert_eq!(w.as_bits(), &bits[..used]);
        assert!(bits[used..].iter().all(|&b| !b));
    }
});
