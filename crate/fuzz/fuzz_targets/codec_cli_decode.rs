#![no_main]

use hmqct_cli::app::CodecCommand;
use hmqct_cli::commands::cmd_codec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(input) = std::str::from_utf8(data) {
        for hex in [false, true] {
            let _ = cmd_codec(&CodecCommand::Decode { input: input.to_string(), hex });
        }
    }
});
