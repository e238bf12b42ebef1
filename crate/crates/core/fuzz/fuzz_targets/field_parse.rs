#![no_main]
use libfuzzer_sys::fuzz_target;

// The field parser must reject any malformed input with a typed error and
// never panic, over-allocate, or accept non-finite amplitudes.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = beamtomo::parse_field(text);
    }
});
