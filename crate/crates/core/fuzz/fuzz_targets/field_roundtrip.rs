#![no_main]
use libfuzzer_sys::fuzz_target;

// Any field the parser accepts must serialize to text that re-parses to the
// identical field.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(field) = beamtomo::parse_field(text) else { return };
    let rendered = beamtomo::write_field(&field);
    let back = beamtomo::parse_field(&rendered).expect("serialized field re-parses");
    assert_eq!(field, back);
});
