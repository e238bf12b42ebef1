#![no_main]
use beamtomo::TomogramQuery;
use libfuzzer_sys::fuzz_target;

// Query parsing never panics; every accepted query survives a
// format/parse round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(q) = TomogramQuery::parse(text) else { return };
    let back = TomogramQuery::parse(&q.to_string()).expect("query round-trips");
    assert_eq!(q, back);
});
