#![no_main]

use hoss::corpus::{format_manifest, parse_manifest};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(entries) = parse_manifest(text) else { return };
    let again = parse_manifest(&format_manifest(&entries)).expect("formatted manifest parses");
    assert_eq!(again, entries);
});
