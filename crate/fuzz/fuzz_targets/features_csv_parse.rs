#![no_main]

use hoss::corpus::FeatureTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = FeatureTable::parse(text) else { return };
    let again = FeatureTable::parse(&table.to_csv()).expect("written table parses");
    assert_eq!(again, table);
    if let Ok(map) = table.label_map() {
        let _ = table.dataset(&map);
    }
});
