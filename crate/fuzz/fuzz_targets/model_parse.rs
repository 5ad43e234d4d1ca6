#![no_main]

use hoss::SvmModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = SvmModel::from_json(text) else { return };
    let again = SvmModel::from_json(&model.to_json()).expect("written model parses");
    assert_eq!(again, model);
    let probe = vec![0.5; model.dim()];
    let _ = hoss::svm_predict(&model, &probe);
});
