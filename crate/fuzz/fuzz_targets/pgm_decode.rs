#![no_main]

use hoss::pgm::{decode, encode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(img) = decode(data) else { return };
    assert_eq!(img.samples.len(), img.width * img.height);
    assert!(img.samples.iter().all(|&s| s <= img.maxval));
    let again = decode(&encode(&img)).expect("encoded image decodes");
    assert_eq!((again.width, again.height), (img.width, img.height));
    if img.maxval == 255 {
        assert_eq!(again, img);
    }
    let _ = hoss::GrayImage::from_pgm(&img);
});
