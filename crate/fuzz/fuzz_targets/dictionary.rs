#![no_main]

use libfuzzer_sys::fuzz_target;
use spanalign::predict::Dictionary;

fuzz_target!(|data: &[u8]| {
    if let Ok(dict) = Dictionary::read(data, "fuzz") {
        let _ = dict.inverted();
    }
});
