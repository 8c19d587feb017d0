#![no_main]

use libfuzzer_sys::fuzz_target;
use spanalign::predict::read_predictions;

fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else { return };
    let _ = read_predictions(rest, "fuzz", usize::from(k % 8) + 1);
});
