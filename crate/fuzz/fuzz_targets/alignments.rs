#![no_main]

use libfuzzer_sys::fuzz_target;
use spanalign::corpus::parse_alignments;

fuzz_target!(|data: &[u8]| {
    let _ = parse_alignments(data, "fuzz");
});
