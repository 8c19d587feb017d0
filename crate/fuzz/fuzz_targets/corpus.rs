#![no_main]

use libfuzzer_sys::fuzz_target;
use spanalign::corpus::{read_corpus, write_corpus};

fuzz_target!(|data: &[u8]| {
    let Ok(docs) = read_corpus(data, "fuzz") else { return };
    let mut out = Vec::new();
    write_corpus(&mut out, &docs).unwrap();
    let again = read_corpus(out.as_slice(), "fuzz").expect("written corpus must parse");
    assert_eq!(docs, again);
});
