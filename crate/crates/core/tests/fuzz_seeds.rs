//! Replays the checked-in fuzz seeds through the parsers the fuzz targets
//! exercise. Every seed is a well-formed input and must parse.

use std::fs;
use std::path::PathBuf;

use spanalign::corpus::{parse_alignments, read_corpus, write_corpus};
use spanalign::predict::{read_predictions, Dictionary};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn corpus_seeds_round_trip() {
    for (name, data) in seeds("corpus") {
        let docs = read_corpus(data.as_slice(), &name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut out = Vec::new();
        write_corpus(&mut out, &docs).unwrap();
        assert_eq!(read_corpus(out.as_slice(), &name).unwrap(), docs, "{name}");
    }
}

#[test]
fn alignment_seeds_parse() {
    for (name, data) in seeds("alignments") {
        let parsed = parse_alignments(data.as_slice(), &name).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!parsed.is_empty(), "{name}");
    }
}

#[test]
fn prediction_seeds_parse() {
    for (name, data) in seeds("predictions") {
        let (&k, rest) = data.split_first().unwrap();
        let file = read_predictions(rest, &name, usize::from(k % 8) + 1).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!file.records.is_empty(), "{name}");
    }
}

#[test]
fn dictionary_seeds_parse() {
    for (name, data) in seeds("dictionary") {
        let dict = Dictionary::read(data.as_slice(), &name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let _ = dict.inverted();
    }
}
