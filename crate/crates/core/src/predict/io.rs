//! Line-delimited prediction files.
//!
//! The first non-blank line is a header declaring the direction and the
//! producer. Every following line is one query:
//!
//! ```text
//! {"direction":"src->tgt","producer":"qanet","null_slot":false,"log_space":false}
//! {"qid":"d1:1-4","query_doc_id":"d1","query_span":[1,4],"target_doc_id":"e1",
//!  "null_score":0.01,"spans":[{"span":[3,9],"score":0.8}]}
//! ```
//!
//! Token positions are 1-based and inclusive. With `null_slot` set, target
//! positions are indices into `<NA>`-prefixed vectors, so `[0, 0]` is the
//! `<NA>` token. A record may carry `start_probs`/`end_probs` instead of (or
//! besides) `spans`; an explicit span list wins.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Span;
use crate::error::{Error, Result};
use crate::predict::{top_k_spans, Direction, PositionDistributions, PredictionRecord, ScoreSource, SpanPrediction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionHeader {
    pub direction: Direction,
    pub producer: String,
    /// Target positions include a leading `<NA>` slot.
    #[serde(default)]
    pub null_slot: bool,
    /// Scores and probabilities are natural logarithms.
    #[serde(default)]
    pub log_space: bool,
    /// Position vectors are declared to sum to one.
    #[serde(default)]
    pub normalized: bool,
}

impl PredictionHeader {
    pub fn new(direction: Direction, producer: impl Into<String>, null_slot: bool) -> Self {
        PredictionHeader { direction, producer: producer.into(), null_slot, log_space: false, normalized: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionFile {
    pub header: PredictionHeader,
    pub records: Vec<PredictionRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpanEntry {
    span: Option<[usize; 2]>,
    score: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    qid: String,
    query_doc_id: String,
    query_span: [usize; 2],
    target_doc_id: String,
    null_score: f64,
    #[serde(default)]
    spans: Vec<SpanEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end_probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_space: Option<bool>,
}

fn decode_target(pair: [usize; 2], null_slot: bool) -> Result<Span> {
    let [k, l] = pair;
    if null_slot {
        if k > l {
            return Err(Error::Validation(format!("target span [{k}, {l}] is reversed")));
        }
        Span::new(k, l + 1)
    } else {
        Span::from_inclusive(k, l)
    }
}

fn encode_target(span: Span, null_slot: bool) -> [usize; 2] {
    if null_slot {
        [span.start(), span.end() - 1]
    } else {
        let (k, l) = span.to_inclusive();
        [k, l]
    }
}

/// Number of spans decoded from position vectors when a record has no span
/// list of its own.
pub const DEFAULT_VECTOR_TOP_K: usize = 20;

fn decode_record(line: RecordLine, header: &PredictionHeader, top_k: usize) -> Result<PredictionRecord> {
    let log = line.log_space.unwrap_or(header.log_space);
    let lin = |x: f64| if log { x.exp() } else { x };
    let query_span = Span::from_inclusive(line.query_span[0], line.query_span[1])?;

    let predictions = if !line.spans.is_empty() {
        line.spans
            .iter()
            .map(|e| {
                Ok(SpanPrediction {
                    span: e.span.map(|p| decode_target(p, header.null_slot)).transpose()?,
                    score: lin(e.score),
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        match (line.start_probs, line.end_probs) {
            (Some(p1), Some(p2)) => {
                let p1 = p1.into_iter().map(lin).collect();
                let p2 = p2.into_iter().map(lin).collect();
                let dists = PositionDistributions::new(p1, p2, header.null_slot)?;
                if header.normalized {
                    dists.check_normalized()?;
                }
                top_k_spans(&dists, top_k)?
            }
            (None, None) => Vec::new(),
            _ => return Err(Error::Validation("start_probs and end_probs must be given together".into())),
        }
    };
    if let Some(p) = predictions.iter().find(|p| !p.score.is_finite() || p.score < 0.0) {
        return Err(Error::Validation(format!("span score {} is not a finite non-negative number", p.score)));
    }
    let null_score = lin(line.null_score);
    if !null_score.is_finite() {
        return Err(Error::Validation(format!("null score {null_score} is not finite")));
    }
    PredictionRecord::new(
        line.qid,
        line.query_doc_id,
        query_span,
        line.target_doc_id,
        predictions,
        null_score,
        ScoreSource::File,
        header.null_slot,
    )
}

/// Reads a prediction file. Vector-only records are decoded to their `top_k`
/// best spans.
pub fn read_predictions<R: BufRead>(reader: R, origin: &str, top_k: usize) -> Result<PredictionFile> {
    let mut header = None;
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        match &header {
            None => {
                let h: PredictionHeader = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(origin, lineno, format!("bad header: {e}")))?;
                header = Some(h);
            }
            Some(h) => {
                let rec: RecordLine =
                    serde_json::from_str(&line).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
                let rec = decode_record(rec, h, top_k).map_err(|e| e.at(origin, lineno))?;
                records.push(rec);
            }
        }
    }
    let header = header.ok_or_else(|| Error::parse(origin, 1, "missing header line"))?;
    Ok(PredictionFile { header, records })
}

pub fn load_predictions(path: impl AsRef<Path>, top_k: usize) -> Result<PredictionFile> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(BufReader::new(file), &path.display().to_string(), top_k)
}

/// Writes the header and records in linear space. Records must agree with
/// the header's `null_slot` flag.
pub fn write_predictions<W: Write>(mut w: W, header: &PredictionHeader, records: &[PredictionRecord]) -> Result<()> {
    let mut header = header.clone();
    header.log_space = false;
    let io = |e: std::io::Error| Error::io("<prediction output>", e);
    serde_json::to_writer(&mut w, &header).map_err(|e| io(e.into()))?;
    w.write_all(b"\n").map_err(io)?;
    for r in records {
        if r.has_null_slot() != header.null_slot {
            return Err(Error::Contract(format!(
                "record {} null_slot={} disagrees with header null_slot={}",
                r.qid(),
                r.has_null_slot(),
                header.null_slot
            )));
        }
        let (i, j) = r.query_span().to_inclusive();
        let line = RecordLine {
            qid: r.qid().to_string(),
            query_doc_id: r.query_doc_id().to_string(),
            query_span: [i, j],
            target_doc_id: r.target_doc_id().to_string(),
            null_score: r.null_score(),
            spans: r
                .predictions()
                .iter()
                .map(|p| SpanEntry { span: p.span.map(|s| encode_target(s, header.null_slot)), score: p.score })
                .collect(),
            start_probs: None,
            end_probs: None,
            log_space: None,
        };
        serde_json::to_writer(&mut w, &line).map_err(|e| io(e.into()))?;
        w.write_all(b"\n").map_err(io)?;
    }
    Ok(())
}

impl PredictionRecord {
    /// Same record, as if it had been read back from a file.
    pub fn as_loaded(&self) -> PredictionRecord {
        self.clone().with_source(ScoreSource::File)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"{"direction":"src->tgt","producer":"test"}"#;

    #[test]
    fn span_list_is_one_based_inclusive() {
        let input = format!(
            "{HEADER}\n{}\n",
            r#"{"qid":"q","query_doc_id":"s","query_span":[1,3],"target_doc_id":"t","null_score":0.1,"spans":[{"span":[2,4],"score":0.5},{"span":[1,1],"score":0.7}]}"#
        );
        let f = read_predictions(input.as_bytes(), "p", 5).unwrap();
        assert_eq!(f.header.direction, Direction::Forward);
        let r = &f.records[0];
        assert_eq!(r.query_span(), Span::new(0, 3).unwrap());
        assert_eq!(r.predictions()[0].span, Some(Span::new(0, 1).unwrap()));
        assert_eq!(r.predictions()[1].span, Some(Span::new(1, 4).unwrap()));
    }

    #[test]
    fn vectors_decoded_when_no_span_list() {
        let input = format!(
            "{HEADER}\n{}\n",
            r#"{"qid":"q","query_doc_id":"s","query_span":[1,1],"target_doc_id":"t","null_score":0.0,"start_probs":[0.0,1.0,0.0],"end_probs":[0.0,0.0,1.0]}"#
        );
        let f = read_predictions(input.as_bytes(), "p", 2).unwrap();
        let r = &f.records[0];
        assert_eq!(r.predictions().len(), 2);
        assert_eq!(r.best().unwrap().span, Some(Span::new(1, 3).unwrap()));
    }

    #[test]
    fn span_list_wins_over_vectors() {
        let input = format!(
            "{HEADER}\n{}\n",
            r#"{"qid":"q","query_doc_id":"s","query_span":[1,1],"target_doc_id":"t","null_score":0.0,"spans":[{"span":[1,1],"score":0.2}],"start_probs":[0.0,1.0],"end_probs":[0.0,1.0]}"#
        );
        let f = read_predictions(input.as_bytes(), "p", 2).unwrap();
        assert_eq!(f.records[0].best().unwrap().span, Some(Span::new(0, 1).unwrap()));
    }

    #[test]
    fn log_space_is_exponentiated() {
        let input = concat!(
            r#"{"direction":"tgt->src","producer":"bert","log_space":true}"#,
            "\n",
            r#"{"qid":"q","query_doc_id":"s","query_span":[1,1],"target_doc_id":"t","null_score":-1.0,"spans":[{"span":[1,2],"score":0.0}]}"#
        );
        let f = read_predictions(input.as_bytes(), "p", 2).unwrap();
        assert_eq!(f.records[0].best().unwrap().score, 1.0);
        assert!((f.records[0].null_score() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn null_slot_positions() {
        let input = concat!(
            r#"{"direction":"src->tgt","producer":"qanet","null_slot":true}"#,
            "\n",
            r#"{"qid":"q","query_doc_id":"s","query_span":[1,1],"target_doc_id":"t","null_score":0.4,"spans":[{"span":[0,0],"score":0.4},{"span":[2,3],"score":0.3}]}"#
        );
        let f = read_predictions(input.as_bytes(), "p", 2).unwrap();
        let r = &f.records[0];
        assert!(r.has_null_slot());
        assert_eq!(r.best().unwrap().span, Some(Span::new(0, 1).unwrap()));
        assert_eq!(r.predictions()[1].span, Some(Span::new(2, 4).unwrap()));
    }

    #[test]
    fn errors_name_the_line() {
        let err = read_predictions("".as_bytes(), "p", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let input = format!("{HEADER}\n{{\"qid\":1}}\n");
        let err = read_predictions(input.as_bytes(), "p.jsonl", 2).unwrap_err();
        assert!(err.to_string().starts_with("p.jsonl:2:"), "{err}");
        let input = format!(
            "{HEADER}\n{}\n",
            r#"{"qid":"q","query_doc_id":"s","query_span":[0,1],"target_doc_id":"t","null_score":0.0}"#
        );
        let err = read_predictions(input.as_bytes(), "p.jsonl", 2).unwrap_err();
        assert!(err.to_string().starts_with("p.jsonl:2:"), "{err}");
    }

    #[test]
    fn write_then_read() {
        let header = PredictionHeader::new(Direction::Reverse, "x", true);
        let rec = PredictionRecord::new(
            "q",
            "s",
            Span::new(2, 5).unwrap(),
            "t",
            vec![
                SpanPrediction { span: Some(Span::new(0, 1).unwrap()), score: 0.5 },
                SpanPrediction { span: Some(Span::new(3, 7).unwrap()), score: 0.25 },
                SpanPrediction::null(0.125),
            ],
            0.5,
            ScoreSource::Planted,
            true,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_predictions(&mut buf, &header, std::slice::from_ref(&rec)).unwrap();
        let back = read_predictions(buf.as_slice(), "p", 2).unwrap();
        assert_eq!(back.header, header);
        assert_eq!(back.records, vec![rec.as_loaded()]);
    }
}
