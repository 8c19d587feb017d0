//! Token spans to sentence units: boundary snapping, low-score filtering and
//! per-unit score averaging.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, SentenceRange, Span};
use crate::error::{Error, Result};
use crate::predict::PredictionRecord;

/// Raw span scores below this are discarded before averaging.
pub const DEFAULT_MIN_SCORE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryRule {
    /// Each endpoint moves to its closest sentence boundary, outward on ties.
    #[default]
    Nearest,
    /// Largest sentence run lying inside the span.
    Contain,
    /// Smallest sentence run covering the span.
    Cover,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapConfig {
    pub min_score: f64,
    pub rule: BoundaryRule,
}

impl Default for SnapConfig {
    fn default() -> Self {
        SnapConfig { min_score: DEFAULT_MIN_SCORE, rule: BoundaryRule::Nearest }
    }
}

/// Index of the boundary closest to `x`; on a tie, the lower one when
/// `prefer_low`, else the higher one.
fn nearest_boundary(bounds: &[usize], x: usize, prefer_low: bool) -> usize {
    let hi = bounds.partition_point(|&b| b < x);
    if hi == 0 {
        return 0;
    }
    if hi == bounds.len() {
        return hi - 1;
    }
    let lo = hi - 1;
    let (dl, dh) = (x - bounds[lo], bounds[hi] - x);
    match dl.cmp(&dh) {
        std::cmp::Ordering::Less => lo,
        std::cmp::Ordering::Greater => hi,
        std::cmp::Ordering::Equal if prefer_low => lo,
        std::cmp::Ordering::Equal => hi,
    }
}

fn midpoint_sentence(doc: &Document, span: Span) -> SentenceRange {
    let mid = span.start() + (span.len() - 1) / 2;
    SentenceRange::single(doc.sentence_at(mid).expect("span checked against document"))
}

/// Maps a token span onto a non-empty run of whole sentences.
///
/// A snap that collapses to nothing falls back to the sentence holding the
/// span's midpoint token.
pub fn snap_span(doc: &Document, span: Option<Span>, rule: BoundaryRule) -> Result<SentenceRange> {
    let span = span.ok_or_else(|| Error::Contract("cannot snap a null span".into()))?;
    doc.check_span(span)?;
    let bounds = doc.boundaries();
    let (lo, hi) = match rule {
        BoundaryRule::Nearest => {
            (nearest_boundary(&bounds, span.start(), true), nearest_boundary(&bounds, span.end(), false))
        }
        BoundaryRule::Contain => {
            (bounds.partition_point(|&b| b < span.start()), bounds.partition_point(|&b| b <= span.end()) - 1)
        }
        BoundaryRule::Cover => {
            (bounds.partition_point(|&b| b <= span.start()) - 1, bounds.partition_point(|&b| b < span.end()))
        }
    };
    if lo < hi {
        SentenceRange::new(lo, hi)
    } else {
        Ok(midpoint_sentence(doc, span))
    }
}

/// A source/target sentence-unit pair with every raw score that snapped
/// onto it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceUnitCandidate {
    #[serde(serialize_with = "ser_range")]
    pub src: SentenceRange,
    #[serde(serialize_with = "ser_range")]
    pub tgt: SentenceRange,
    pub scores: Vec<f64>,
    pub avg_score: f64,
}

fn ser_range<S: serde::Serializer>(r: &SentenceRange, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(r.start()..r.end())
}

impl SentenceUnitCandidate {
    /// Swaps source and target, for reverse-direction candidates.
    pub fn reoriented(&self) -> Self {
        SentenceUnitCandidate { src: self.tgt, tgt: self.src, scores: self.scores.clone(), avg_score: self.avg_score }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Snaps every surviving prediction of a document pair to sentence units.
///
/// `query_doc` is the document the query spans index into. Null predictions
/// and spans scoring below `min_score` are dropped first; units hit more
/// than once keep the mean of their raw scores. Sorted by descending average.
pub fn collect_candidates(
    records: &[PredictionRecord],
    query_doc: &Document,
    target_doc: &Document,
    config: &SnapConfig,
) -> Result<Vec<SentenceUnitCandidate>> {
    if config.min_score.is_nan() || config.min_score < 0.0 {
        return Err(Error::Config(format!("min_score must be >= 0, got {}", config.min_score)));
    }
    let mut merged: HashMap<(SentenceRange, SentenceRange), Vec<f64>> = HashMap::new();
    for rec in records {
        if rec.query_doc_id() != query_doc.doc_id() || rec.target_doc_id() != target_doc.doc_id() {
            return Err(Error::Reference(format!(
                "record {} pairs {:?} -> {:?}, expected {:?} -> {:?}",
                rec.qid(),
                rec.query_doc_id(),
                rec.target_doc_id(),
                query_doc.doc_id(),
                target_doc.doc_id()
            )));
        }
        if rec.has_null_slot() {
            return Err(Error::Contract(format!("record {} has not been through a null rule", rec.qid())));
        }
        let mut src = None;
        for p in rec.predictions() {
            let Some(span) = p.span else { continue };
            if p.score < config.min_score {
                continue;
            }
            let src = match src {
                Some(r) => r,
                None => *src.insert(snap_span(query_doc, Some(rec.query_span()), config.rule)?),
            };
            let tgt = snap_span(target_doc, Some(span), config.rule)?;
            merged.entry((src, tgt)).or_default().push(p.score);
        }
    }
    let mut out: Vec<SentenceUnitCandidate> = merged
        .into_iter()
        .map(|((src, tgt), scores)| SentenceUnitCandidate { src, tgt, avg_score: mean(&scores), scores })
        .collect();
    out.sort_by(|a, b| b.avg_score.total_cmp(&a.avg_score).then_with(|| (a.src, a.tgt).cmp(&(b.src, b.tgt))));
    Ok(out)
}

/// Debug dump: one JSON object per candidate.
pub fn write_candidates<W: Write>(mut w: W, candidates: &[SentenceUnitCandidate]) -> std::io::Result<()> {
    for c in candidates {
        serde_json::to_writer(&mut w, c)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
