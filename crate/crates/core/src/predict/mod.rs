//! Span scores from start/end position distributions, best and top-k span
//! decoding, and null-span decisions.
//!
//! A span's score is the product of its start and end probabilities. Spans
//! produced here live in *position space*: indices into the distribution
//! vectors. When the vectors carry a leading `<NA>` slot, position 0 is that
//! slot and token `t` sits at position `t + 1`; [`apply_null_rule`] maps the
//! survivors back to token space.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Span};
use crate::error::{Error, Result};

pub mod io;
pub mod lexical;
pub mod planted;

pub use io::{load_predictions, read_predictions, write_predictions, PredictionFile, PredictionHeader};
pub use lexical::{lexical_score, Dictionary, LexicalScorer};
pub use planted::PlantedScorer;

/// Which document plays the query in a prediction run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "src->tgt")]
    Forward,
    #[serde(rename = "tgt->src")]
    Reverse,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Reverse => "rev",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Start and end probabilities over target positions.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistributions {
    start: Vec<f64>,
    end: Vec<f64>,
    null_slot: bool,
}

impl PositionDistributions {
    /// `null_slot` declares that position 0 is the `<NA>` token.
    pub fn new(start: Vec<f64>, end: Vec<f64>, null_slot: bool) -> Result<Self> {
        if start.is_empty() || end.is_empty() {
            return Err(Error::Validation("empty position distribution".into()));
        }
        if start.len() != end.len() {
            return Err(Error::Validation(format!(
                "start/end distributions differ in length ({} vs {})",
                start.len(),
                end.len()
            )));
        }
        for (name, v) in [("start", &start), ("end", &end)] {
            if let Some((i, p)) = v.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
                return Err(Error::Validation(format!("{name} probability at position {i} is {p}, outside [0, 1]")));
            }
        }
        Ok(PositionDistributions { start, end, null_slot })
    }

    /// Fails unless both vectors sum to 1 within `1e-6`.
    pub fn check_normalized(&self) -> Result<()> {
        for (name, v) in [("start", &self.start), ("end", &self.end)] {
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Validation(format!("{name} distribution declared normalized but sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn end(&self) -> &[f64] {
        &self.end
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }

    pub fn null_slot(&self) -> bool {
        self.null_slot
    }

    pub fn span_score(&self, span: Span) -> f64 {
        self.start[span.start()] * self.end[span.end() - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpanPrediction {
    /// `None` is the null prediction.
    pub span: Option<Span>,
    pub score: f64,
}

impl SpanPrediction {
    pub fn null(score: f64) -> Self {
        SpanPrediction { span: None, score }
    }
}

/// Decodes the highest-scoring span `k <= l` with one pass that tracks the
/// running maximum of the start distribution. Ties go to the smallest `k`,
/// then the smallest `l`.
pub fn best_span(dists: &PositionDistributions) -> SpanPrediction {
    let p1 = &dists.start;
    let p2 = &dists.end;
    let mut arg_start = 0;
    let (mut best_score, mut best_k, mut best_l) = (f64::NEG_INFINITY, 0, 0);
    for l in 0..p2.len() {
        if p1[l] > p1[arg_start] {
            arg_start = l;
        }
        let score = p1[arg_start] * p2[l];
        if score > best_score || (score == best_score && arg_start < best_k) {
            best_score = score;
            best_k = arg_start;
            best_l = l;
        }
    }
    if best_score == 0.0 {
        // Every span scores zero; the tie rule picks the first one.
        best_k = 0;
        best_l = 0;
    }
    SpanPrediction { span: Some(Span::new(best_k, best_l + 1).expect("k <= l")), score: best_score }
}

#[derive(Clone, Copy, PartialEq)]
struct Ranked {
    score: f64,
    k: usize,
    l: usize,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    // Max-heap order: higher score, then smaller k, then smaller l.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score.total_cmp(&other.score).then_with(|| other.k.cmp(&self.k)).then_with(|| other.l.cmp(&self.l))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ends `l >= k` for one start `k`, yielded in (score desc, l asc) order.
struct EndCursor {
    pos: usize,
    run: VecDeque<usize>,
    run_score: f64,
}

impl EndCursor {
    fn next(&mut self, k: usize, p1: &[f64], p2: &[f64], order: &[usize]) -> Option<Ranked> {
        if self.run.is_empty() {
            while self.pos < order.len() && order[self.pos] < k {
                self.pos += 1;
            }
            let first = *order.get(self.pos)?;
            self.run_score = p1[k] * p2[first];
            // `order` is sorted by p2 descending, so equal products are adjacent.
            let mut run = Vec::new();
            while self.pos < order.len() {
                let l = order[self.pos];
                if l >= k {
                    if p1[k] * p2[l] != self.run_score {
                        break;
                    }
                    run.push(l);
                }
                self.pos += 1;
            }
            run.sort_unstable();
            self.run = run.into();
        }
        let l = self.run.pop_front()?;
        Some(Ranked { score: self.run_score, k, l })
    }
}

/// The `k` highest-scoring legal spans in descending order, with the same tie
/// rule as [`best_span`]. Exact: a lazy k-way merge over per-start streams.
pub fn top_k_spans(dists: &PositionDistributions, k: usize) -> Result<Vec<SpanPrediction>> {
    if k == 0 {
        return Err(Error::Config("top-k requires k >= 1".into()));
    }
    let p1 = &dists.start;
    let p2 = &dists.end;
    let m = p1.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p2[b].total_cmp(&p2[a]).then(a.cmp(&b)));

    let mut cursors: Vec<EndCursor> =
        (0..m).map(|_| EndCursor { pos: 0, run: VecDeque::new(), run_score: 0.0 }).collect();
    let mut heap = BinaryHeap::with_capacity(m);
    for (start, cursor) in cursors.iter_mut().enumerate() {
        if let Some(r) = cursor.next(start, p1, p2, &order) {
            heap.push(r);
        }
    }
    let mut out = Vec::with_capacity(k.min(m * (m + 1) / 2));
    while out.len() < k {
        let Some(top) = heap.pop() else { break };
        out.push(SpanPrediction { span: Some(Span::new(top.k, top.l + 1).expect("k <= l")), score: top.score });
        if let Some(r) = cursors[top.k].next(top.k, p1, p2, &order) {
            heap.push(r);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreSource {
    File,
    Lexical,
    Planted,
}

/// Scored candidate target spans for one query span.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRecord {
    qid: String,
    query_doc_id: String,
    query_span: Span,
    target_doc_id: String,
    predictions: Vec<SpanPrediction>,
    null_score: f64,
    source: ScoreSource,
    null_slot: bool,
}

impl PredictionRecord {
    /// Sorts `predictions` by descending score (stable). `null_slot` marks
    /// target spans as still being in `<NA>`-prefixed position space.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        qid: impl Into<String>,
        query_doc_id: impl Into<String>,
        query_span: Span,
        target_doc_id: impl Into<String>,
        mut predictions: Vec<SpanPrediction>,
        null_score: f64,
        source: ScoreSource,
        null_slot: bool,
    ) -> Result<Self> {
        if let Some(p) = predictions.iter().find(|p| p.score.is_nan()) {
            return Err(Error::Validation(format!("NaN span score for {:?}", p.span)));
        }
        if null_score.is_nan() {
            return Err(Error::Validation("NaN null score".into()));
        }
        predictions.sort_by(|a, b| b.score.total_cmp(&a.score));
        Ok(PredictionRecord {
            qid: qid.into(),
            query_doc_id: query_doc_id.into(),
            query_span,
            target_doc_id: target_doc_id.into(),
            predictions,
            null_score,
            source,
            null_slot,
        })
    }

    pub fn qid(&self) -> &str {
        &self.qid
    }

    pub fn query_doc_id(&self) -> &str {
        &self.query_doc_id
    }

    pub fn query_span(&self) -> Span {
        self.query_span
    }

    pub fn target_doc_id(&self) -> &str {
        &self.target_doc_id
    }

    pub fn predictions(&self) -> &[SpanPrediction] {
        &self.predictions
    }

    pub fn best(&self) -> Option<&SpanPrediction> {
        self.predictions.first()
    }

    pub fn null_score(&self) -> f64 {
        self.null_score
    }

    pub fn source(&self) -> ScoreSource {
        self.source
    }

    pub fn has_null_slot(&self) -> bool {
        self.null_slot
    }

    pub fn is_null(&self) -> bool {
        matches!(self.best(), Some(SpanPrediction { span: None, .. }))
    }

    pub(crate) fn with_source(mut self, source: ScoreSource) -> Self {
        self.source = source;
        self
    }

    /// Keeps the first `k` predictions.
    pub fn truncate(&mut self, k: usize) {
        self.predictions.truncate(k);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullMode {
    /// Null when the best span is exactly the `<NA>` slot.
    NaToken,
    /// Non-null only when the best score exceeds `null_score + tau`.
    ScoreThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullRule {
    pub mode: NullMode,
    pub tau: f64,
}

impl Default for NullRule {
    fn default() -> Self {
        NullRule { mode: NullMode::ScoreThreshold, tau: 0.0 }
    }
}

impl NullRule {
    pub fn na_token() -> Self {
        NullRule { mode: NullMode::NaToken, tau: 0.0 }
    }

    pub fn threshold(tau: f64) -> Self {
        NullRule { mode: NullMode::ScoreThreshold, tau }
    }
}

/// Decides between the best span and the null answer.
///
/// The returned record has no `<NA>` slot: in na-token mode surviving spans
/// are shifted down one position and spans covering only the slot are
/// dropped.
pub fn apply_null_rule(record: &PredictionRecord, rule: &NullRule) -> Result<PredictionRecord> {
    if !rule.tau.is_finite() {
        return Err(Error::Config(format!("tau must be finite, got {}", rule.tau)));
    }
    let mut out = record.clone();
    match rule.mode {
        NullMode::ScoreThreshold => {
            if record.null_slot {
                return Err(Error::Contract(format!(
                    "record {} still carries an <NA> slot; use the na-token rule",
                    record.qid
                )));
            }
            let best = record.predictions.iter().find(|p| p.span.is_some()).map_or(f64::NEG_INFINITY, |p| p.score);
            if best.partial_cmp(&(record.null_score + rule.tau)) != Some(std::cmp::Ordering::Greater) {
                out.predictions = vec![SpanPrediction::null(record.null_score)];
            }
        }
        NullMode::NaToken => {
            if !record.null_slot {
                return Err(Error::Config(format!(
                    "na-token rule needs an <NA> slot at position 0 (record {})",
                    record.qid
                )));
            }
            let na = Span::new(0, 1).expect("non-empty");
            match record.best() {
                None => out.predictions = vec![SpanPrediction::null(record.null_score)],
                Some(best) if best.span == Some(na) || best.span.is_none() => {
                    out.predictions = vec![SpanPrediction::null(best.score)];
                }
                Some(_) => {
                    let mut seen = HashSet::new();
                    out.predictions = record
                        .predictions
                        .iter()
                        .filter_map(|p| {
                            let span = p.span?;
                            let stripped = Span::new(span.start().max(1), span.end()).ok()?;
                            let shifted = stripped.shifted_down(1)?;
                            seen.insert(shifted).then_some(SpanPrediction { span: Some(shifted), score: p.score })
                        })
                        .collect();
                }
            }
            out.null_slot = false;
        }
    }
    Ok(out)
}

/// Produces prediction records for query spans of one document against
/// another.
pub trait Scorer {
    fn predict(&self, query: &Document, query_span: Span, target: &Document) -> Result<PredictionRecord>;
}

/// One query per sentence of `doc`.
pub fn sentence_queries(doc: &Document) -> Vec<Span> {
    doc.sentences().iter().map(|s| s.token_range).collect()
}

pub fn score_queries<S: Scorer + ?Sized>(
    scorer: &S,
    query: &Document,
    target: &Document,
    spans: &[Span],
) -> Result<Vec<PredictionRecord>> {
    spans.iter().map(|&span| scorer.predict(query, span, target)).collect()
}

pub(crate) fn make_qid(query: &Document, span: Span) -> String {
    let (i, j) = span.to_inclusive();
    format!("{}:{}-{}", query.doc_id(), i, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dists(p1: &[f64], p2: &[f64]) -> PositionDistributions {
        PositionDistributions::new(p1.to_vec(), p2.to_vec(), false).unwrap()
    }

    #[test]
    fn best_span_point_masses() {
        let b = best_span(&dists(&[1.0, 0.0], &[0.0, 1.0]));
        assert_eq!(b.span, Some(Span::new(0, 2).unwrap()));
        assert_eq!(b.score, 1.0);
    }

    #[test]
    fn best_span_uniform_tie_breaks_to_first() {
        let u = 1.0 / 3.0;
        let b = best_span(&dists(&[u; 3], &[u; 3]));
        assert_eq!(b.span, Some(Span::new(0, 1).unwrap()));
        assert_eq!(b.score, u * u);
    }

    #[test]
    fn best_span_ignores_illegal_reversed_pairs() {
        // The largest product (k = 1, l = 0) is not a legal span.
        let b = best_span(&dists(&[0.1, 0.9], &[0.9, 0.1]));
        assert_eq!(b.span, Some(Span::new(0, 1).unwrap()));
        assert!((b.score - 0.09).abs() < 1e-15);
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(PositionDistributions::new(vec![], vec![], false).is_err());
        assert!(PositionDistributions::new(vec![0.5], vec![0.5, 0.5], false).is_err());
        assert!(PositionDistributions::new(vec![f64::NAN], vec![1.0], false).is_err());
        assert!(PositionDistributions::new(vec![1.5], vec![1.0], false).is_err());
        let d = dists(&[0.5, 0.5], &[0.2, 0.7]);
        assert!(d.check_normalized().is_err());
        assert!(dists(&[0.5, 0.5], &[0.25, 0.75]).check_normalized().is_ok());
    }

    #[test]
    fn top_k_one_is_best_span() {
        let d = dists(&[0.2, 0.5, 0.3], &[0.1, 0.6, 0.3]);
        let top = top_k_spans(&d, 1).unwrap();
        assert_eq!(top, vec![best_span(&d)]);
        assert!(top_k_spans(&d, 0).is_err());
    }

    #[test]
    fn top_k_enumerates_all_legal_spans() {
        let d = dists(&[0.2, 0.5, 0.3], &[0.1, 0.6, 0.3]);
        let all = top_k_spans(&d, 100).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn top_k_zero_start_orders_by_end() {
        let d = dists(&[0.0, 1.0, 0.0], &[0.5, 0.2, 0.3]);
        let all = top_k_spans(&d, 6).unwrap();
        let spans: Vec<(usize, usize)> = all
            .iter()
            .map(|p| {
                let s = p.span.unwrap();
                (s.start(), s.end())
            })
            .collect();
        assert_eq!(spans, vec![(1, 3), (1, 2), (0, 1), (0, 2), (0, 3), (2, 3)]);
    }

    fn record(preds: Vec<SpanPrediction>, null_score: f64, null_slot: bool) -> PredictionRecord {
        PredictionRecord::new("q", "s", Span::new(0, 1).unwrap(), "t", preds, null_score, ScoreSource::File, null_slot)
            .unwrap()
    }

    fn span_pred(s: usize, e: usize, score: f64) -> SpanPrediction {
        SpanPrediction { span: Some(Span::new(s, e).unwrap()), score }
    }

    #[test]
    fn threshold_rule_default_tau_keeps_better_span() {
        let r = record(vec![span_pred(0, 2, 0.6)], 0.5, false);
        let out = apply_null_rule(&r, &NullRule::threshold(0.0)).unwrap();
        assert!(!out.is_null());
        let out = apply_null_rule(&r, &NullRule::threshold(0.2)).unwrap();
        assert!(out.is_null());
        assert_eq!(out.best().unwrap().score, 0.5);
    }

    #[test]
    fn threshold_rule_on_equal_scores_is_null() {
        let r = record(vec![span_pred(0, 2, 0.5)], 0.5, false);
        assert!(apply_null_rule(&r, &NullRule::threshold(0.0)).unwrap().is_null());
    }

    #[test]
    fn na_token_rule() {
        let r = record(vec![span_pred(0, 1, 0.7), span_pred(2, 4, 0.2)], 0.7, true);
        let out = apply_null_rule(&r, &NullRule::na_token()).unwrap();
        assert!(out.is_null());
        assert!(!out.has_null_slot());

        let r = record(
            vec![span_pred(2, 4, 0.5), span_pred(0, 1, 0.3), span_pred(0, 4, 0.1), span_pred(1, 4, 0.05)],
            0.3,
            true,
        );
        let out = apply_null_rule(&r, &NullRule::na_token()).unwrap();
        let spans: Vec<_> = out.predictions().iter().map(|p| p.span.unwrap()).collect();
        assert_eq!(spans, vec![Span::new(1, 3).unwrap(), Span::new(0, 3).unwrap()]);
        assert_eq!(out.predictions()[1].score, 0.1);
    }

    #[test]
    fn na_token_without_slot_is_config_error() {
        let r = record(vec![span_pred(0, 1, 0.7)], 0.1, false);
        assert!(matches!(apply_null_rule(&r, &NullRule::na_token()), Err(Error::Config(_))));
        let r = record(vec![span_pred(0, 1, 0.7)], 0.1, true);
        assert!(matches!(apply_null_rule(&r, &NullRule::threshold(0.0)), Err(Error::Contract(_))));
    }
}
