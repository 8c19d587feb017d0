//! Token-level F1 / exact match for span predictions and sentence-pair
//! precision / recall / F1 for alignments.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Alignment, Document, Span};
use crate::error::{Error, Result};
use crate::predict::PredictionRecord;
use crate::snap::{snap_span, BoundaryRule};

/// Token-overlap F1 in `[0, 1]` and exact match. Two null spans agree
/// perfectly; one null span against a real one scores zero.
pub fn span_f1_em(pred: Option<Span>, gold: Option<Span>) -> (f64, bool) {
    match (pred, gold) {
        (None, None) => (1.0, true),
        (None, Some(_)) | (Some(_), None) => (0.0, false),
        (Some(p), Some(g)) => {
            let overlap = p.overlap(g);
            let f1 = 2.0 * overlap as f64 / (p.len() + g.len()) as f64;
            (f1, p == g)
        }
    }
}

/// `(qid, predicted span, gold span)`.
pub type SpanPair = (String, Option<Span>, Option<Span>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanItem {
    pub qid: String,
    pub f1: f64,
    pub em: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanEvalResult {
    /// Percent.
    pub f1: f64,
    /// Percent.
    pub em: f64,
    pub per_item: Vec<SpanItem>,
}

/// Averages per-item scores over `(qid, predicted, gold)` triples, as
/// percentages. No items score zero.
pub fn span_eval<I>(items: I) -> SpanEvalResult
where
    I: IntoIterator<Item = (String, Option<Span>, Option<Span>)>,
{
    let per_item: Vec<SpanItem> = items
        .into_iter()
        .map(|(qid, p, g)| {
            let (f1, em) = span_f1_em(p, g);
            SpanItem { qid, f1, em }
        })
        .collect();
    let n = per_item.len();
    let (f1, em) = if n == 0 {
        (0.0, 0.0)
    } else {
        (
            100.0 * per_item.iter().map(|i| i.f1).sum::<f64>() / n as f64,
            100.0 * per_item.iter().filter(|i| i.em).count() as f64 / n as f64,
        )
    };
    SpanEvalResult { f1, em, per_item }
}

/// Gold target span for a query: the target side of the gold group holding
/// the query's first sentence, or null when that group has no target side.
pub fn gold_target_span(
    query_span: Span,
    query_doc: &Document,
    target_doc: &Document,
    gold: &Alignment,
) -> Result<Option<Span>> {
    let first = snap_span(query_doc, Some(query_span), BoundaryRule::Nearest)?.start();
    let Some(group) = gold.links().iter().find(|g| g.src().contains(&first)) else {
        return Ok(None);
    };
    let (Some(&lo), Some(&hi)) = (group.tgt().first(), group.tgt().last()) else {
        return Ok(None);
    };
    let sents = target_doc.sentences();
    if hi >= sents.len() {
        return Err(Error::Reference(format!("gold target sentence {hi} not in document {:?}", target_doc.doc_id())));
    }
    Ok(Some(Span::new(sents[lo].token_range.start(), sents[hi].token_range.end())?))
}

/// Span evaluation of null-ruled records against a gold alignment given in
/// the records' query-to-target orientation.
pub fn span_eval_records(
    records: &[PredictionRecord],
    query_doc: &Document,
    target_doc: &Document,
    gold: &Alignment,
) -> Result<Vec<SpanPair>> {
    if gold.src_doc_id() != query_doc.doc_id() || gold.tgt_doc_id() != target_doc.doc_id() {
        return Err(Error::Reference(format!(
            "gold {} -> {} does not match {} -> {}",
            gold.src_doc_id(),
            gold.tgt_doc_id(),
            query_doc.doc_id(),
            target_doc.doc_id()
        )));
    }
    records
        .iter()
        .map(|r| {
            if r.has_null_slot() {
                return Err(Error::Contract(format!("record {} has not been through a null rule", r.qid())));
            }
            let pred = r.best().and_then(|p| p.span);
            let gold = gold_target_span(r.query_span(), query_doc, target_doc, gold)?;
            Ok((r.qid().to_string(), pred, gold))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEvalResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn harmonic_f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl PairEvalResult {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        let precision = pct(tp, tp + fp);
        let recall = pct(tp, tp + fn_);
        PairEvalResult { precision, recall, f1: harmonic_f1(precision, recall), tp, fp, fn_ }
    }
}

fn count(pred: &BTreeSet<(usize, usize)>, gold: &BTreeSet<(usize, usize)>) -> (usize, usize, usize) {
    let tp = pred.intersection(gold).count();
    (tp, pred.len() - tp, gold.len() - tp)
}

/// Precision/recall over the induced one-to-one sentence links of each
/// alignment.
pub fn pair_eval(pred: &Alignment, gold: &Alignment) -> Result<PairEvalResult> {
    if pred.src_doc_id() != gold.src_doc_id() || pred.tgt_doc_id() != gold.tgt_doc_id() {
        return Err(Error::Reference(format!(
            "prediction {} -> {} compared with gold {} -> {}",
            pred.src_doc_id(),
            pred.tgt_doc_id(),
            gold.src_doc_id(),
            gold.tgt_doc_id()
        )));
    }
    let (tp, fp, fn_) = count(&pred.induced_links(), &gold.induced_links());
    Ok(PairEvalResult::from_counts(tp, fp, fn_))
}

/// Micro-averaged link counts over many document pairs. Gold pairs without
/// a prediction count as all misses; predictions for unknown pairs are an
/// error.
pub fn pair_eval_corpus(preds: &[Alignment], golds: &[Alignment]) -> Result<PairEvalResult> {
    let gold_by_pair: HashMap<(&str, &str), &Alignment> =
        golds.iter().map(|g| ((g.src_doc_id(), g.tgt_doc_id()), g)).collect();
    let mut seen = BTreeSet::new();
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for p in preds {
        let key = (p.src_doc_id(), p.tgt_doc_id());
        let g = gold_by_pair
            .get(&key)
            .ok_or_else(|| Error::Reference(format!("no gold alignment for {} -> {}", key.0, key.1)))?;
        if !seen.insert(key) {
            return Err(Error::Validation(format!("duplicate prediction for {} -> {}", key.0, key.1)));
        }
        let (a, b, c) = count(&p.induced_links(), &g.induced_links());
        tp += a;
        fp += b;
        fn_ += c;
    }
    for g in golds {
        if !seen.contains(&(g.src_doc_id(), g.tgt_doc_id())) {
            fn_ += g.induced_links().len();
        }
    }
    Ok(PairEvalResult::from_counts(tp, fp, fn_))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EvalEntry {
    Span {
        model: String,
        direction: String,
        f1: f64,
        em: f64,
        items: usize,
    },
    Pair {
        model: String,
        direction: String,
        #[serde(flatten)]
        result: PairEvalResult,
    },
}

impl EvalEntry {
    pub fn span(model: impl Into<String>, direction: impl Into<String>, r: &SpanEvalResult) -> Self {
        EvalEntry::Span {
            model: model.into(),
            direction: direction.into(),
            f1: r.f1,
            em: r.em,
            items: r.per_item.len(),
        }
    }

    pub fn pair(model: impl Into<String>, direction: impl Into<String>, r: PairEvalResult) -> Self {
        EvalEntry::Pair { model: model.into(), direction: direction.into(), result: r }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Json,
}

const SPAN_HEADER: &str = "Model                Direction   F1 score  Exact Match";
const PAIR_HEADER: &str = "Model                Direction   Precision   Recall       F1";

/// Renders results as plain-text tables (one section per result kind) or
/// as JSON.
pub fn report(entries: &[EvalEntry], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(entries).expect("report entries serialize");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(entries),
    }
}

fn render_text(entries: &[EvalEntry]) -> String {
    let spans: Vec<&EvalEntry> = entries.iter().filter(|e| matches!(e, EvalEntry::Span { .. })).collect();
    let pairs: Vec<&EvalEntry> = entries.iter().filter(|e| matches!(e, EvalEntry::Pair { .. })).collect();
    let mut out = String::new();
    let both = !spans.is_empty() && !pairs.is_empty();
    if !spans.is_empty() || pairs.is_empty() {
        if both {
            out.push_str("## Span prediction\n");
        }
        out.push_str(SPAN_HEADER);
        out.push('\n');
        for e in spans {
            if let EvalEntry::Span { model, direction, f1, em, .. } = e {
                let _ = writeln!(out, "{model:<20} {direction:<10} {f1:>9.2} {em:>12.2}");
            }
        }
    }
    if !pairs.is_empty() {
        if both {
            out.push_str("\n## Sentence alignment\n");
        }
        out.push_str(PAIR_HEADER);
        out.push('\n');
        for e in pairs {
            if let EvalEntry::Pair { model, direction, result } = e {
                let _ = writeln!(
                    out,
                    "{model:<20} {direction:<10} {:>10.1} {:>8.1} {:>8.1}",
                    result.precision, result.recall, result.f1
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AlignmentGroup;

    fn sp(s: usize, e: usize) -> Option<Span> {
        Some(Span::new(s, e).unwrap())
    }

    #[test]
    fn span_metrics() {
        assert_eq!(span_f1_em(sp(0, 4), sp(0, 4)), (1.0, true));
        let (f1, em) = span_f1_em(sp(0, 5), sp(2, 6));
        assert!((f1 - 6.0 / 9.0).abs() < 1e-15);
        assert!(!em);
        assert_eq!(span_f1_em(None, sp(0, 1)), (0.0, false));
        assert_eq!(span_f1_em(None, None), (1.0, true));
    }

    #[test]
    fn reported_baseline_f1() {
        let f1 = harmonic_f1(54.1, 50.0);
        assert!((f1 - 51.96).abs() < 0.01, "{f1}");
    }

    fn align(groups: Vec<(Vec<usize>, Vec<usize>)>) -> Alignment {
        Alignment::new("s", "t", groups.into_iter().map(|(s, t)| AlignmentGroup::new(s, t, None).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn identical_alignments_score_100() {
        let a = align(vec![(vec![0], vec![0]), (vec![1, 2], vec![1])]);
        let r = pair_eval(&a, &a).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (100.0, 100.0, 100.0));
    }

    #[test]
    fn many_to_one_gold_induces_two_links() {
        let gold = align(vec![(vec![0, 1], vec![0])]);
        let pred = align(vec![(vec![0], vec![0])]);
        let r = pair_eval(&pred, &gold).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (1, 0, 1));
        assert_eq!((r.precision, r.recall), (100.0, 50.0));
    }

    #[test]
    fn document_mismatch_is_reference_error() {
        let a = align(vec![(vec![0], vec![0])]);
        let b = Alignment::new("x", "t", vec![]).unwrap();
        assert!(matches!(pair_eval(&a, &b), Err(Error::Reference(_))));
    }

    #[test]
    fn corpus_eval_counts_missing_predictions() {
        let g1 = align(vec![(vec![0], vec![0])]);
        let g2 = Alignment::new("s2", "t2", vec![AlignmentGroup::new(vec![0], vec![0], None).unwrap()]).unwrap();
        let r = pair_eval_corpus(std::slice::from_ref(&g1), &[g1.clone(), g2]).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (1, 0, 1));
        let stray = Alignment::new("zz", "t", vec![]).unwrap();
        assert!(pair_eval_corpus(&[stray], &[g1]).is_err());
    }

    #[test]
    fn empty_report_is_header_only() {
        let text = report(&[], ReportFormat::Text);
        assert_eq!(text, format!("{SPAN_HEADER}\n"));
    }

    #[test]
    fn report_sections() {
        let span = EvalEntry::span("qanet", "en-fr", &SpanEvalResult { f1: 98.57, em: 97.67, per_item: vec![] });
        let text = report(std::slice::from_ref(&span), ReportFormat::Text);
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("98.57") && text.contains("97.67"));

        let pair = EvalEntry::pair("baseline", "ja-en", PairEvalResult::from_counts(541, 459, 541));
        let text = report(&[span.clone(), pair.clone()], ReportFormat::Text);
        assert!(text.contains("## Span prediction") && text.contains("## Sentence alignment"));

        let json = report(&[span, pair], ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["kind"], "span");
        assert_eq!(v[1]["kind"], "pair");
        assert_eq!(v[1]["tp"], 541);
    }
}
